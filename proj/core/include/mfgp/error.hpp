#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mfgp {

/// Bad argument: dimension mismatch, invalid hyperparameter, unmet precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Factorization failure or another floating-point breakdown.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hyperparameter fitting failed. Carries the fidelity level (1-based, 0 if unknown).
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, std::size_t level)
      : std::runtime_error(what), level_(level) {}

  std::size_t level() const noexcept { return level_; }

 private:
  std::size_t level_;
};

/// The model refuses the request by contract (e.g. intermediate-level BayHEm prediction).
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed input file. `row` is the 1-based line number, 0 when not applicable.
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& file, std::size_t row, const std::string& message)
      : std::runtime_error(format(file, row, message)), file_(file), row_(row) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t row() const noexcept { return row_; }

 private:
  static std::string format(const std::string& file, std::size_t row,
                            const std::string& message) {
    std::string out = file.empty() ? std::string("<input>") : file;
    if (row > 0) out += ":" + std::to_string(row);
    return out + ": " + message;
  }

  std::string file_;
  std::size_t row_;
};

}  // namespace mfgp
