#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mfgp/gp.hpp"
#include "mfgp/types.hpp"

namespace mfgp {

/// Header block written at the top of every output. Two outputs with equal
/// blocks carry equal payloads.
struct Metadata {
  std::string tool = "mfgp";
  std::string version = MFGP_VERSION;
  std::string command;
  std::uint64_t seed = 0;
  /// Canonical (sorted-key, compact) JSON of the effective configuration.
  std::string config;

  /// FNV-1a 64 of `config`, as 16 lowercase hex digits.
  std::string config_hash() const;
  /// "# key: value" lines.
  std::string csv_block() const;
};

std::string fnv1a_hex(std::string_view text);

/// 17 significant digits, shortest form that %g allows: lossless for doubles.
std::string format_number(double v);
/// `digits` significant digits for human-facing tables.
std::string format_short(double v, int digits = 4);

/// A numeric CSV: comment lines starting with '#', one header row, then rows.
struct CsvTable {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> lines;  // source line of each row; may be empty

  std::size_t columns() const noexcept { return header.size(); }
};

/// Strict parser: ragged rows, empty or non-numeric cells and missing header
/// raise DataError with the 1-based line number. `source` names the input.
CsvTable parse_csv(std::string_view text, const std::string& source);
CsvTable read_csv(const std::string& path);
/// Comments, header and rows at 17 significant digits. parse then format is
/// byte-identical for any output of this function.
std::string format_csv(const CsvTable& table);

/// Level data from a CSV with columns x1..xp,y. Duplicate design rows raise
/// DataError naming both lines.
LevelData level_from_csv(const CsvTable& table, const std::string& source,
                         std::size_t level_index);
LevelData read_level_csv(const std::string& path, std::size_t level_index);
/// Points from a CSV of `dim` input columns, optionally followed by a "y" column.
DesignMatrix points_from_csv(const CsvTable& table, const std::string& source, std::size_t dim);
CsvTable level_to_csv(const LevelData& data);

/// Quotes a text cell when it contains a comma, quote or newline.
std::string csv_escape(std::string_view cell);

std::string read_text_file(const std::string& path);
/// Creates parent directories as needed.
void write_text_file(const std::string& path, std::string_view content);

}  // namespace mfgp
