#include "mfgp/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfgp/error.hpp"

namespace mfgp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

}  // namespace

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string Metadata::config_hash() const { return fnv1a_hex(config); }

std::string Metadata::csv_block() const {
  std::string out;
  out += "# tool: " + tool + " " + version + "\n";
  if (!command.empty()) out += "# command: " + command + "\n";
  out += "# config_hash: " + config_hash() + "\n";
  out += "# seed: " + std::to_string(seed) + "\n";
  out += "# config: " + config + "\n";
  return out;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_short(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

CsvTable parse_csv(std::string_view text, const std::string& source) {
  CsvTable t;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() == '#') {
      line.remove_prefix(1);
      if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
      t.comments.emplace_back(line);
      continue;
    }
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (!have_header) {
      for (auto c : cells) {
        if (c.empty()) throw DataError(source, line_no, "empty column name in header");
        t.header.emplace_back(c);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw DataError(source, line_no,
                      "expected " + std::to_string(t.header.size()) + " cells, found " +
                          std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (!parse_double(cells[j], row[j])) {
        throw DataError(source, line_no,
                        "column '" + t.header[j] + "': not a finite number: '" +
                            std::string(cells[j]) + "'");
      }
    }
    t.rows.push_back(std::move(row));
    t.lines.push_back(line_no);
  }
  if (!have_header) throw DataError(source, 0, "missing header row");
  return t;
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_text_file(path), path); }

std::string format_csv(const CsvTable& table) {
  std::string out;
  for (const auto& c : table.comments) out += "# " + c + "\n";
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j) out += ",";
    out += table.header[j];
  }
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ",";
      out += format_number(row[j]);
    }
    out += "\n";
  }
  return out;
}

LevelData level_from_csv(const CsvTable& table, const std::string& source,
                         std::size_t level_index) {
  if (table.columns() < 2) {
    throw DataError(source, 0, "need at least one input column and one output column");
  }
  const auto p = static_cast<Eigen::Index>(table.columns() - 1);
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  LevelData d;
  d.level_index = level_index;
  d.X.resize(n, p);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < p; ++j) d.X(i, j) = row[static_cast<std::size_t>(j)];
    d.y(i) = row.back();
  }
  if (auto dup = find_duplicate_rows(d.X)) {
    const bool known = table.lines.size() == table.rows.size();
    const auto line_of = [&](std::size_t r) { return known ? table.lines[r] : r + 1; };
    throw DataError(source, line_of(dup->second),
                    "duplicate design row (same inputs as line " +
                        std::to_string(line_of(dup->first)) + ")");
  }
  return d;
}

LevelData read_level_csv(const std::string& path, std::size_t level_index) {
  return level_from_csv(read_csv(path), path, level_index);
}

DesignMatrix points_from_csv(const CsvTable& table, const std::string& source, std::size_t dim) {
  // A trailing "y" column (a data file) is accepted and ignored.
  const bool has_output = table.columns() == dim + 1 && table.header.back() == "y";
  if (table.columns() != dim && !has_output) {
    throw DataError(source, 0,
                    "points file has " + std::to_string(table.columns()) +
                        " columns, model expects " + std::to_string(dim) + " inputs");
  }
  DesignMatrix X(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = table.rows[i][j];
    }
  }
  return X;
}

CsvTable level_to_csv(const LevelData& data) {
  CsvTable t;
  for (std::size_t j = 0; j < data.dim(); ++j) t.header.push_back("x" + std::to_string(j + 1));
  t.header.push_back("y");
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
    std::vector<double> row(data.dim() + 1);
    for (Eigen::Index j = 0; j < data.X.cols(); ++j) row[static_cast<std::size_t>(j)] = data.X(i, j);
    row.back() = data.y(i);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string csv_escape(std::string_view cell) {
  if (cell.find_first_of(",\"\n") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path, 0, std::string("cannot open: ") + std::strerror(errno));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError(path, 0, std::string("cannot write: ") + std::strerror(errno));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError(path, 0, "write failed");
}

}  // namespace mfgp
