#include "acr/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "acr/errors.hpp"

namespace acr {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_number(const std::optional<double>& x) {
  return x ? format_number(*x) : std::string();
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("CSV has no column '" + name + "'");
}

std::vector<std::optional<double>> CsvTable::column_values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<std::optional<double>> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

std::string write_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("CSV: missing header");
  table.header = split(line, ',');
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != table.header.size())
      throw ConfigError("CSV: row has " + std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(table.header.size()));
    std::vector<std::optional<double>> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      if (c.empty()) {
        row.emplace_back();
        continue;
      }
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(c.c_str(), &end);
      if (end != c.c_str() + c.size()) throw ConfigError("CSV: not a number: '" + c + "'");
      row.emplace_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

void save_csv(const std::filesystem::path& path, const CsvTable& table) {
  write_text_file(path, write_csv(table));
}

CsvTable load_csv(const std::filesystem::path& path) { return parse_csv(read_text_file(path)); }

void save_dat(const std::filesystem::path& path,
              const std::vector<std::optional<double>>& values) {
  std::string out;
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (!values[t] || !std::isfinite(*values[t])) continue;
    out += std::to_string(t) + ' ' + format_number(*values[t]) + '\n';
  }
  write_text_file(path, out);
}

}  // namespace acr
