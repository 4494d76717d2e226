#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace acr {

/// "%.17g"; empty for a missing value.
std::string format_number(double x);
std::string format_number(const std::optional<double>& x);

/// Comma-separated numeric table; empty cells are missing values.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;

  /// Column index by name; throws std::out_of_range if absent.
  std::size_t column(const std::string& name) const;
  std::vector<std::optional<double>> column_values(const std::string& name) const;
};

std::string write_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

void save_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable load_csv(const std::filesystem::path& path);

/// Two-column whitespace-separated (t, value) plot data; missing values are skipped.
void save_dat(const std::filesystem::path& path, const std::vector<std::optional<double>>& values);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace acr
