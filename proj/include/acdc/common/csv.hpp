#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace acdc {

// Minimal RFC-4180 style table: header + rows of string cells. Numeric cells
// are written with 17 significant digits so values round-trip exactly.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws InvalidInput
  bool has_column(const std::string& name) const;
  double number(std::size_t row, std::size_t col) const;
};

std::string format_number(double v);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

std::string to_csv_string(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

}  // namespace acdc
