#pragma once

#include "hmlasso/types.hpp"

#include <string>
#include <vector>

namespace hmlasso {

/// Formats a double with 17 significant digits, '.' decimal point, no locale
/// dependence. All CSV output goes through this so files are reproducible.
std::string format_g17(double v);

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header = {}, char delimiter = ',');

/// Row-oriented CSV writer for result tables.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  std::vector<std::string>& new_row();
  void add(std::vector<std::string> row);
  void write(const std::string& path, char delimiter = ',') const;

  static std::string cell(double v) { return format_g17(v); }
  static std::string cell(std::int64_t v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace hmlasso
