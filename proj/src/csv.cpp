#include "hmlasso/csv.hpp"

#include <cstdio>
#include <fstream>

namespace hmlasso {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header, char delimiter) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  if (!header.empty()) {
    for (Index j = 0; j < static_cast<Index>(header.size()); ++j) {
      if (j > 0) out << delimiter;
      out << header[j];
    }
    out << '\n';
  }
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << delimiter;
      out << format_g17(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw NumericError("write failed: " + path);
}

std::vector<std::string>& CsvTable::new_row() {
  rows_.emplace_back();
  return rows_.back();
}

void CsvTable::add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

void CsvTable::write(const std::string& path, char delimiter) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  for (std::size_t j = 0; j < header_.size(); ++j) {
    if (j > 0) out << delimiter;
    out << header_[j];
  }
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out << delimiter;
      out << row[j];
    }
    out << '\n';
  }
  if (!out) throw NumericError("write failed: " + path);
}

}  // namespace hmlasso
