#include "hmlasso/dataset.hpp"

#include "hmlasso/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace hmlasso {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delim)) cells.push_back(cell);
  if (!line.empty() && line.back() == delim) cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

Vector observed_column_means(const Matrix& values, const Matrix& mask) {
  const Index n = values.rows(), p = values.cols();
  Vector means = Vector::Zero(p);
  for (Index j = 0; j < p; ++j) {
    double sum = 0.0;
    Index count = 0;
    for (Index i = 0; i < n; ++i) {
      if (mask(i, j) == 1.0) {
        sum += values(i, j);
        ++count;
      }
    }
    means(j) = count > 0 ? sum / static_cast<double>(count) : 0.0;
  }
  return means;
}

}  // namespace

IncompleteDataset make_dataset(Matrix values, Matrix mask, Vector response) {
  if (values.rows() != mask.rows() || values.cols() != mask.cols())
    throw ValidationError("values and mask dimensions differ");
  if (response.size() != values.rows())
    throw ValidationError("response length does not match row count");
  if (values.rows() < 1 || values.cols() < 1) throw ValidationError("empty dataset");
  for (Index i = 0; i < mask.rows(); ++i)
    for (Index j = 0; j < mask.cols(); ++j) {
      const double m = mask(i, j);
      if (m != 0.0 && m != 1.0) throw ValidationError("mask entries must be exactly 0 or 1");
      if (m == 1.0 && !std::isfinite(values(i, j)))
        throw ValidationError("non-finite value marked as observed");
      if (m == 0.0) values(i, j) = kNaN;
    }
  if (!response.allFinite()) throw ValidationError("response contains non-finite entries");

  IncompleteDataset ds;
  ds.values = std::move(values);
  ds.mask = std::move(mask);
  ds.response = std::move(response);
  ds.column_means = observed_column_means(ds.values, ds.mask);
  ds.response_mean = ds.response.size() > 0 ? ds.response.mean() : 0.0;
  ds.column_scales = Vector::Ones(ds.cols());
  ds.centered = false;
  return ds;
}

IncompleteDataset load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);

  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && rows.empty()) continue;  // leading blank lines
    rows.push_back(split(line, options.delimiter));
  }
  while (!rows.empty() && rows.back().size() == 1 && trim(rows.back()[0]).empty())
    rows.pop_back();  // trailing blank lines
  if (rows.empty()) throw ValidationError("empty file: " + path);

  const std::size_t width = rows[0].size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width) {
      throw ValidationError("row " + std::to_string(i + 1) + " has " +
                            std::to_string(rows[i].size()) + " cells, expected " +
                            std::to_string(width));
    }
  }
  if (width < 2) throw ValidationError("need at least one predictor column plus a response");

  auto is_missing = [&](const std::string& cell) {
    return options.missing_tokens.count(trim(cell)) > 0;
  };
  auto looks_numeric = [&](const std::string& cell) {
    double v;
    return parse_double(trim(cell), v);
  };

  bool has_header = false;
  switch (options.header) {
    case HeaderMode::Require:
      has_header = true;
      break;
    case HeaderMode::None:
      has_header = false;
      break;
    case HeaderMode::Auto:
      for (const auto& cell : rows[0]) {
        if (!looks_numeric(cell) && !is_missing(cell)) {
          has_header = true;
          break;
        }
      }
      break;
  }

  std::vector<std::string> names;
  if (has_header) {
    for (const auto& cell : rows[0]) names.push_back(trim(cell));
  }

  int response_col = -1;
  if (!options.response_name.empty()) {
    if (!has_header)
      throw ValidationError("response selected by name but the file has no header row");
    for (std::size_t j = 0; j < names.size(); ++j)
      if (names[j] == options.response_name) response_col = static_cast<int>(j);
    if (response_col < 0)
      throw ValidationError("response column '" + options.response_name + "' not found");
  } else if (options.response_index >= 0) {
    if (options.response_index >= static_cast<int>(width))
      throw ValidationError("response index " + std::to_string(options.response_index) +
                            " out of range for " + std::to_string(width) + " columns");
    response_col = options.response_index;
  } else {
    throw ValidationError("no response column specified (use a name or an index)");
  }

  const std::size_t first_data = has_header ? 1 : 0;
  const std::size_t n = rows.size() - first_data;
  if (n < 2) throw ValidationError("need at least 2 data rows, got " + std::to_string(n));
  const Index p = static_cast<Index>(width) - 1;

  Matrix values(static_cast<Index>(n), p);
  Matrix mask = Matrix::Ones(static_cast<Index>(n), p);
  Vector response(static_cast<Index>(n));

  for (std::size_t r = 0; r < n; ++r) {
    const auto& cells = rows[r + first_data];
    const std::size_t file_row = r + first_data + 1;  // 1-based, counting the header
    Index out_col = 0;
    for (std::size_t c = 0; c < width; ++c) {
      const std::string cell = trim(cells[c]);
      const bool in_response = static_cast<int>(c) == response_col;
      if (is_missing(cell)) {
        if (in_response)
          throw ValidationError("missing value in response column at row " +
                                std::to_string(file_row));
        mask(static_cast<Index>(r), out_col) = 0.0;
        values(static_cast<Index>(r), out_col) = kNaN;
        ++out_col;
        continue;
      }
      double v;
      if (!parse_double(cell, v) || !std::isfinite(v)) {
        throw ValidationError("cannot parse '" + cell + "' at row " + std::to_string(file_row) +
                              ", column " + std::to_string(c + 1));
      }
      if (in_response) {
        response(static_cast<Index>(r)) = v;
      } else {
        values(static_cast<Index>(r), out_col) = v;
        ++out_col;
      }
    }
  }

  IncompleteDataset ds = make_dataset(std::move(values), std::move(mask), std::move(response));
  if (has_header) {
    for (std::size_t j = 0; j < width; ++j)
      if (static_cast<int>(j) != response_col) ds.column_names.push_back(names[j]);
  }
  return ds;
}

IncompleteDataset center(IncompleteDataset ds) {
  const Index n = ds.rows(), p = ds.cols();
  Vector shift = Vector::Zero(p);
  for (Index j = 0; j < p; ++j) {
    double sum = 0.0;
    Index count = 0;
    for (Index i = 0; i < n; ++i) {
      if (ds.mask(i, j) == 1.0) {
        sum += ds.values(i, j);
        ++count;
      }
    }
    if (count == 0) throw ValidationError("fully missing column " + std::to_string(j + 1));
    shift(j) = sum / static_cast<double>(count);
  }
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i)
      if (ds.mask(i, j) == 1.0) ds.values(i, j) -= shift(j);

  const double y_shift = ds.response.mean();
  ds.response.array() -= y_shift;

  if (ds.centered) {
    // Re-centering: accumulate so the stored means keep describing the
    // original data. Shifts are applied before scaling, so undo the scale.
    ds.column_means += shift.cwiseProduct(ds.column_scales);
    ds.response_mean += y_shift;
  } else {
    ds.column_means = shift;
    ds.response_mean = y_shift;
  }
  ds.centered = true;
  return ds;
}

IncompleteDataset standardize(IncompleteDataset ds) {
  if (!ds.centered) throw ValidationError("standardize requires a centered dataset");
  const Index n = ds.rows(), p = ds.cols();
  for (Index j = 0; j < p; ++j) {
    double ss = 0.0;
    Index count = 0;
    for (Index i = 0; i < n; ++i) {
      if (ds.mask(i, j) == 1.0) {
        ss += ds.values(i, j) * ds.values(i, j);
        ++count;
      }
    }
    const double sd = std::sqrt(ss / static_cast<double>(count));
    if (!(sd > 0.0))
      throw ValidationError("constant column " + std::to_string(j + 1) + " cannot be standardized");
    for (Index i = 0; i < n; ++i)
      if (ds.mask(i, j) == 1.0) ds.values(i, j) /= sd;
    ds.column_scales(j) *= sd;
  }
  return ds;
}

ZeroFilledView zero_fill(const IncompleteDataset& ds) {
  if (!ds.centered) throw ValidationError("zero_fill requires a centered dataset");
  ZeroFilledView view;
  view.z = (ds.mask.array() == 1.0).select(ds.values, Matrix::Zero(ds.rows(), ds.cols()));
  return view;
}

IncompleteDataset subset_rows(const IncompleteDataset& ds, const std::vector<int>& row_indices) {
  if (row_indices.empty()) throw ValidationError("empty row subset");
  IncompleteDataset out;
  const Index m = static_cast<Index>(row_indices.size());
  out.values.resize(m, ds.cols());
  out.mask.resize(m, ds.cols());
  out.response.resize(m);
  for (Index i = 0; i < m; ++i) {
    const int r = row_indices[static_cast<std::size_t>(i)];
    if (r < 0 || r >= ds.rows()) throw ValidationError("row index out of range");
    out.values.row(i) = ds.values.row(r);
    out.mask.row(i) = ds.mask.row(r);
    out.response(i) = ds.response(r);
  }
  out.column_means = ds.column_means;
  out.response_mean = ds.response_mean;
  out.column_scales = ds.column_scales;
  out.centered = ds.centered;
  out.column_names = ds.column_names;
  return out;
}

Vector raw_scale_coefficients(const Vector& beta, const IncompleteDataset& ds) {
  return beta.cwiseQuotient(ds.column_scales);
}

double intercept_for(const Vector& beta, const IncompleteDataset& ds) {
  return ds.response_mean - ds.column_means.dot(raw_scale_coefficients(beta, ds));
}

void write_centered_csv(const IncompleteDataset& ds, const std::string& path, char delimiter) {
  if (!ds.centered) throw ValidationError("dataset is not centered");
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  for (Index j = 0; j < ds.cols(); ++j) {
    const std::string name = ds.column_names.empty() ? "x" + std::to_string(j + 1)
                                                     : ds.column_names[static_cast<std::size_t>(j)];
    out << name << delimiter;
  }
  out << "y\n";
  for (Index i = 0; i < ds.rows(); ++i) {
    for (Index j = 0; j < ds.cols(); ++j) {
      if (ds.mask(i, j) == 1.0)
        out << format_g17(ds.values(i, j));
      else
        out << "NA";
      out << delimiter;
    }
    out << format_g17(ds.response(i)) << '\n';
  }
}

}  // namespace hmlasso
