#pragma once

#include "hmlasso/types.hpp"

#include <string>
#include <unordered_set>
#include <vector>

namespace hmlasso {

/// Numeric dataset with an observation mask and a fully observed response.
///
/// Missing cells hold NaN internally and are never consumed by arithmetic;
/// `mask` (exactly 0/1) is the single source of truth for observedness.
/// `column_means` / `response_mean` track the means of the original
/// (uncentered) data so intercepts can be reconstructed after fitting.
struct IncompleteDataset {
  Matrix values;
  Matrix mask;
  Vector response;
  Vector column_means;
  double response_mean = 0.0;
  Vector column_scales;  // divisors applied by standardize(); all ones otherwise
  bool centered = false;
  std::vector<std::string> column_names;  // empty when the source had no header

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

/// Zero-filled view of a centered dataset: z = mask .* centered values.
struct ZeroFilledView {
  Matrix z;
};

enum class HeaderMode { Auto, Require, None };

struct CsvOptions {
  char delimiter = ',';
  HeaderMode header = HeaderMode::Auto;
  std::string response_name;  // wins over response_index when non-empty
  int response_index = -1;    // zero-based column position in the file
  std::unordered_set<std::string> missing_tokens{"NA", "NaN", ""};
};

/// Builds a dataset from a value matrix, a 0/1 mask, and a response vector.
/// Masked-out cells of `values` are replaced by NaN; observed-entry column
/// means are computed immediately.
IncompleteDataset make_dataset(Matrix values, Matrix mask, Vector response);

IncompleteDataset load_csv(const std::string& path, const CsvOptions& options = {});

/// Shifts observed entries by their per-column observed means and the response
/// by its mean; accumulated shifts are stored for intercept reconstruction.
/// Idempotent up to floating-point noise. Throws on a fully missing column.
IncompleteDataset center(IncompleteDataset ds);

/// Scales each column by its observed-entry standard deviation (1/n convention).
/// Requires a centered dataset; throws on a constant column.
IncompleteDataset standardize(IncompleteDataset ds);

ZeroFilledView zero_fill(const IncompleteDataset& ds);

/// Row subset sharing the parent's means/scales/centering state.
IncompleteDataset subset_rows(const IncompleteDataset& ds, const std::vector<int>& row_indices);

/// Coefficients mapped back to the original column scales (identity unless
/// the dataset was standardized).
Vector raw_scale_coefficients(const Vector& beta, const IncompleteDataset& ds);

/// Intercept for a fit on centered (optionally standardized) data.
double intercept_for(const Vector& beta, const IncompleteDataset& ds);

/// Debug export of the centered design (observed cells only, "NA" elsewhere).
void write_centered_csv(const IncompleteDataset& ds, const std::string& path,
                        char delimiter = ',');

}  // namespace hmlasso
