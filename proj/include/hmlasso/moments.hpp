#pragma once

#include "hmlasso/dataset.hpp"
#include "hmlasso/types.hpp"

namespace hmlasso {

/// Pairwise second-moment statistics of an incomplete dataset.
///
/// s_pair(j,k) averages x_ij * x_ik over the rows where both columns are
/// observed; rho_pair(j) averages x_ij * y_i over the rows where column j is
/// observed; ratio(j,k) = n_jk / n is the joint observation fraction. Pairs
/// with no joint observations get s_pair = 0 and ratio = 0.
struct PairwiseStats {
  Matrix s_pair;
  Vector rho_pair;
  Matrix ratio;
  IntMatrix counts;
  Index n = 0;

  Index dim() const { return s_pair.rows(); }
  /// Smallest joint observation count over all pairs (diagnostic).
  std::int64_t min_pairwise_count() const;
};

/// Requires a centered dataset with at least one observed entry per column.
/// `allow_empty_columns` extends the zero-count convention to the diagonal
/// (s_pair, ratio and rho entries of an unobserved column are all 0) instead
/// of throwing; used for scoring-side statistics where a small row subset may
/// miss a rarely observed column entirely.
PairwiseStats pairwise_moments(const IncompleteDataset& ds, bool allow_empty_columns = false);

/// Covariance of the zero-filled data: ratio .* s_pair, which equals
/// (1/n) Z^T Z and is therefore PSD up to rounding.
Matrix mean_imputed_covariance(const PairwiseStats& stats);

/// Elementwise observation-ratio weights W = ratio^alpha, with 0^0 = 1.
/// alpha = 0 gives the unweighted (all-ones) matrix; alpha = 1 gives ratio.
Matrix weight_matrix(const PairwiseStats& stats, double alpha);

}  // namespace hmlasso
