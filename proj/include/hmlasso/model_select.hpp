#pragma once

#include "hmlasso/dataset.hpp"
#include "hmlasso/lasso_cd.hpp"
#include "hmlasso/moments.hpp"
#include "hmlasso/psd_approx.hpp"
#include "hmlasso/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hmlasso {

enum class PipelineKind {
  /// Pairwise moments -> observation-ratio weights -> ADMM PSD repair.
  Hmlasso,
  /// Zero-filled (mean-imputed) Gram matrix; PSD by construction, no repair.
  MeanImpute,
};

struct PipelineConfig {
  PipelineKind kind = PipelineKind::Hmlasso;
  double alpha = 1.0;
  PsdNorm norm = PsdNorm::WeightedFrobenius;
  std::optional<double> mu;
  int admm_max_iters = 10000;
  double admm_tol = 1e-7;
};

/// Covariance-form inputs for the Lasso, plus repair diagnostics.
struct CovStats {
  Matrix sigma;
  Vector rho;
  PairwiseStats stats;
  PsdApproxResult psd;  // trivial (0 iterations, converged) for MeanImpute
};

/// Runs the moment/repair pipeline on a centered dataset. Empty columns are
/// tolerated (zero-count convention) only when `allow_empty_columns` is set;
/// fitting-side statistics must reject them.
CovStats build_cov_stats(const IncompleteDataset& ds, const PipelineConfig& config,
                         bool allow_empty_columns = false);

struct CvSpec {
  int k_folds = 5;
  Vector grid;  // empty: derived from the full-data rho via n_lambda / lambda_min_ratio
  int n_lambda = 50;
  double lambda_min_ratio = 0.01;
  std::uint64_t seed = 0;
  PipelineConfig pipeline;
  CdControls cd;
  /// Rescales each fold's lambdas by sqrt(n_train / n) before fitting.
  bool calibrate = false;
  /// Picks the largest lambda within one standard error of the minimum.
  bool one_se_rule = false;
};

struct CvResult {
  Vector lambdas;
  Vector mean_error;
  Vector std_error;
  Matrix fold_errors;  // k_folds x n_lambda
  int selected_index = 0;
  double selected_lambda = 0.0;
  LassoFit fit;        // refit on all rows at the selected lambda
  CovStats full_stats;
  int fold_attempts = 1;
};

/// Deterministic fold assignment: a function of (seed, n, k, attempt) only.
/// Returns k nonempty row-index lists partitioning 0..n-1.
std::vector<std::vector<int>> assign_folds(std::uint64_t seed, int n, int k, int attempt = 0);

/// K-fold cross-validation with the covariance-form validation error
///   b' Sigma_val b - 2 rho_val' b + ||y_val||^2 / n_val,
/// where Sigma_val / rho_val come from the validation rows run through the
/// same pipeline (own PSD repair). Ties in the mean error prefer larger
/// lambda. Fold assignments that leave a column unobserved in some fold are
/// re-randomized up to 10 times before failing.
///
/// `fixed_folds`, when given, bypasses the seeded assignment (it must be a
/// partition of the rows into k_folds nonempty groups).
CvResult cross_validate(const IncompleteDataset& ds, const CvSpec& spec,
                        const std::vector<std::vector<int>>* fixed_folds = nullptr);

}  // namespace hmlasso
