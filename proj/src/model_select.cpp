#include "hmlasso/model_select.hpp"

#include "hmlasso/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hmlasso {

CovStats build_cov_stats(const IncompleteDataset& ds, const PipelineConfig& config,
                         bool allow_empty_columns) {
  CovStats out;
  out.stats = pairwise_moments(ds, allow_empty_columns);
  if (config.kind == PipelineKind::MeanImpute) {
    out.sigma = mean_imputed_covariance(out.stats);
    // rho of the zero-filled data: (1/n) Z'y = (n_jj/n) * rho_pair_j.
    out.rho = out.stats.rho_pair.cwiseProduct(out.stats.ratio.diagonal());
    out.psd.sigma_tilde = out.sigma;
    out.psd.converged = true;
    out.psd.iterations = 0;
    return out;
  }
  const Matrix weights = weight_matrix(out.stats, config.alpha);
  PsdApproxProblem prob(out.stats.s_pair, weights, config.norm, config.mu, config.admm_max_iters,
                        config.admm_tol);
  out.psd = admm_solve(prob);
  out.sigma = out.psd.sigma_tilde;
  out.rho = out.stats.rho_pair;
  return out;
}

std::vector<std::vector<int>> assign_folds(std::uint64_t seed, int n, int k, int attempt) {
  if (k < 2) throw ValidationError("need at least 2 folds");
  if (n < k) throw ValidationError("fewer rows than folds");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(derive_seed(seed, static_cast<std::uint64_t>(n) * 131 + k),
                      static_cast<std::uint64_t>(attempt)));
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
  for (int i = 0; i < n; ++i) folds[static_cast<std::size_t>(i % k)].push_back(order[i]);
  return folds;
}

namespace {

// Every training split must keep at least two observations per column: one
// is not enough because a single centered value is exactly zero, leaving a
// degenerate diagonal for coordinate descent. Validation folds may miss a
// column entirely; scoring falls back to the zero-count convention there.
bool folds_valid(const IncompleteDataset& ds, const std::vector<std::vector<int>>& folds) {
  const Index p = ds.cols();
  const int n = static_cast<int>(ds.rows());
  std::vector<int> fold_of(static_cast<std::size_t>(n), -1);
  for (std::size_t f = 0; f < folds.size(); ++f)
    for (int r : folds[f]) fold_of[static_cast<std::size_t>(r)] = static_cast<int>(f);

  for (Index j = 0; j < p; ++j) {
    std::vector<int> obs_in_fold(folds.size(), 0);
    int total = 0;
    for (int i = 0; i < n; ++i) {
      if (ds.mask(i, j) != 1.0) continue;
      ++obs_in_fold[static_cast<std::size_t>(fold_of[static_cast<std::size_t>(i)])];
      ++total;
    }
    for (std::size_t f = 0; f < folds.size(); ++f)
      if (total - obs_in_fold[f] < 2) return false;
  }
  return true;
}

std::vector<int> complement_rows(int n, const std::vector<int>& fold) {
  std::vector<char> in_fold(static_cast<std::size_t>(n), 0);
  for (int r : fold) in_fold[static_cast<std::size_t>(r)] = 1;
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n) - fold.size());
  for (int i = 0; i < n; ++i)
    if (!in_fold[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

}  // namespace

CvResult cross_validate(const IncompleteDataset& input, const CvSpec& spec,
                        const std::vector<std::vector<int>>* fixed_folds) {
  if (spec.k_folds < 2) throw ValidationError("k_folds must be at least 2");
  const IncompleteDataset ds = input.centered ? input : center(input);
  const int n = static_cast<int>(ds.rows());
  if (n < spec.k_folds) throw ValidationError("fewer rows than folds");

  CvResult result;
  result.full_stats = build_cov_stats(ds, spec.pipeline);
  result.lambdas = spec.grid.size() > 0
                       ? spec.grid
                       : lambda_grid(result.full_stats.rho, spec.n_lambda, spec.lambda_min_ratio);
  const Index n_lambda = result.lambdas.size();
  for (Index i = 1; i < n_lambda; ++i)
    if (!(result.lambdas(i) < result.lambdas(i - 1)))
      throw ValidationError("lambda grid must be strictly decreasing");

  std::vector<std::vector<int>> folds;
  if (fixed_folds) {
    if (static_cast<int>(fixed_folds->size()) != spec.k_folds)
      throw ValidationError("fixed fold count does not match k_folds");
    std::size_t covered = 0;
    for (const auto& f : *fixed_folds) {
      if (f.empty()) throw ValidationError("fixed folds must be nonempty");
      covered += f.size();
    }
    if (covered != static_cast<std::size_t>(n))
      throw ValidationError("fixed folds must partition the rows");
    folds = *fixed_folds;
    if (!folds_valid(ds, folds))
      throw ValidationError("fixed folds leave some column unobserved in a fold");
    result.fold_attempts = 1;
  } else {
    int attempt = 0;
    for (; attempt < 10; ++attempt) {
      folds = assign_folds(spec.seed, n, spec.k_folds, attempt);
      if (folds_valid(ds, folds)) break;
    }
    if (attempt == 10)
      throw ValidationError(
          "could not build folds: some column is unobserved in a training or validation fold "
          "after 10 re-randomizations");
    result.fold_attempts = attempt + 1;
  }

  result.fold_errors.resize(spec.k_folds, n_lambda);
  for (int f = 0; f < spec.k_folds; ++f) {
    const auto& val_rows = folds[static_cast<std::size_t>(f)];
    const std::vector<int> train_rows = complement_rows(n, val_rows);

    const IncompleteDataset train_ds = subset_rows(ds, train_rows);
    const IncompleteDataset val_ds = subset_rows(ds, val_rows);
    const CovStats train_stats = build_cov_stats(train_ds, spec.pipeline);
    const CovStats val_stats =
        build_cov_stats(val_ds, spec.pipeline, /*allow_empty_columns=*/true);

    Vector fold_grid = result.lambdas;
    if (spec.calibrate) {
      fold_grid *= std::sqrt(static_cast<double>(train_rows.size()) / static_cast<double>(n));
    }
    const LassoPath path = path_solve(train_stats.sigma, train_stats.rho, fold_grid, spec.cd);

    const double y_term = val_ds.response.squaredNorm() / static_cast<double>(val_rows.size());
    for (Index i = 0; i < n_lambda; ++i) {
      const Vector& b = path.fits[static_cast<std::size_t>(i)].beta;
      result.fold_errors(f, i) =
          b.dot(val_stats.sigma * b) - 2.0 * val_stats.rho.dot(b) + y_term;
    }
  }

  result.mean_error = result.fold_errors.colwise().mean();
  result.std_error.resize(n_lambda);
  const double k = static_cast<double>(spec.k_folds);
  for (Index i = 0; i < n_lambda; ++i) {
    const double m = result.mean_error(i);
    double ss = 0.0;
    for (int f = 0; f < spec.k_folds; ++f) {
      const double d = result.fold_errors(f, i) - m;
      ss += d * d;
    }
    result.std_error(i) = spec.k_folds > 1 ? std::sqrt(ss / (k - 1.0) / k) : 0.0;
  }

  // Grid is decreasing, so the first minimizer is the largest lambda.
  Index best = 0;
  for (Index i = 1; i < n_lambda; ++i)
    if (result.mean_error(i) < result.mean_error(best)) best = i;
  if (spec.one_se_rule) {
    const double cutoff = result.mean_error(best) + result.std_error(best);
    for (Index i = 0; i <= best; ++i)
      if (result.mean_error(i) <= cutoff) {
        best = i;
        break;
      }
  }
  result.selected_index = static_cast<int>(best);
  result.selected_lambda = result.lambdas(best);

  const LassoPath full_path =
      path_solve(result.full_stats.sigma, result.full_stats.rho, result.lambdas, spec.cd);
  result.fit = full_path.fits[static_cast<std::size_t>(best)];
  result.fit.intercept = intercept_for(result.fit.beta, ds);
  return result;
}

}  // namespace hmlasso
