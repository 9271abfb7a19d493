#include "hmlasso/moments.hpp"

#include <cmath>

namespace hmlasso {

std::int64_t PairwiseStats::min_pairwise_count() const {
  std::int64_t m = n;
  for (Index j = 0; j < counts.rows(); ++j)
    for (Index k = 0; k < counts.cols(); ++k) m = std::min(m, counts(j, k));
  return m;
}

PairwiseStats pairwise_moments(const IncompleteDataset& ds, bool allow_empty_columns) {
  if (!ds.centered) throw ValidationError("pairwise moments require a centered dataset");
  const Index n = ds.rows(), p = ds.cols();

  const Matrix z = zero_fill(ds).z;
  // 0/1 mask entries make the Gram products exact joint-observation counts.
  const Matrix count_d = ds.mask.transpose() * ds.mask;
  const Matrix gram = z.transpose() * z;

  PairwiseStats stats;
  stats.n = n;
  stats.s_pair.resize(p, p);
  stats.ratio.resize(p, p);
  stats.counts.resize(p, p);

  for (Index j = 0; j < p; ++j) {
    if (count_d(j, j) < 1.0 && !allow_empty_columns)
      throw ValidationError("fully missing column " + std::to_string(j + 1));
  }

  // Fill the upper triangle and mirror so the matrices are exactly symmetric.
  for (Index j = 0; j < p; ++j) {
    for (Index k = j; k < p; ++k) {
      const double c = count_d(j, k);
      const double s = c > 0.0 ? gram(j, k) / c : 0.0;
      const double r = c > 0.0 ? c / static_cast<double>(n) : 0.0;
      stats.s_pair(j, k) = stats.s_pair(k, j) = s;
      stats.ratio(j, k) = stats.ratio(k, j) = r;
      stats.counts(j, k) = stats.counts(k, j) = static_cast<std::int64_t>(std::llround(c));
    }
  }

  const Vector zty = z.transpose() * ds.response;
  stats.rho_pair.resize(p);
  for (Index j = 0; j < p; ++j)
    stats.rho_pair(j) = count_d(j, j) > 0.0 ? zty(j) / count_d(j, j) : 0.0;

  return stats;
}

Matrix mean_imputed_covariance(const PairwiseStats& stats) {
  return stats.ratio.cwiseProduct(stats.s_pair);
}

Matrix weight_matrix(const PairwiseStats& stats, double alpha) {
  if (!(alpha >= 0.0)) throw ValidationError("weight exponent alpha must be nonnegative");
  if (alpha == 0.0) return Matrix::Ones(stats.ratio.rows(), stats.ratio.cols());
  return stats.ratio.array().pow(alpha).matrix();
}

}  // namespace hmlasso
