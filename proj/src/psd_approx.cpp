#include "hmlasso/psd_approx.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace hmlasso {

namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

void check_symmetric(const Matrix& m, const char* what) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale)
    throw ValidationError(std::string(what) + " is not symmetric (max asymmetry " +
                          std::to_string(asym) + ")");
}

}  // namespace

PsdApproxProblem::PsdApproxProblem(Matrix target_in, Matrix weights_in, PsdNorm norm_in,
                                   std::optional<double> mu_in, int max_iters_in, double tol_in)
    : target(std::move(target_in)),
      weights(std::move(weights_in)),
      norm(norm_in),
      mu(mu_in.value_or(norm_in == PsdNorm::WeightedFrobenius ? 10.0 : 1.0)),
      max_iters(max_iters_in),
      tol(tol_in) {
  if (target.rows() != target.cols()) throw ValidationError("target must be square");
  if (weights.rows() != target.rows() || weights.cols() != target.cols())
    throw ValidationError("weights dimensions must match the target");
  if (!target.allFinite() || !weights.allFinite())
    throw ValidationError("target/weights contain non-finite entries");
  if (weights.minCoeff() < 0.0) throw ValidationError("weights must be nonnegative");
  if (!(mu > 0.0)) throw ValidationError("mu must be positive");
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  if (max_iters < 1) throw ValidationError("max_iters must be positive");
  check_symmetric(target, "target");
  check_symmetric(weights, "weights");
  target = symmetrized(target);
  weights = symmetrized(weights);
}

Matrix project_psd(const Matrix& m) {
  if (m.rows() != m.cols()) throw ValidationError("project_psd needs a square matrix");
  if (!m.allFinite()) throw NumericError("project_psd: non-finite input");
  const Matrix sym = symmetrized(m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  const Vector clipped = es.eigenvalues().cwiseMax(0.0);
  Matrix out = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
  return symmetrized(out);
}

double weighted_objective(const Matrix& sigma, const Matrix& target, const Matrix& weights,
                          PsdNorm norm) {
  const Matrix weighted = weights.cwiseProduct(sigma - target);
  if (norm == PsdNorm::WeightedFrobenius) return 0.5 * weighted.squaredNorm();
  return 0.5 * weighted.cwiseAbs().maxCoeff();
}

Matrix max_norm_bstep(const Matrix& c, const Matrix& weights, double mu) {
  if (c.rows() != weights.rows() || c.cols() != weights.cols())
    throw ValidationError("max_norm_bstep: dimension mismatch");
  if (!(mu > 0.0)) throw ValidationError("max_norm_bstep: mu must be positive");
  if (weights.minCoeff() < 0.0) throw ValidationError("max_norm_bstep: negative weight");

  struct Entry {
    double c;
    double w;
    Index row, col;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(c.size()));
  for (Index j = 0; j < c.cols(); ++j)
    for (Index i = 0; i < c.rows(); ++i)
      if (weights(i, j) > 0.0) entries.push_back({c(i, j), weights(i, j), i, j});

  Matrix b = c;  // zero-weight entries pass through unchanged
  if (entries.empty()) return b;

  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b2) {
    return a.w * std::abs(a.c) > b2.w * std::abs(b2.c);
  });

  // Largest prefix whose clip level stays below the smallest scaled magnitude
  // in the prefix.
  double sum_abs = 0.0, sum_inv_w = 0.0;
  double best_d = 0.0;
  for (const Entry& e : entries) {
    sum_abs += std::abs(e.c);
    sum_inv_w += 1.0 / e.w;
    const double d = (sum_abs - 0.5 * mu) / sum_inv_w;
    if (e.w * std::abs(e.c) - d > 0.0) best_d = d;
  }
  // A negative level means even the largest entry shrinks to zero.
  best_d = std::max(best_d, 0.0);

  for (const Entry& e : entries) {
    if (std::abs(e.c) * e.w > best_d) {
      const double sgn = e.c > 0.0 ? 1.0 : (e.c < 0.0 ? -1.0 : 0.0);
      b(e.row, e.col) = best_d * sgn / e.w;
    }
  }
  return b;
}

PsdApproxResult admm_solve(const PsdApproxProblem& prob, std::vector<AdmmTraceEntry>* trace) {
  const Matrix& target = prob.target;
  const Matrix& weights = prob.weights;
  const double mu = prob.mu;
  const double p = static_cast<double>(target.rows());

  Matrix frob_denominator;
  if (prob.norm == PsdNorm::WeightedFrobenius)
    frob_denominator = (mu * weights.cwiseProduct(weights)).array() + 1.0;

  PsdApproxResult result;
  Matrix a = project_psd(target);
  Matrix b = a - target;
  Matrix lambda = Matrix::Zero(target.rows(), target.cols());

  int iter = 0;
  bool converged = false;
  double primal = 0.0, dual = 0.0;
  while (iter < prob.max_iters) {
    ++iter;
    a = project_psd(b + target + mu * lambda);
    const Matrix c = a - target - mu * lambda;
    Matrix b_next = prob.norm == PsdNorm::WeightedFrobenius
                        ? c.cwiseQuotient(frob_denominator)
                        : max_norm_bstep(c, weights, mu);
    const Matrix gap = a - b_next - target;
    lambda -= gap / mu;

    primal = gap.norm() / p;
    dual = (b_next - b).norm() / p;
    b = std::move(b_next);

    if (!a.allFinite() || !b.allFinite() || !lambda.allFinite())
      throw NumericError("ADMM produced a non-finite iterate at iteration " +
                         std::to_string(iter));
    if (trace)
      trace->push_back({iter, primal, dual, weighted_objective(a, target, weights, prob.norm)});
    if (primal < prob.tol && dual < prob.tol) {
      converged = true;
      break;
    }
  }

  result.sigma_tilde = a;
  result.iterations = iter;
  result.primal_residual = primal;
  result.dual_residual = dual;
  result.converged = converged;
  result.a = std::move(a);
  result.b = std::move(b);
  result.lambda = std::move(lambda);
  return result;
}

}  // namespace hmlasso
