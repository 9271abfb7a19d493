#include "hmlasso/lasso_cd.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hmlasso {

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

namespace {

double kkt_from_gradient(const Vector& g, const Vector& beta, double lambda) {
  double worst = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    double v;
    if (beta(j) != 0.0) {
      v = std::abs(g(j) + lambda * (beta(j) > 0.0 ? 1.0 : -1.0));
    } else {
      v = std::max(std::abs(g(j)) - lambda, 0.0);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

double kkt_violation(const Matrix& sigma, const Vector& rho, const Vector& beta, double lambda) {
  return kkt_from_gradient(sigma * beta - rho, beta, lambda);
}

namespace {

void validate_problem(const CovLassoProblem& prob) {
  const Index p = prob.sigma.rows();
  if (prob.sigma.cols() != p) throw ValidationError("sigma must be square");
  if (prob.rho.size() != p) throw ValidationError("rho length must match sigma");
  if (!(prob.lambda > 0.0)) throw ValidationError("lambda must be positive");
  if (!(prob.tol > 0.0) || prob.max_sweeps < 1 || !(prob.kkt_tol > 0.0))
    throw ValidationError("invalid convergence controls");
  for (Index j = 0; j < p; ++j)
    if (!(prob.sigma(j, j) > 0.0))
      throw ValidationError("sigma diagonal entry " + std::to_string(j + 1) +
                            " is not strictly positive");
}

// Lower bound -||rho||^2 / (2 lambda_min) on the smooth part, valid only for
// strictly positive spectra. A singular or indefinite sigma admits descent
// along its null space, so no finite floor applies and divergence is caught
// by the non-finite check instead.
double objective_floor_for(const Matrix& sigma, const Vector& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig <= 0.0) return -std::numeric_limits<double>::infinity();
  return -rho.squaredNorm() / (2.0 * min_eig) - 1.0;
}

double objective(const Matrix& sigma, const Vector& rho, const Vector& beta, double lambda) {
  return 0.5 * beta.dot(sigma * beta) - rho.dot(beta) + lambda * beta.lpNorm<1>();
}

struct CdOutcome {
  int sweeps = 0;
  bool converged = false;
  double kkt = 0.0;
};

// Cyclic coordinate descent over the coordinates flagged in `in_scope`,
// maintaining the full gradient g = sigma*beta - rho. `g` must be consistent
// with `beta` on entry and is kept consistent on exit.
CdOutcome cd_loop(const CovLassoProblem& prob, const std::vector<char>& in_scope, Vector& beta,
                  Vector& g, std::vector<double>* objective_trace) {
  const Index p = beta.size();
  const double floor =
      prob.objective_floor ? *prob.objective_floor : objective_floor_for(prob.sigma, prob.rho);

  CdOutcome out;
  while (out.sweeps < prob.max_sweeps) {
    ++out.sweeps;
    double max_change = 0.0;
    for (Index j = 0; j < p; ++j) {
      if (!in_scope[static_cast<std::size_t>(j)]) continue;
      const double diag = prob.sigma(j, j);
      const double z = diag * beta(j) - g(j);
      const double updated = soft_threshold(z, prob.lambda) / diag;
      const double delta = updated - beta(j);
      if (delta != 0.0) {
        g += prob.sigma.col(j) * delta;
        beta(j) = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }

    if (objective_trace)
      objective_trace->push_back(objective(prob.sigma, prob.rho, beta, prob.lambda));

    // Cheap objective from the running gradient: b'Sb = b'(g + rho).
    const double obj =
        0.5 * beta.dot(g) - 0.5 * prob.rho.dot(beta) + prob.lambda * beta.lpNorm<1>();
    if (!std::isfinite(obj) || obj < floor)
      throw NumericError("coordinate descent diverged (objective " + std::to_string(obj) + ")");

    if (max_change < prob.tol) {
      // Refresh the gradient before certifying stationarity; incremental
      // updates drift over long runs.
      g = prob.sigma * beta - prob.rho;
      out.kkt = kkt_from_gradient(g, beta, prob.lambda);
      if (out.kkt < prob.kkt_tol) {
        out.converged = true;
        return out;
      }
    }
  }
  g = prob.sigma * beta - prob.rho;
  out.kkt = kkt_from_gradient(g, beta, prob.lambda);
  out.converged = false;
  return out;
}

}  // namespace

LassoFit cd_solve(const CovLassoProblem& prob, const Vector* warm_start,
                  std::vector<double>* objective_trace) {
  validate_problem(prob);
  const Index p = prob.sigma.rows();
  Vector beta = warm_start ? *warm_start : Vector::Zero(p);
  if (beta.size() != p) throw ValidationError("warm start length must match sigma");

  Vector g = prob.sigma * beta - prob.rho;
  std::vector<char> all(static_cast<std::size_t>(p), 1);
  const CdOutcome out = cd_loop(prob, all, beta, g, objective_trace);

  LassoFit fit;
  fit.beta = std::move(beta);
  fit.lambda = prob.lambda;
  fit.kkt_violation = out.kkt;
  fit.sweeps = out.sweeps;
  fit.converged = out.converged;
  for (Index j = 0; j < p; ++j)
    if (fit.beta(j) != 0.0) fit.active_set.push_back(static_cast<int>(j));
  return fit;
}

Vector lambda_grid(const Vector& rho, int n_lambda, double ratio) {
  if (n_lambda < 2) throw ValidationError("n_lambda must be at least 2");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("ratio must lie in (0, 1)");
  const double lambda_max = rho.cwiseAbs().maxCoeff();
  if (lambda_max == 0.0) throw ValidationError("rho is identically zero");
  Vector grid(n_lambda);
  const double log_max = std::log(lambda_max);
  const double log_min = std::log(lambda_max * ratio);
  for (int i = 0; i < n_lambda; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n_lambda - 1);
    grid(i) = std::exp(log_max + t * (log_min - log_max));
  }
  grid(0) = lambda_max;  // exact endpoints
  grid(n_lambda - 1) = lambda_max * ratio;
  return grid;
}

LassoPath path_solve(const Matrix& sigma, const Vector& rho, const Vector& grid,
                     const CdControls& controls) {
  if (grid.size() < 1) throw ValidationError("empty lambda grid");
  for (Index i = 1; i < grid.size(); ++i)
    if (!(grid(i) < grid(i - 1))) throw ValidationError("lambda grid must be strictly decreasing");

  LassoPath path;
  path.fits.reserve(static_cast<std::size_t>(grid.size()));

  CovLassoProblem prob;
  prob.sigma = sigma;
  prob.rho = rho;
  prob.tol = controls.tol;
  prob.max_sweeps = controls.max_sweeps;
  prob.kkt_tol = controls.kkt_tol;
  prob.objective_floor = objective_floor_for(sigma, rho);

  const Index p = sigma.rows();
  // Reinstate screened-out coordinates whose stationarity violation exceeds
  // this; far below kkt_tol so screening cannot alter reported solutions.
  const double reinstate_tol = std::min(1e-9, controls.kkt_tol / 100.0);

  Vector beta = Vector::Zero(p);
  for (Index t = 0; t < grid.size(); ++t) {
    prob.lambda = grid(t);
    validate_problem(prob);

    std::vector<char> in_scope(static_cast<std::size_t>(p), 0);
    if (t == 0) {
      std::fill(in_scope.begin(), in_scope.end(), 1);
    } else {
      // Sequential strong-rule screen at the previous solution.
      const double threshold = 2.0 * grid(t) - grid(t - 1);
      const Vector g_prev = sigma * beta - rho;
      for (Index j = 0; j < p; ++j)
        if (beta(j) != 0.0 || std::abs(g_prev(j)) >= threshold)
          in_scope[static_cast<std::size_t>(j)] = 1;
    }

    Vector g = sigma * beta - rho;
    CdOutcome out;
    while (true) {
      out = cd_loop(prob, in_scope, beta, g, nullptr);
      bool reinstated = false;
      for (Index j = 0; j < p; ++j) {
        if (in_scope[static_cast<std::size_t>(j)]) continue;
        if (std::abs(g(j)) - prob.lambda > reinstate_tol) {
          in_scope[static_cast<std::size_t>(j)] = 1;
          reinstated = true;
        }
      }
      if (!reinstated) break;
    }

    LassoFit fit;
    fit.beta = beta;
    fit.lambda = prob.lambda;
    fit.kkt_violation = kkt_violation(sigma, rho, beta, prob.lambda);
    fit.sweeps = out.sweeps;
    fit.converged = out.converged;
    for (Index j = 0; j < p; ++j)
      if (beta(j) != 0.0) fit.active_set.push_back(static_cast<int>(j));
    path.fits.push_back(std::move(fit));
  }
  return path;
}

}  // namespace hmlasso
