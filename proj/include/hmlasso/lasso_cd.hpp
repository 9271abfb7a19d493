#pragma once

#include "hmlasso/types.hpp"

#include <optional>
#include <vector>

namespace hmlasso {

/// Covariance-form Lasso: minimize 0.5 b' Sigma b - rho' b + lambda ||b||_1.
struct CovLassoProblem {
  Matrix sigma;
  Vector rho;
  double lambda = 0.0;
  double tol = 1e-7;       // max coefficient change per sweep
  int max_sweeps = 100000;
  double kkt_tol = 1e-6;   // stationarity tolerance required at convergence
  // Divergence alarm: objective values below this indicate an unbounded
  // problem (non-PSD sigma). Computed from sigma's spectrum when unset.
  std::optional<double> objective_floor;
};

struct LassoFit {
  Vector beta;
  double intercept = 0.0;
  double lambda = 0.0;
  std::vector<int> active_set;
  double kkt_violation = 0.0;
  int sweeps = 0;
  bool converged = false;
};

/// Fits over a strictly decreasing lambda grid; fits[i] corresponds to grid[i].
struct LassoPath {
  std::vector<LassoFit> fits;
};

struct CdControls {
  double tol = 1e-7;
  int max_sweeps = 100000;
  double kkt_tol = 1e-6;
};

/// sgn(z) * (|z| - gamma)_+
double soft_threshold(double z, double gamma);

/// Max stationarity violation of beta for the covariance-form objective:
/// inactive coordinates contribute (|g_j| - lambda)_+ and active ones
/// |g_j + lambda sgn(beta_j)|, with g = Sigma beta - rho.
double kkt_violation(const Matrix& sigma, const Vector& rho, const Vector& beta, double lambda);

/// Cyclic coordinate descent with soft thresholding. Stops once the largest
/// coefficient change in a sweep falls below tol and the KKT violation is
/// below kkt_tol; hitting max_sweeps returns converged=false.
/// objective_trace, when given, receives the exact objective after each sweep.
LassoFit cd_solve(const CovLassoProblem& prob, const Vector* warm_start = nullptr,
                  std::vector<double>* objective_trace = nullptr);

/// Logarithmically spaced grid from lambda_max = max_j |rho_j| down to
/// ratio * lambda_max.
Vector lambda_grid(const Vector& rho, int n_lambda, double ratio);

/// Warm-started path over a decreasing grid. Coordinates are filtered by a
/// sequential strong-rule screen, then every fit is verified by a full KKT
/// check with violator reinstatement, so screening never changes solutions.
LassoPath path_solve(const Matrix& sigma, const Vector& rho, const Vector& grid,
                     const CdControls& controls = {});

}  // namespace hmlasso
