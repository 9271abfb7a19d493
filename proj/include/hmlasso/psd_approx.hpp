#pragma once

#include "hmlasso/types.hpp"

#include <optional>
#include <vector>

namespace hmlasso {

enum class PsdNorm { WeightedFrobenius, WeightedMax };

/// Weighted nearest-PSD problem: minimize the weighted Frobenius (or max)
/// norm of W .* (Sigma - target) over PSD Sigma.
struct PsdApproxProblem {
  /// Validates and symmetrizes the inputs. `mu` defaults to 10 for the
  /// Frobenius norm and 1 for the max norm when not supplied.
  PsdApproxProblem(Matrix target_in, Matrix weights_in,
                   PsdNorm norm_in = PsdNorm::WeightedFrobenius,
                   std::optional<double> mu_in = std::nullopt, int max_iters_in = 10000,
                   double tol_in = 1e-7);

  Matrix target;
  Matrix weights;
  PsdNorm norm;
  double mu;
  int max_iters;
  double tol;
};

struct AdmmTraceEntry {
  int iteration;
  double primal_residual;
  double dual_residual;
  double objective;
};

struct PsdApproxResult {
  Matrix sigma_tilde;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
  // Final ADMM state, kept for diagnostics.
  Matrix a;
  Matrix b;
  Matrix lambda;
};

/// Nearest PSD matrix in the unweighted Frobenius sense: symmetrize, clamp
/// negative eigenvalues to zero, reconstruct. Idempotent.
Matrix project_psd(const Matrix& m);

/// Objective value: 0.5 * ||W .* (sigma - target)||_F^2, or
/// 0.5 * max |W .* (sigma - target)| for the max norm.
double weighted_objective(const Matrix& sigma, const Matrix& target, const Matrix& weights,
                          PsdNorm norm);

/// Sort-and-clip update for the max-norm B-step. Entries with zero weight are
/// excluded from the sort and passed through unchanged.
Matrix max_norm_bstep(const Matrix& c, const Matrix& weights, double mu);

/// ADMM splitting of the weighted nearest-PSD problem. Alternates a PSD
/// projection (A-step), an elementwise shrink or sort-and-clip (B-step), and a
/// dual update, until both the primal residual ||A - B - target||_F / p and
/// the dual residual ||B_k - B_{k-1}||_F / p drop below tol.
///
/// Non-convergence within max_iters still returns a result (converged=false);
/// a non-finite iterate throws NumericError.
PsdApproxResult admm_solve(const PsdApproxProblem& prob,
                           std::vector<AdmmTraceEntry>* trace = nullptr);

}  // namespace hmlasso
