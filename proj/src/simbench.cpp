#include "hmlasso/simbench.hpp"

#include "hmlasso/rng.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace hmlasso {

Matrix make_covariance(const CovSpec& spec, int p) {
  if (p < 1) throw ValidationError("p must be positive");
  if (!(spec.r >= 0.0 && spec.r < 1.0)) throw ValidationError("covariance level r must be in [0, 1)");
  Matrix sigma = Matrix::Identity(p, p);
  switch (spec.pattern) {
    case CovPattern::Uniform:
      for (Index j = 0; j < p; ++j)
        for (Index k = 0; k < p; ++k)
          if (j != k) sigma(j, k) = spec.r;
      break;
    case CovPattern::Autoregressive:
      for (Index j = 0; j < p; ++j)
        for (Index k = 0; k < p; ++k)
          sigma(j, k) = std::pow(spec.r, std::abs(static_cast<double>(j - k)));
      break;
    case CovPattern::Block: {
      if (spec.block_size < 1 || p % spec.block_size != 0)
        throw ValidationError("block_size must divide p");
      for (Index j = 0; j < p; ++j)
        for (Index k = 0; k < p; ++k)
          if (j != k && j / spec.block_size == k / spec.block_size) sigma(j, k) = spec.r;
      break;
    }
  }
  return sigma;
}

Vector make_beta(BetaPattern pattern, int p) {
  Vector beta = Vector::Zero(p);
  for (int k = 0; k < 10; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    int j = 0;
    double value = 0.0;
    switch (pattern) {
      case BetaPattern::Spread:
        j = 10 * k;
        value = sign * static_cast<double>(10 - k);
        break;
      case BetaPattern::Head:
        j = k;
        value = sign * static_cast<double>(10 - k);
        break;
      case BetaPattern::Flat:
        j = 10 * k;
        value = sign * 5.0;
        break;
    }
    if (j < p) beta(j) = value;
  }
  return beta;
}

namespace {

void validate_spec(const SimulationSpec& spec) {
  if (spec.n < 2 || spec.p < 1) throw ValidationError("invalid problem size");
  if (!(spec.noise_var >= 0.0)) throw ValidationError("noise_var must be nonnegative");
  if (!(spec.miss.mu >= 0.0 && spec.miss.mu < 1.0))
    throw ValidationError("missing rate mu must be in [0, 1)");
  if (spec.miss.pattern == MissingPattern::RowColumn) {
    const double mu = spec.miss.mu;
    if (std::abs(mu - 0.1) > 1e-12 && std::abs(mu - 0.5) > 1e-12 && std::abs(mu - 0.9) > 1e-12)
      throw ValidationError("RowColumn missing pattern supports mu in {0.1, 0.5, 0.9} only");
  }
}

Matrix sample_gaussian(Rng& rng, int n, int p, const Matrix& chol_lower) {
  Matrix z(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) z(i, j) = rng.normal();
  return z * chol_lower.transpose();
}

Matrix draw_mask(Rng& rng, int n, int p, const MissSpec& miss) {
  Matrix mask(n, p);
  switch (miss.pattern) {
    case MissingPattern::Random: {
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) mask(i, j) = rng.bernoulli(miss.mu) ? 0.0 : 1.0;
      break;
    }
    case MissingPattern::Column: {
      // Per-column rates drawn so the overall rate averages to mu:
      // U(0, 2mu) for mu <= 1/2, U(2mu - 1, 1) above.
      const double lo = miss.mu <= 0.5 ? 0.0 : 2.0 * miss.mu - 1.0;
      const double hi = miss.mu <= 0.5 ? 2.0 * miss.mu : 1.0;
      for (Index j = 0; j < p; ++j) {
        const double rate = rng.uniform(lo, hi);
        for (Index i = 0; i < n; ++i) mask(i, j) = rng.bernoulli(rate) ? 0.0 : 1.0;
      }
      break;
    }
    case MissingPattern::RowColumn: {
      double lo, hi;
      bool complement_form = false;  // mu_ij = 1 - (1 - mu_i)(1 - mu_j)
      if (std::abs(miss.mu - 0.1) <= 1e-12) {
        lo = 0.0;
        hi = 0.632;
      } else if (std::abs(miss.mu - 0.5) <= 1e-12) {
        lo = 0.414;
        hi = 1.0;
      } else {
        lo = 0.368;
        hi = 1.0;
        complement_form = true;
      }
      Vector row_rate(n), col_rate(p);
      for (Index i = 0; i < n; ++i) row_rate(i) = rng.uniform(lo, hi);
      for (Index j = 0; j < p; ++j) col_rate(j) = rng.uniform(lo, hi);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) {
          const double rate = complement_form
                                  ? 1.0 - (1.0 - row_rate(i)) * (1.0 - col_rate(j))
                                  : row_rate(i) * col_rate(j);
          mask(i, j) = rng.bernoulli(rate) ? 0.0 : 1.0;
        }
      break;
    }
  }
  return mask;
}

// Four observations per column: enough that cross-validation can spread them
// so every training split keeps two or more.
bool mask_usable(const Matrix& mask) {
  const double floor =
      std::min(4.0, static_cast<double>(mask.rows()));
  for (Index j = 0; j < mask.cols(); ++j)
    if (mask.col(j).sum() < floor) return false;
  return true;
}

}  // namespace

TrialData generate_trial(const SimulationSpec& spec) {
  validate_spec(spec);
  const Matrix sigma_star = make_covariance(spec.cov, spec.p);
  Eigen::LLT<Matrix> llt(sigma_star);
  if (llt.info() != Eigen::Success)
    throw NumericError("covariance factorization failed for the requested pattern");
  const Matrix chol_lower = llt.matrixL();

  const Vector beta = make_beta(spec.beta, spec.p);
  const double noise_sd = std::sqrt(spec.noise_var);
  Rng rng(derive_seed(spec.seed, 0x7261771ULL));

  TrialData trial;
  trial.beta_true = beta;

  // Redraw the whole training draw if some column ends up too sparse for the
  // pipeline (see mask_usable).
  constexpr int kMaxRedraws = 64;
  Matrix x, mask;
  Vector y;
  int redraws = 0;
  for (;; ++redraws) {
    if (redraws > kMaxRedraws)
      throw NumericError("could not draw a mask with enough observations per column");
    x = sample_gaussian(rng, spec.n, spec.p, chol_lower);
    y = x * beta;
    for (Index i = 0; i < spec.n; ++i) y(i) += noise_sd * rng.normal();
    mask = draw_mask(rng, spec.n, spec.p, spec.miss);
    if (mask_usable(mask)) break;
  }
  trial.mask_redraws = redraws;
  trial.train = make_dataset(std::move(x), std::move(mask), std::move(y));

  const int test_n = spec.test_n > 0 ? spec.test_n : spec.n;
  trial.test_x = sample_gaussian(rng, test_n, spec.p, chol_lower);
  trial.test_y = trial.test_x * beta;
  for (Index i = 0; i < test_n; ++i) trial.test_y(i) += noise_sd * rng.normal();
  return trial;
}

MethodSpec parse_method(const std::string& text) {
  auto field = [&text](std::size_t index) -> std::string {
    std::size_t start = 0;
    for (std::size_t i = 0; i < index; ++i) {
      start = text.find(':', start);
      if (start == std::string::npos) return "";
      ++start;
    }
    const std::size_t end = text.find(':', start);
    return text.substr(start, end == std::string::npos ? std::string::npos : end - start);
  };

  MethodSpec method;
  method.id = text;
  const std::string name = field(0);
  if (name == "mean_impute") {
    method.pipeline.kind = PipelineKind::MeanImpute;
    return method;
  }
  if (name == "cocolasso") {
    method.pipeline.kind = PipelineKind::Hmlasso;
    method.pipeline.alpha = 0.0;
    method.pipeline.norm = PsdNorm::WeightedMax;
    return method;
  }
  if (name != "hmlasso") throw ValidationError("unknown method: " + text);

  method.pipeline.kind = PipelineKind::Hmlasso;
  method.pipeline.alpha = 1.0;
  method.pipeline.norm = PsdNorm::WeightedFrobenius;
  const std::string alpha = field(1);
  if (!alpha.empty()) {
    try {
      method.pipeline.alpha = std::stod(alpha);
    } catch (const std::exception&) {
      throw ValidationError("bad alpha in method: " + text);
    }
    if (method.pipeline.alpha < 0.0) throw ValidationError("bad alpha in method: " + text);
  }
  const std::string norm = field(2);
  if (!norm.empty()) {
    if (norm == "frobenius")
      method.pipeline.norm = PsdNorm::WeightedFrobenius;
    else if (norm == "max")
      method.pipeline.norm = PsdNorm::WeightedMax;
    else
      throw ValidationError("bad norm in method: " + text);
  }
  return method;
}

TrialResult run_method(const MethodSpec& method, const TrialData& trial, const CvRunConfig& cv) {
  TrialResult result;
  result.method = method.id;
  const auto start = std::chrono::steady_clock::now();
  try {
    const IncompleteDataset ds = center(trial.train);

    CvSpec spec;
    spec.k_folds = cv.k_folds;
    spec.n_lambda = cv.n_lambda;
    spec.lambda_min_ratio = cv.lambda_min_ratio;
    spec.cd = cv.cd;
    spec.pipeline = method.pipeline;
    // Folds depend only on the trial data stream, not the method.
    spec.seed = derive_seed(0xf01d5ULL, static_cast<std::uint64_t>(trial.train.rows()));

    const CvResult cvres = cross_validate(ds, spec);
    result.selected_lambda = cvres.selected_lambda;

    const Vector beta_hat = raw_scale_coefficients(cvres.fit.beta, ds);
    result.l2_error = (beta_hat - trial.beta_true).norm();

    const Vector pred =
        (trial.test_x * beta_hat).array() + cvres.fit.intercept;
    result.rmse = std::sqrt((pred - trial.test_y).squaredNorm() /
                            static_cast<double>(trial.test_y.size()));
    if (!std::isfinite(result.l2_error) || !std::isfinite(result.rmse))
      throw NumericError("non-finite trial metric");
    result.ok = true;
  } catch (const std::exception& e) {
    result.ok = false;
    result.error = e.what();
  }
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ExperimentResult run_experiment(const std::vector<SimulationSpec>& conditions,
                                const std::vector<MethodSpec>& methods, int replicates,
                                std::uint64_t master_seed, const CvRunConfig& cv, int threads) {
  if (replicates < 1) throw ValidationError("replicates must be at least 1");
  if (conditions.empty() || methods.empty())
    throw ValidationError("need at least one condition and one method");

  const int n_cells = static_cast<int>(conditions.size()) * replicates;
  std::vector<std::vector<TrialResult>> cell_results(static_cast<std::size_t>(n_cells));

  auto run_cell = [&](int cell) {
    const int c = cell / replicates;
    const int r = cell % replicates;
    SimulationSpec spec = conditions[static_cast<std::size_t>(c)];
    spec.seed = master_seed + static_cast<std::uint64_t>(r);
    auto& results = cell_results[static_cast<std::size_t>(cell)];
    try {
      const TrialData trial = generate_trial(spec);
      for (const MethodSpec& m : methods) results.push_back(run_method(m, trial, cv));
    } catch (const std::exception& e) {
      for (const MethodSpec& m : methods) {
        TrialResult failed;
        failed.method = m.id;
        failed.ok = false;
        failed.error = e.what();
        results.push_back(failed);
      }
    }
  };

  const int workers = std::max(1, std::min(threads, n_cells));
  if (workers == 1) {
    for (int cell = 0; cell < n_cells; ++cell) run_cell(cell);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (int cell = next.fetch_add(1); cell < n_cells; cell = next.fetch_add(1)) {
          run_cell(cell);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  ExperimentResult out;
  for (int c = 0; c < static_cast<int>(conditions.size()); ++c)
    for (int r = 0; r < replicates; ++r) {
      const auto& results = cell_results[static_cast<std::size_t>(c * replicates + r)];
      for (const TrialResult& tr : results) out.trials.push_back({c, r, tr});
    }

  for (int c = 0; c < static_cast<int>(conditions.size()); ++c) {
    for (const MethodSpec& m : methods) {
      AggregateRow row;
      row.condition = c;
      row.method = m.id;
      std::vector<double> l2, rmse;
      for (const TrialRecord& rec : out.trials) {
        if (rec.condition != c || rec.result.method != m.id) continue;
        if (!rec.result.ok) {
          ++row.n_failed;
          continue;
        }
        l2.push_back(rec.result.l2_error);
        rmse.push_back(rec.result.rmse);
      }
      row.n_ok = static_cast<int>(l2.size());
      auto mean_se = [](const std::vector<double>& xs, double& mean, double& se) {
        if (xs.empty()) {
          mean = se = 0.0;
          return;
        }
        mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        if (xs.size() < 2) {
          se = 0.0;
          return;
        }
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        se = std::sqrt(ss / static_cast<double>(xs.size() - 1) /
                       static_cast<double>(xs.size()));
      };
      mean_se(l2, row.l2_mean, row.l2_se);
      mean_se(rmse, row.rmse_mean, row.rmse_se);
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace hmlasso
