#pragma once

#include "hmlasso/dataset.hpp"
#include "hmlasso/model_select.hpp"
#include "hmlasso/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hmlasso {

enum class CovPattern { Uniform, Autoregressive, Block };

struct CovSpec {
  CovPattern pattern = CovPattern::Uniform;
  double r = 0.5;
  int block_size = 10;  // Block only; must divide p
};

enum class MissingPattern { Random, Column, RowColumn };

struct MissSpec {
  MissingPattern pattern = MissingPattern::Random;
  double mu = 0.5;  // overall missing rate; RowColumn supports 0.1 / 0.5 / 0.9 only
};

enum class BetaPattern { Spread, Head, Flat };

struct SimulationSpec {
  int n = 1000;
  int p = 100;
  std::uint64_t seed = 0;
  CovSpec cov;
  MissSpec miss;
  BetaPattern beta = BetaPattern::Spread;
  double noise_var = 1.0;
  int test_n = 0;  // 0: same as n
};

Matrix make_covariance(const CovSpec& spec, int p);

/// True coefficient layouts. Positions past p-1 are dropped.
///   Spread: 10, -9, ..., -1 at columns 1, 11, ..., 91 (1-based)
///   Head:   10, -9, ..., -1 at columns 1..10
///   Flat:   +5/-5 alternating at columns 1, 11, ..., 91
Vector make_beta(BetaPattern pattern, int p);

struct TrialData {
  IncompleteDataset train;  // uncentered; mask applied
  Matrix test_x;            // fully observed
  Vector test_y;
  Vector beta_true;
  int mask_redraws = 0;     // masks redrawn to keep >=2 observed entries per column
};

/// Draws one train/test pair. X rows are N(0, Sigma*) via a Cholesky factor,
/// y = X beta* + noise, and missingness follows the requested pattern. The
/// test set is generated the same way but left fully observed. If the mask
/// leaves a column with fewer than four observed entries (too few for any
/// cross-validation split to keep two per training side), train data are
/// redrawn from the continuing stream (deterministic).
TrialData generate_trial(const SimulationSpec& spec);

struct MethodSpec {
  std::string id;
  PipelineConfig pipeline;
};

/// Named methods: "hmlasso[:alpha[:norm]]" (defaults 1, frobenius),
/// "cocolasso" (= max norm, alpha 0), "mean_impute".
MethodSpec parse_method(const std::string& text);

struct CvRunConfig {
  int k_folds = 5;
  int n_lambda = 30;
  double lambda_min_ratio = 0.01;
  CdControls cd;
};

struct TrialResult {
  std::string method;
  double l2_error = 0.0;
  double rmse = 0.0;
  double selected_lambda = 0.0;
  double wall_time_s = 0.0;
  bool ok = true;
  std::string error;
};

/// Full pipeline for one method on one trial: center, cross-validate, refit,
/// score against the true coefficients and the complete test set.
TrialResult run_method(const MethodSpec& method, const TrialData& trial, const CvRunConfig& cv);

struct TrialRecord {
  int condition = 0;
  int replicate = 0;
  TrialResult result;
};

struct AggregateRow {
  int condition = 0;
  std::string method;
  int n_ok = 0;
  int n_failed = 0;
  double l2_mean = 0.0;
  double l2_se = 0.0;
  double rmse_mean = 0.0;
  double rmse_se = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRecord> trials;   // ordered by (condition, replicate, method)
  std::vector<AggregateRow> rows;    // ordered by (condition, method)
};

/// Runs replicates of every condition x method cell. Replicate r of every
/// condition uses seed master_seed + r (common random numbers across
/// conditions and methods). Failures are recorded per trial and do not stop
/// the experiment. Output is identical for any thread count.
ExperimentResult run_experiment(const std::vector<SimulationSpec>& conditions,
                                const std::vector<MethodSpec>& methods, int replicates,
                                std::uint64_t master_seed, const CvRunConfig& cv,
                                int threads = 1);

}  // namespace hmlasso
