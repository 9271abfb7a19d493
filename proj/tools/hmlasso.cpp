// Command-line front end: fit Lasso models on CSV data with missing entries,
// inspect/repair covariance estimates, generate synthetic datasets, and run
// seeded benchmark grids.

#include "hmlasso/csv.hpp"
#include "hmlasso/dataset.hpp"
#include "hmlasso/lasso_cd.hpp"
#include "hmlasso/model_select.hpp"
#include "hmlasso/moments.hpp"
#include "hmlasso/psd_approx.hpp"
#include "hmlasso/simbench.hpp"

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace fs = std::filesystem;
using namespace hmlasso;

namespace {

constexpr std::uint64_t kDefaultFitSeed = 987654321ULL;

struct CommonIo {
  std::string input;
  std::string response_name;
  int response_index = -1;
  std::string delimiter = ",";
  std::string header = "auto";
  std::vector<std::string> missing_tokens;
  std::string out_dir = ".";
};

struct SolverFlags {
  double alpha = 1.0;
  std::string norm = "frobenius";
  double mu = -1.0;  // <= 0: per-norm default
  double tol = 1e-7;
  int admm_max_iters = 10000;
  int max_sweeps = 100000;
};

PsdNorm parse_norm(const std::string& text) {
  if (text == "frobenius") return PsdNorm::WeightedFrobenius;
  if (text == "max") return PsdNorm::WeightedMax;
  throw ValidationError("unknown norm '" + text + "' (expected frobenius or max)");
}

CsvOptions csv_options(const CommonIo& io) {
  CsvOptions opts;
  if (io.delimiter.size() != 1) throw ValidationError("delimiter must be a single character");
  opts.delimiter = io.delimiter[0];
  opts.response_name = io.response_name;
  opts.response_index = io.response_index;
  if (io.header == "auto")
    opts.header = HeaderMode::Auto;
  else if (io.header == "yes")
    opts.header = HeaderMode::Require;
  else if (io.header == "no")
    opts.header = HeaderMode::None;
  else
    throw ValidationError("unknown header mode '" + io.header + "'");
  if (!io.missing_tokens.empty())
    opts.missing_tokens =
        std::unordered_set<std::string>(io.missing_tokens.begin(), io.missing_tokens.end());
  return opts;
}

PipelineConfig pipeline_config(const SolverFlags& flags) {
  PipelineConfig config;
  config.kind = PipelineKind::Hmlasso;
  config.alpha = flags.alpha;
  config.norm = parse_norm(flags.norm);
  if (flags.mu > 0.0) config.mu = flags.mu;
  config.admm_tol = flags.tol;
  config.admm_max_iters = flags.admm_max_iters;
  return config;
}

std::string out_path(const CommonIo& io, const std::string& name) {
  fs::create_directories(io.out_dir);
  return (fs::path(io.out_dir) / name).string();
}

std::string column_label(const IncompleteDataset& ds, Index j) {
  return ds.column_names.empty() ? "x" + std::to_string(j + 1)
                                 : ds.column_names[static_cast<std::size_t>(j)];
}

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void write_trace_csv(const std::string& path, const std::vector<AdmmTraceEntry>& trace) {
  CsvTable table({"iteration", "primal_residual", "dual_residual", "objective"});
  for (const auto& entry : trace)
    table.add({CsvTable::cell(entry.iteration), CsvTable::cell(entry.primal_residual),
               CsvTable::cell(entry.dual_residual), CsvTable::cell(entry.objective)});
  table.write(path);
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  CommonIo io;
  SolverFlags solver;
  int n_lambda = 50;
  double lambda_min_ratio = 0.01;
  int folds = 5;
  std::uint64_t seed = kDefaultFitSeed;
  bool standardize_columns = false;
  bool calibrate = false;
  bool one_se = false;
  bool dump_centered = false;
  bool dump_moments = false;
  bool dump_trace = false;
  bool dump_path = false;
};

int run_fit(const FitArgs& args) {
  IncompleteDataset ds = center(load_csv(args.io.input, csv_options(args.io)));
  if (args.standardize_columns) ds = standardize(ds);

  CvSpec spec;
  spec.k_folds = args.folds;
  spec.n_lambda = args.n_lambda;
  spec.lambda_min_ratio = args.lambda_min_ratio;
  spec.seed = args.seed;
  spec.pipeline = pipeline_config(args.solver);
  spec.cd.tol = args.solver.tol;
  spec.cd.max_sweeps = args.solver.max_sweeps;
  spec.calibrate = args.calibrate;
  spec.one_se_rule = args.one_se;

  const CvResult result = cross_validate(ds, spec);
  const Vector beta_raw = raw_scale_coefficients(result.fit.beta, ds);

  CsvTable coef({"column", "name", "beta"});
  for (int j : result.fit.active_set)
    coef.add({CsvTable::cell(j + 1), column_label(ds, j), CsvTable::cell(beta_raw(j))});
  coef.write(out_path(args.io, "coefficients.csv"));

  CsvTable summary({"selected_lambda", "intercept", "kkt_violation", "n_active", "sweeps",
                    "cd_converged", "admm_iterations", "admm_primal_residual",
                    "admm_dual_residual", "admm_converged", "min_pairwise_count",
                    "fold_attempts", "n", "p"});
  summary.add({CsvTable::cell(result.selected_lambda), CsvTable::cell(result.fit.intercept),
               CsvTable::cell(result.fit.kkt_violation),
               CsvTable::cell(static_cast<int>(result.fit.active_set.size())),
               CsvTable::cell(result.fit.sweeps), CsvTable::cell(result.fit.converged),
               CsvTable::cell(result.full_stats.psd.iterations),
               CsvTable::cell(result.full_stats.psd.primal_residual),
               CsvTable::cell(result.full_stats.psd.dual_residual),
               CsvTable::cell(result.full_stats.psd.converged),
               CsvTable::cell(result.full_stats.stats.min_pairwise_count()),
               CsvTable::cell(result.fold_attempts), CsvTable::cell(static_cast<int>(ds.rows())),
               CsvTable::cell(static_cast<int>(ds.cols()))});
  summary.write(out_path(args.io, "fit_summary.csv"));

  std::vector<std::string> curve_header{"lambda", "mean_error", "std_error"};
  for (int f = 0; f < args.folds; ++f) curve_header.push_back("fold_" + std::to_string(f + 1));
  CsvTable curve(curve_header);
  for (Index i = 0; i < result.lambdas.size(); ++i) {
    auto& row = curve.new_row();
    row.push_back(CsvTable::cell(result.lambdas(i)));
    row.push_back(CsvTable::cell(result.mean_error(i)));
    row.push_back(CsvTable::cell(result.std_error(i)));
    for (int f = 0; f < args.folds; ++f) row.push_back(CsvTable::cell(result.fold_errors(f, i)));
  }
  curve.write(out_path(args.io, "cv_curve.csv"));

  if (args.dump_centered) write_centered_csv(ds, out_path(args.io, "centered.csv"));
  if (args.dump_moments) {
    write_matrix_csv(out_path(args.io, "s_pair.csv"), result.full_stats.stats.s_pair);
    write_matrix_csv(out_path(args.io, "ratio.csv"), result.full_stats.stats.ratio);
    write_matrix_csv(out_path(args.io, "rho_pair.csv"), result.full_stats.stats.rho_pair);
  }
  if (args.dump_trace) {
    // Re-run the full-data repair with tracing enabled.
    const auto stats = result.full_stats.stats;
    std::vector<AdmmTraceEntry> trace;
    PsdApproxProblem prob(stats.s_pair, weight_matrix(stats, spec.pipeline.alpha),
                          spec.pipeline.norm, spec.pipeline.mu, spec.pipeline.admm_max_iters,
                          spec.pipeline.admm_tol);
    admm_solve(prob, &trace);
    write_trace_csv(out_path(args.io, "admm_trace.csv"), trace);
  }
  if (args.dump_path) {
    const LassoPath path =
        path_solve(result.full_stats.sigma, result.full_stats.rho, result.lambdas, spec.cd);
    CsvTable table({"lambda", "column", "beta"});
    for (const auto& fit : path.fits) {
      const Vector raw = raw_scale_coefficients(fit.beta, ds);
      for (int j : fit.active_set)
        table.add({CsvTable::cell(fit.lambda), CsvTable::cell(j + 1), CsvTable::cell(raw(j))});
    }
    table.write(out_path(args.io, "path.csv"));
  }

  std::fprintf(stderr, "fit: selected lambda %.6g, %zu active, kkt %.3g\n",
               result.selected_lambda, result.fit.active_set.size(), result.fit.kkt_violation);
  return 0;
}

// ---------------------------------------------------------------------------
// cov

struct CovArgs {
  CommonIo io;
  SolverFlags solver;
  bool dump_trace = false;
};

int run_cov(const CovArgs& args) {
  const IncompleteDataset ds = center(load_csv(args.io.input, csv_options(args.io)));
  const PairwiseStats stats = pairwise_moments(ds);
  const Matrix weights = weight_matrix(stats, args.solver.alpha);
  const PipelineConfig config = pipeline_config(args.solver);

  PsdApproxProblem prob(stats.s_pair, weights, config.norm, config.mu, config.admm_max_iters,
                        config.admm_tol);
  std::vector<AdmmTraceEntry> trace;
  const PsdApproxResult result = admm_solve(prob, args.dump_trace ? &trace : nullptr);

  write_matrix_csv(out_path(args.io, "s_pair.csv"), stats.s_pair);
  write_matrix_csv(out_path(args.io, "ratio.csv"), stats.ratio);
  write_matrix_csv(out_path(args.io, "rho_pair.csv"), stats.rho_pair);
  write_matrix_csv(out_path(args.io, "sigma_tilde.csv"), result.sigma_tilde);

  CsvTable summary({"iterations", "primal_residual", "dual_residual", "converged",
                    "min_eig_s_pair", "min_eig_sigma_tilde", "min_pairwise_count"});
  summary.add({CsvTable::cell(result.iterations), CsvTable::cell(result.primal_residual),
               CsvTable::cell(result.dual_residual), CsvTable::cell(result.converged),
               CsvTable::cell(min_eigenvalue(stats.s_pair)),
               CsvTable::cell(min_eigenvalue(result.sigma_tilde)),
               CsvTable::cell(stats.min_pairwise_count())});
  summary.write(out_path(args.io, "admm_summary.csv"));

  if (args.dump_trace) write_trace_csv(out_path(args.io, "admm_trace.csv"), trace);

  std::fprintf(stderr, "cov: %d iterations, converged=%d, min eig %.3g -> %.3g\n",
               result.iterations, result.converged ? 1 : 0, min_eigenvalue(stats.s_pair),
               min_eigenvalue(result.sigma_tilde));
  return 0;
}

// ---------------------------------------------------------------------------
// simulate / bench shared parsing

CovPattern parse_cov_pattern(const std::string& text) {
  if (text == "uniform") return CovPattern::Uniform;
  if (text == "ar" || text == "autoregressive") return CovPattern::Autoregressive;
  if (text == "block") return CovPattern::Block;
  throw ValidationError("unknown covariance pattern '" + text + "'");
}

MissingPattern parse_missing_pattern(const std::string& text) {
  if (text == "random") return MissingPattern::Random;
  if (text == "column") return MissingPattern::Column;
  if (text == "rowcolumn") return MissingPattern::RowColumn;
  throw ValidationError("unknown missing pattern '" + text + "'");
}

BetaPattern parse_beta_pattern(const std::string& text) {
  if (text == "spread") return BetaPattern::Spread;
  if (text == "head") return BetaPattern::Head;
  if (text == "flat") return BetaPattern::Flat;
  throw ValidationError("unknown beta pattern '" + text + "'");
}

struct SimulateArgs {
  int n = 1000;
  int p = 100;
  std::string cov_pattern = "uniform";
  double r = 0.5;
  int block_size = 10;
  std::string missing_pattern = "random";
  double miss_rate = 0.5;
  std::string beta_pattern = "spread";
  double noise_var = 1.0;
  int test_n = 0;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

SimulationSpec to_spec(const SimulateArgs& args) {
  SimulationSpec spec;
  spec.n = args.n;
  spec.p = args.p;
  spec.seed = args.seed;
  spec.cov = {parse_cov_pattern(args.cov_pattern), args.r, args.block_size};
  spec.miss = {parse_missing_pattern(args.missing_pattern), args.miss_rate};
  spec.beta = parse_beta_pattern(args.beta_pattern);
  spec.noise_var = args.noise_var;
  spec.test_n = args.test_n;
  return spec;
}

int run_simulate(const SimulateArgs& args) {
  const TrialData trial = generate_trial(to_spec(args));
  fs::create_directories(args.out_dir);

  auto data_path = [&](const std::string& name) {
    return (fs::path(args.out_dir) / name).string();
  };

  {
    std::ofstream out(data_path("train.csv"));
    for (Index j = 0; j < trial.train.cols(); ++j) out << "x" << (j + 1) << ",";
    out << "y\n";
    for (Index i = 0; i < trial.train.rows(); ++i) {
      for (Index j = 0; j < trial.train.cols(); ++j) {
        if (trial.train.mask(i, j) == 1.0)
          out << format_g17(trial.train.values(i, j));
        else
          out << "NA";
        out << ',';
      }
      out << format_g17(trial.train.response(i)) << '\n';
    }
  }
  {
    std::ofstream out(data_path("test.csv"));
    for (Index j = 0; j < trial.test_x.cols(); ++j) out << "x" << (j + 1) << ",";
    out << "y\n";
    for (Index i = 0; i < trial.test_x.rows(); ++i) {
      for (Index j = 0; j < trial.test_x.cols(); ++j)
        out << format_g17(trial.test_x(i, j)) << ',';
      out << format_g17(trial.test_y(i)) << '\n';
    }
  }
  CsvTable beta({"column", "beta"});
  for (Index j = 0; j < trial.beta_true.size(); ++j)
    beta.add({CsvTable::cell(static_cast<int>(j) + 1), CsvTable::cell(trial.beta_true(j))});
  beta.write(data_path("beta_true.csv"));

  std::fprintf(stderr, "simulate: n=%d p=%d, %d mask redraws\n", args.n, args.p,
               trial.mask_redraws);
  return 0;
}

struct BenchArgs {
  std::vector<int> n{1000};
  std::vector<int> p{100};
  std::vector<std::string> cov_pattern{"uniform"};
  std::vector<double> r{0.5};
  int block_size = 10;
  std::vector<std::string> missing_pattern{"random"};
  std::vector<double> miss_rate{0.5};
  std::vector<std::string> beta_pattern{"spread"};
  std::vector<double> noise_var{1.0};
  int test_n = 0;
  std::vector<std::string> methods{"hmlasso", "cocolasso", "mean_impute"};
  int replicates = 10;
  std::uint64_t seed = 0;
  int threads = 1;
  int folds = 5;
  int n_lambda = 30;
  double lambda_min_ratio = 0.01;
  double tol = 1e-7;
  bool per_trial = false;
  std::string out_dir = ".";
};

int run_bench(const BenchArgs& args) {
  std::vector<SimulationSpec> conditions;
  for (int n : args.n)
    for (int p : args.p)
      for (const auto& cov : args.cov_pattern)
        for (double r : args.r)
          for (const auto& miss : args.missing_pattern)
            for (double rate : args.miss_rate)
              for (const auto& beta : args.beta_pattern)
                for (double noise : args.noise_var) {
                  SimulationSpec spec;
                  spec.n = n;
                  spec.p = p;
                  spec.cov = {parse_cov_pattern(cov), r, args.block_size};
                  spec.miss = {parse_missing_pattern(miss), rate};
                  spec.beta = parse_beta_pattern(beta);
                  spec.noise_var = noise;
                  spec.test_n = args.test_n;
                  conditions.push_back(spec);
                }

  std::vector<MethodSpec> methods;
  for (const auto& m : args.methods) methods.push_back(parse_method(m));

  CvRunConfig cv;
  cv.k_folds = args.folds;
  cv.n_lambda = args.n_lambda;
  cv.lambda_min_ratio = args.lambda_min_ratio;
  cv.cd.tol = args.tol;

  const ExperimentResult result =
      run_experiment(conditions, methods, args.replicates, args.seed, cv, args.threads);

  fs::create_directories(args.out_dir);
  auto condition_cells = [&](int c) {
    const SimulationSpec& spec = conditions[static_cast<std::size_t>(c)];
    const char* cov = spec.cov.pattern == CovPattern::Uniform
                          ? "uniform"
                          : (spec.cov.pattern == CovPattern::Autoregressive ? "ar" : "block");
    const char* miss = spec.miss.pattern == MissingPattern::Random
                           ? "random"
                           : (spec.miss.pattern == MissingPattern::Column ? "column"
                                                                          : "rowcolumn");
    const char* beta = spec.beta == BetaPattern::Spread
                           ? "spread"
                           : (spec.beta == BetaPattern::Head ? "head" : "flat");
    return std::vector<std::string>{
        CsvTable::cell(c),          CsvTable::cell(spec.n),
        CsvTable::cell(spec.p),     std::string(cov),
        CsvTable::cell(spec.cov.r), CsvTable::cell(spec.cov.block_size),
        std::string(miss),          CsvTable::cell(spec.miss.mu),
        std::string(beta),          CsvTable::cell(spec.noise_var)};
  };
  const std::vector<std::string> condition_header{
      "condition", "n", "p", "cov_pattern", "r", "block_size", "missing_pattern", "miss_rate",
      "beta_pattern", "noise_var"};

  std::vector<std::string> agg_header = condition_header;
  for (const char* name :
       {"method", "n_ok", "n_failed", "l2_mean", "l2_se", "rmse_mean", "rmse_se"})
    agg_header.push_back(name);
  CsvTable aggregate(agg_header);
  for (const auto& row : result.rows) {
    auto cells = condition_cells(row.condition);
    cells.push_back(row.method);
    cells.push_back(CsvTable::cell(row.n_ok));
    cells.push_back(CsvTable::cell(row.n_failed));
    cells.push_back(CsvTable::cell(row.l2_mean));
    cells.push_back(CsvTable::cell(row.l2_se));
    cells.push_back(CsvTable::cell(row.rmse_mean));
    cells.push_back(CsvTable::cell(row.rmse_se));
    aggregate.add(std::move(cells));
  }
  aggregate.write((fs::path(args.out_dir) / "results.csv").string());

  if (args.per_trial) {
    std::vector<std::string> header = condition_header;
    for (const char* name : {"replicate", "method", "ok", "l2_error", "rmse", "selected_lambda",
                             "error"})
      header.push_back(name);
    CsvTable table(header);
    for (const auto& rec : result.trials) {
      auto cells = condition_cells(rec.condition);
      cells.push_back(CsvTable::cell(rec.replicate));
      cells.push_back(rec.result.method);
      cells.push_back(CsvTable::cell(rec.result.ok));
      cells.push_back(CsvTable::cell(rec.result.l2_error));
      cells.push_back(CsvTable::cell(rec.result.rmse));
      cells.push_back(CsvTable::cell(rec.result.selected_lambda));
      cells.push_back(rec.result.error);
      table.add(std::move(cells));
    }
    table.write((fs::path(args.out_dir) / "trials.csv").string());
  }

  double total_time = 0.0;
  for (const auto& rec : result.trials) total_time += rec.result.wall_time_s;
  std::fprintf(stderr, "bench: %zu conditions x %d replicates x %zu methods, %.1fs solver time\n",
               conditions.size(), args.replicates, methods.size(), total_time);
  return 0;
}

// ---------------------------------------------------------------------------

void add_io_options(CLI::App* cmd, CommonIo& io) {
  cmd->add_option("--input", io.input, "input CSV path")->required();
  cmd->add_option("--response", io.response_name, "response column name (needs a header)");
  cmd->add_option("--response-index", io.response_index, "response column index (0-based)");
  cmd->add_option("--delimiter", io.delimiter, "field delimiter (default ,)");
  cmd->add_option("--header", io.header, "header handling: auto|yes|no (default auto)");
  cmd->add_option("--missing-token", io.missing_tokens,
                  "tokens treated as missing (replaces the default NA/NaN/empty set)");
  cmd->add_option("--out-dir", io.out_dir, "output directory (default .)");
}

void add_solver_options(CLI::App* cmd, SolverFlags& solver) {
  cmd->add_option("--alpha", solver.alpha, "observation-ratio weight exponent (default 1)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--norm", solver.norm, "PSD repair norm: frobenius|max (default frobenius)");
  cmd->add_option("--mu", solver.mu,
                  "ADMM augmented Lagrangian parameter (default 10 frobenius, 1 max)");
  cmd->add_option("--tol", solver.tol, "solver tolerance for ADMM and coordinate descent");
  cmd->add_option("--admm-max-iters", solver.admm_max_iters, "ADMM iteration cap");
  cmd->add_option("--max-sweeps", solver.max_sweeps, "coordinate descent sweep cap");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lasso regression for incomplete data via pairwise covariances and weighted "
               "PSD repair"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file ([fit]/[cov]/[simulate]/[bench] sections)");

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "cross-validated fit on a CSV dataset");
  fit->configurable();
  fit->fallthrough();
  add_io_options(fit, fit_args.io);
  add_solver_options(fit, fit_args.solver);
  fit->add_option("--n-lambda", fit_args.n_lambda, "lambda grid size (default 50)");
  fit->add_option("--lambda-min-ratio", fit_args.lambda_min_ratio,
                  "smallest lambda as a fraction of lambda_max (default 0.01)");
  fit->add_option("--folds", fit_args.folds, "cross-validation folds (default 5)");
  fit->add_option("--seed", fit_args.seed, "fold assignment seed (fixed default)");
  fit->add_flag("--standardize", fit_args.standardize_columns,
                "scale columns by observed-entry standard deviation");
  fit->add_flag("--calibrate", fit_args.calibrate,
                "rescale fold lambdas by sqrt(n_train/n)");
  fit->add_flag("--one-se", fit_args.one_se, "one-standard-error selection rule");
  fit->add_flag("--dump-centered", fit_args.dump_centered, "export the centered design");
  fit->add_flag("--dump-moments", fit_args.dump_moments, "export S_pair, ratio, rho_pair");
  fit->add_flag("--dump-trace", fit_args.dump_trace, "export the ADMM iteration trace");
  fit->add_flag("--dump-path", fit_args.dump_path, "export the full coefficient path");

  CovArgs cov_args;
  CLI::App* cov = app.add_subcommand("cov", "pairwise covariance and PSD repair report");
  cov->configurable();
  cov->fallthrough();
  add_io_options(cov, cov_args.io);
  add_solver_options(cov, cov_args.solver);
  cov->add_flag("--dump-trace", cov_args.dump_trace, "export the ADMM iteration trace");

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "generate one synthetic train/test pair");
  sim->configurable();
  sim->fallthrough();
  sim->add_option("--n", sim_args.n, "training rows");
  sim->add_option("--p", sim_args.p, "predictors");
  sim->add_option("--cov-pattern", sim_args.cov_pattern, "uniform|ar|block");
  sim->add_option("--r", sim_args.r, "covariance level in [0,1)");
  sim->add_option("--block-size", sim_args.block_size, "block size for the block pattern");
  sim->add_option("--missing-pattern", sim_args.missing_pattern, "random|column|rowcolumn");
  sim->add_option("--miss-rate", sim_args.miss_rate, "overall missing rate in [0,1)");
  sim->add_option("--beta-pattern", sim_args.beta_pattern, "spread|head|flat");
  sim->add_option("--noise-var", sim_args.noise_var, "noise variance");
  sim->add_option("--test-n", sim_args.test_n, "test rows (default: same as --n)");
  sim->add_option("--seed", sim_args.seed, "generation seed (default 0)");
  sim->add_option("--out-dir", sim_args.out_dir, "output directory");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "seeded benchmark over a condition grid");
  bench->configurable();
  bench->fallthrough();
  bench->add_option("--n", bench_args.n, "training rows (list)")->delimiter(',');
  bench->add_option("--p", bench_args.p, "predictors (list)")->delimiter(',');
  bench->add_option("--cov-pattern", bench_args.cov_pattern, "covariance patterns (list)")
      ->delimiter(',');
  bench->add_option("--r", bench_args.r, "covariance levels (list)")->delimiter(',');
  bench->add_option("--block-size", bench_args.block_size, "block size for block patterns");
  bench->add_option("--missing-pattern", bench_args.missing_pattern, "missing patterns (list)")
      ->delimiter(',');
  bench->add_option("--miss-rate", bench_args.miss_rate, "missing rates (list)")->delimiter(',');
  bench->add_option("--beta-pattern", bench_args.beta_pattern, "beta patterns (list)")
      ->delimiter(',');
  bench->add_option("--noise-var", bench_args.noise_var, "noise variances (list)")
      ->delimiter(',');
  bench->add_option("--test-n", bench_args.test_n, "test rows (default: same as n)");
  bench->add_option("--methods", bench_args.methods,
                    "methods: hmlasso[:alpha[:norm]], cocolasso, mean_impute")
      ->delimiter(',');
  bench->add_option("--replicates", bench_args.replicates, "replicates per condition");
  bench->add_option("--seed", bench_args.seed, "master seed (required)")->required();
  bench->add_option("--threads", bench_args.threads, "worker threads (output-invariant)");
  bench->add_option("--folds", bench_args.folds, "CV folds inside each trial");
  bench->add_option("--n-lambda", bench_args.n_lambda, "lambda grid size inside each trial");
  bench->add_option("--lambda-min-ratio", bench_args.lambda_min_ratio, "lambda grid floor ratio");
  bench->add_option("--tol", bench_args.tol, "solver tolerance");
  bench->add_flag("--per-trial", bench_args.per_trial, "also write the long per-trial table");
  bench->add_option("--out-dir", bench_args.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit->parsed()) return run_fit(fit_args);
    if (cov->parsed()) return run_cov(cov_args);
    if (sim->parsed()) return run_simulate(sim_args);
    if (bench->parsed()) return run_bench(bench_args);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
