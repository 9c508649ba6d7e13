// pbmin: PAC-Bayes bound computation, minimization and weak-classifier
// aggregation.  Subcommands: train, predict, bound, scan, certify, experiment.
//
// Exit codes: 0 ok, 1 usage error, 2 data error, 3 numeric-domain error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "pbmin/bounds.hpp"
#include "pbmin/certify.hpp"
#include "pbmin/experiments.hpp"
#include "pbmin/io.hpp"
#include "pbmin/optimizer.hpp"
#include "pbmin/predict.hpp"

using namespace pbmin;

namespace {

DatasetFormat parse_format(const std::string& name) {
  if (name == "svmlight") return DatasetFormat::svmlight;
  if (name == "csv") return DatasetFormat::csv;
  throw DataError("unknown dataset format '" + name + "' (expected svmlight or csv)");
}

// table destination: --out file when given, stdout otherwise
struct TableSink {
  std::ofstream file;
  bool to_file = false;

  explicit TableSink(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw DataError("cannot open '" + path + "' for writing");
      to_file = true;
    }
  }
  std::ostream& stream() { return to_file ? static_cast<std::ostream&>(file) : std::cout; }
};

std::string method_name(CertificateMethod method) {
  switch (method) {
    case CertificateMethod::base_constants: return "base_constants";
    case CertificateMethod::tuned_intervals: return "tuned_intervals";
    case CertificateMethod::refined_upper: return "refined_upper";
    case CertificateMethod::combined: return "combined";
  }
  return "unknown";
}

struct LearnerFlags {
  std::string kind = "kernel_perceptron";
  std::string gamma = "grid";
  int epochs = 50;

  void attach(CLI::App* cmd) {
    cmd->add_option("--learner", kind, "Weak learner: kernel_perceptron or stump")
        ->check(CLI::IsMember({"kernel_perceptron", "stump", "constant"}));
    cmd->add_option("--gamma", gamma,
                    "RBF bandwidth: a number, or 'grid' for a per-subset draw from the "
                    "nearest-opposite-label heuristic grid");
    cmd->add_option("--epochs", epochs, "Kernel perceptron training passes")
        ->check(CLI::PositiveNumber);
  }

  LearnerSpec resolve(const Dataset& train) const {
    LearnerSpec spec;
    spec.epochs = epochs;
    if (kind == "stump")
      spec.kind = LearnerKind::stump;
    else if (kind == "constant")
      spec.kind = LearnerKind::constant;
    else
      spec.kind = LearnerKind::kernel_perceptron;
    if (spec.kind == LearnerKind::kernel_perceptron) {
      if (gamma == "grid") {
        spec.gamma = GammaPolicy::from_grid(jaakkola_grid(train));
      } else {
        double value = 0.0;
        try {
          value = std::stod(gamma);
        } catch (const std::exception&) {
          throw DataError("--gamma must be a number or 'grid'");
        }
        spec.gamma = GammaPolicy::fixed(value);
      }
    }
    return spec;
  }
};

std::int64_t resolve_subsample_size(const std::string& flag, std::int64_t n, int d) {
  if (flag != "auto") {
    std::int64_t r = 0;
    try {
      r = std::stoll(flag);
    } catch (const std::exception&) {
      throw DataError("--r must be an integer or 'auto'");
    }
    return r;
  }
  // d+1 unless that is small against sqrt(n); low-dimensional data gets the
  // sqrt(n) subsample instead
  const double root = std::sqrt(static_cast<double>(n));
  std::int64_t r = d + 1;
  if (static_cast<double>(r) < root / 2.0) r = std::llround(root);
  return std::min<std::int64_t>(std::max<std::int64_t>(r, 1), n - 1);
}

void require_two_classes(const Dataset& data) {
  if (data.label_set().size() < 2)
    throw DataError("the training data contains a single class; nothing to learn");
}

int run_train(const std::string& data_path, const std::string& format,
              const std::string& out_path, std::int64_t m, const std::string& r_flag,
              double delta, std::uint64_t seed, const LearnerFlags& learner_flags) {
  const Dataset train = parse_dataset(data_path, parse_format(format));
  require_two_classes(train);

  PipelineConfig cfg;
  cfg.m = m;
  cfg.r = resolve_subsample_size(r_flag, train.n(), train.d());
  cfg.delta = delta;
  cfg.seed = seed;
  cfg.learner = learner_flags.resolve(train);
  const PipelineResult run = run_pipeline(train, cfg);

  TrainedModel model;
  model.ensemble = run.ensemble;
  model.posterior = run.posterior.weights();
  model.lambda = run.lambda;
  model.pb_lambda_bound = run.pb_lambda_bound;
  model.pb_kl_bound = run.pb_kl_bound;
  model.delta = delta;
  model.seed = seed;
  write_model(out_path, model);

  const TraceIteration& last = run.trace.iterations.back();
  std::cout << "metric,value\n";
  std::cout << "m," << run.ensemble.size() << "\n";
  std::cout << "r," << cfg.r << "\n";
  std::cout << "n," << train.n() << "\n";
  std::cout << "delta," << format_double(delta) << "\n";
  std::cout << "lambda," << format_double(run.lambda) << "\n";
  std::cout << "gibbs_val_loss," << format_double(last.gibbs_loss) << "\n";
  std::cout << "kl," << format_double(last.kl) << "\n";
  std::cout << "pb_lambda_bound," << format_double(run.pb_lambda_bound) << "\n";
  std::cout << "pb_kl_bound," << format_double(run.pb_kl_bound) << "\n";
  std::cout << "iterations," << run.trace.iterations.size() << "\n";
  std::cout << "converged," << (run.trace.converged ? 1 : 0) << "\n";
  std::cout << "model," << out_path << "\n";
  return 0;
}

int run_predict(const std::string& model_path, const std::string& data_path,
                const std::string& format, const std::string& mode_name, std::uint64_t seed,
                const std::string& out_path) {
  const TrainedModel model = read_model(model_path);
  const Dataset data = parse_dataset(data_path, parse_format(format));
  if (data.d() != model.ensemble.d)
    throw DataError("data dimension does not match the model");
  const PosteriorWeights rho = PosteriorWeights::from_flat(model.posterior);

  PredictionMode mode = PredictionMode::majority();
  if (mode_name == "uniform") mode = PredictionMode::uniform();
  else if (mode_name == "best_h") mode = PredictionMode::best_h();
  else if (mode_name == "randomized") mode = PredictionMode::randomized(seed);

  TableSink sink(out_path);
  sink.stream() << "index,label\n";
  const std::size_t best = best_hypothesis(model.ensemble);
  const PosteriorWeights uniform = PosteriorWeights::from_flat(std::vector<double>(
      model.posterior.size(), 1.0 / static_cast<double>(model.posterior.size())));
  for (std::int64_t i = 0; i < data.n(); ++i) {
    const auto& x = data.points()[static_cast<std::size_t>(i)];
    std::string label;
    switch (mode.kind) {
      case PredictionMode::Kind::majority: label = majority_vote(model.ensemble, rho, x); break;
      case PredictionMode::Kind::uniform: label = majority_vote(model.ensemble, uniform, x); break;
      case PredictionMode::Kind::best_h:
        label = predict_label(model.ensemble.hypotheses[best], x);
        break;
      case PredictionMode::Kind::randomized: {
        RandomStream stream = RandomStream::derive(seed, static_cast<std::uint64_t>(i));
        label = randomized_predict(model.ensemble, rho, x, stream);
        break;
      }
    }
    sink.stream() << i << ',' << label << '\n';
  }
  std::cout << "test_loss," << format_double(test_loss(model.ensemble, rho, mode, data))
            << "\n";
  return 0;
}

LossProfile profile_from_flags(const std::string& losses_path, const std::string& example,
                               const std::string& model_path, std::int64_t n_eval,
                               double delta, BoundConfig& cfg_out) {
  if (!example.empty()) {
    auto [profile, cfg] =
        example == "two-minima" ? make_two_minima_example() : make_nonconvex_example();
    cfg_out = cfg;
    return profile;
  }
  if (!model_path.empty()) {
    const TrainedModel model = read_model(model_path);
    auto [profile, cfg] =
        ensemble_profile(model.ensemble, std::nullopt, model.delta);
    cfg_out = cfg;
    return profile;
  }
  if (losses_path.empty())
    throw DataError("one of --losses, --model or --example is required");
  if (n_eval < 1) throw DataError("--n-eval is required with --losses");
  cfg_out = BoundConfig(n_eval, delta);
  return parse_losses_file(losses_path, n_eval);
}

int run_bound(const std::string& losses_path, std::int64_t n_eval, double delta,
              std::optional<double> lambda) {
  BoundConfig cfg(1, 0.5);
  const LossProfile profile = profile_from_flags(losses_path, "", "", n_eval, delta, cfg);
  std::cout << "metric,value\n";
  if (lambda) {
    // fixed lambda, prior as posterior: the raw two-term bound
    const PosteriorWeights prior = PosteriorWeights::prior_of(profile);
    const BoundValue bound = pac_bayes_lambda_bound(profile, prior, *lambda, cfg);
    std::cout << "lambda," << format_double(*lambda) << "\n";
    std::cout << "gibbs_loss," << format_double(gibbs_loss(profile, prior)) << "\n";
    std::cout << "kl," << format_double(kl_posterior_prior(profile, prior)) << "\n";
    std::cout << "gibbs_loss_term," << format_double(bound.gibbs_loss_term) << "\n";
    std::cout << "complexity_term," << format_double(bound.complexity_term) << "\n";
    std::cout << "pb_lambda_bound," << format_double(bound.value) << "\n";
    std::cout << "pb_kl_bound," << format_double(pac_bayes_kl_bound(profile, prior, cfg))
              << "\n";
    return 0;
  }
  const OptimizationTrace trace = alternate_minimize(profile, cfg);
  const TraceIteration& last = trace.iterations.back();
  std::cout << "lambda," << format_double(trace.final_lambda()) << "\n";
  std::cout << "gibbs_loss," << format_double(last.gibbs_loss) << "\n";
  std::cout << "kl," << format_double(last.kl) << "\n";
  std::cout << "pb_lambda_bound," << format_double(trace.final_bound()) << "\n";
  std::cout << "pb_kl_bound,"
            << format_double(pac_bayes_kl_bound(profile, trace.final_posterior, cfg)) << "\n";
  std::cout << "iterations," << trace.iterations.size() << "\n";
  std::cout << "converged," << (trace.converged ? 1 : 0) << "\n";
  return 0;
}

int run_scan(const std::string& losses_path, const std::string& example,
             const std::string& model_path, std::int64_t n_eval, double delta,
             std::int64_t grid_size, double lambda_max, const std::string& out_path) {
  BoundConfig cfg(1, 0.5);
  const LossProfile profile =
      profile_from_flags(losses_path, example, model_path, n_eval, delta, cfg);
  const LambdaScan scan = scan_lambda(profile, cfg, grid_size, lambda_max);

  TableSink sink(out_path);
  sink.stream() << "lambda,bound\n";
  for (std::size_t j = 0; j < scan.grid.size(); ++j)
    sink.stream() << format_double(scan.grid[j]) << ',' << format_double(scan.values[j])
                  << '\n';

  std::cout << "local_minima=" << scan.local_minima.size();
  for (std::size_t idx : scan.local_minima)
    std::cout << " lambda=" << format_double(scan.grid[idx]);
  std::cout << "\n";
  return 0;
}

int run_certify(const std::string& losses_path, const std::string& example,
                const std::string& model_path, std::int64_t n_eval, double delta,
                std::optional<double> alpha, std::optional<double> beta, bool refine_upper,
                int grid_steps, std::int64_t runtime_grid) {
  BoundConfig cfg(1, 0.5);
  const LossProfile profile =
      profile_from_flags(losses_path, example, model_path, n_eval, delta, cfg);

  const Certificate cert =
      alpha || beta ? tuned_certificate(profile, cfg, alpha.value_or(1.0 / 3.0),
                                        beta.value_or(1.0 / 3.0), refine_upper)
                    : search_certificate(profile, cfg, grid_steps);

  std::cout << "metric,value\n";
  std::cout << "verdict," << (cert.certified ? "certified" : "not_certified") << "\n";
  std::cout << "method," << method_name(cert.method) << "\n";
  std::cout << "alpha," << format_double(cert.alpha) << "\n";
  std::cout << "beta," << format_double(cert.beta) << "\n";
  std::cout << "band_lower," << format_double(cert.band_lower) << "\n";
  std::cout << "band_upper," << format_double(cert.band_upper) << "\n";
  std::cout << "count_budget," << format_double(cert.count_budget) << "\n";
  std::cout << "mediocre_count," << cert.mediocre_count << "\n";

  if (runtime_grid > 0) {
    std::vector<double> grid;
    for (std::int64_t j = 1; j <= runtime_grid; ++j)
      grid.push_back(static_cast<double>(j) / static_cast<double>(runtime_grid));
    const ConditionReport report = runtime_conditions(profile, cfg, grid);
    std::cout << "runtime_lambda_floor," << format_double(report.lambda_floor) << "\n";
    std::cout << "runtime_certified," << (report.certified ? 1 : 0) << "\n";
  }
  return 0;
}

int run_experiment_heatmap(const std::string& data_path, const std::string& test_path,
                           const std::string& format, int m_count, int r_count,
                           const std::string& spacing, double delta, std::uint64_t seed,
                           const LearnerFlags& learner_flags, std::optional<double> baseline,
                           const std::string& out_path) {
  const Dataset train = parse_dataset(data_path, parse_format(format));
  const Dataset test = parse_dataset(test_path, parse_format(format));
  require_two_classes(train);

  HeatmapConfig cfg;
  cfg.m_values = experiment_grid(1, train.n(), m_count, spacing == "geometric");
  cfg.r_values = experiment_grid(2, std::min<std::int64_t>(train.d() + 1, train.n() - 1),
                                 r_count, false);
  cfg.delta = delta;
  cfg.seed = seed;
  cfg.learner = learner_flags.resolve(train);
  cfg.baseline = baseline;
  const HeatmapResult result = run_heatmap(train, test, cfg);

  TableSink sink(out_path);
  sink.stream() << "m";
  for (std::int64_t r : result.r_values) sink.stream() << ",r=" << r;
  sink.stream() << '\n';
  for (std::size_t mi = 0; mi < result.m_values.size(); ++mi) {
    sink.stream() << result.m_values[mi];
    for (double value : result.matrix[mi]) sink.stream() << ',' << format_double(value);
    sink.stream() << '\n';
  }
  std::cout << "cells=" << result.m_values.size() * result.r_values.size()
            << " rows=" << result.m_values.size() << " cols=" << result.r_values.size()
            << "\n";
  return 0;
}

int run_experiment_validity(std::int64_t trials, std::int64_t n, std::int64_t m,
                            std::int64_t r, double delta, std::uint64_t seed, double noise,
                            int support_size, int dims, const std::string& learner_kind) {
  ValidityConfig cfg;
  cfg.trials = trials;
  cfg.n = n;
  cfg.pipeline.m = m;
  cfg.pipeline.r = r;
  cfg.pipeline.delta = delta;
  cfg.pipeline.seed = seed;
  cfg.pipeline.learner.kind =
      learner_kind == "kernel_perceptron" ? LearnerKind::kernel_perceptron : LearnerKind::stump;
  cfg.pipeline.learner.gamma = GammaPolicy::fixed(1.0);
  cfg.task = DiscreteTask::make(support_size, dims, noise, RandomStream::derive_seed(seed, 1));

  const ValidityReport report = run_validity(cfg);
  std::cout << "metric,value\n";
  std::cout << "trials," << report.trials << "\n";
  std::cout << "violations," << report.violations << "\n";
  std::cout << "violation_rate,"
            << format_double(static_cast<double>(report.violations) /
                             static_cast<double>(report.trials))
            << "\n";
  std::cout << "mean_gap," << format_double(report.mean_gap) << "\n";
  std::cout << "delta," << format_double(report.delta) << "\n";
  return 0;
}

int run_experiment_compare(const std::string& data_path, const std::string& test_path,
                           const std::string& format, std::int64_t n, std::int64_t test_n,
                           int dims, double separation, std::int64_t m, const std::string& r_flag,
                           double delta, std::uint64_t seed, const LearnerFlags& learner_flags) {
  std::optional<Dataset> train;
  std::optional<Dataset> test;
  if (!data_path.empty()) {
    train = parse_dataset(data_path, parse_format(format));
    if (test_path.empty()) throw DataError("--test is required with --data");
    test = parse_dataset(test_path, parse_format(format));
  } else {
    const GaussianTask task{dims, separation};
    train = task.sample(n, RandomStream::derive(seed, 101));
    test = task.sample(test_n, RandomStream::derive(seed, 102));
  }
  require_two_classes(*train);

  PipelineConfig cfg;
  cfg.m = m;
  cfg.r = resolve_subsample_size(r_flag, train->n(), train->d());
  cfg.delta = delta;
  cfg.seed = seed;
  cfg.learner = learner_flags.resolve(*train);
  const PipelineResult run = run_pipeline(*train, cfg);
  const PredictorComparison cmp =
      compare_predictors(run.ensemble, run.posterior, *test, RandomStream::derive_seed(seed, 103));

  std::cout << "metric,value\n";
  std::cout << "majority_loss," << format_double(cmp.majority) << "\n";
  std::cout << "uniform_loss," << format_double(cmp.uniform) << "\n";
  std::cout << "best_h_loss," << format_double(cmp.best_h) << "\n";
  std::cout << "best_h_index," << cmp.best_index << "\n";
  std::cout << "randomized_loss," << format_double(cmp.randomized_mc) << "\n";
  std::cout << "randomized_expected_loss," << format_double(cmp.randomized_expected) << "\n";
  std::cout << "half_mass_count," << cmp.half_mass << "\n";
  std::cout << "pb_lambda_bound," << format_double(run.pb_lambda_bound) << "\n";
  std::cout << "pb_kl_bound," << format_double(run.pb_kl_bound) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAC-Bayes bound minimization and weak-classifier aggregation"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Train a subsample ensemble and minimize the bound");
  std::string train_data, train_format = "svmlight", train_out = "model.json", train_r = "auto";
  std::int64_t train_m = 100;
  double train_delta = 0.05;
  std::uint64_t train_seed = 1;
  LearnerFlags train_learner;
  train->add_option("--data", train_data, "Training data file")->required();
  train->add_option("--format", train_format, "Data format: svmlight or csv");
  train->add_option("--m", train_m, "Number of weak classifiers")->check(CLI::PositiveNumber);
  train->add_option("--r", train_r, "Subsample size, or 'auto' (d+1 with a sqrt(n) fallback)");
  train->add_option("--delta", train_delta, "Confidence parameter");
  train->add_option("--seed", train_seed, "Random seed");
  train->add_option("--out", train_out, "Model output path");
  train_learner.attach(train);

  // predict
  auto* predict = app.add_subcommand("predict", "Predict with a trained model");
  std::string pred_model, pred_data, pred_format = "svmlight", pred_mode = "majority",
              pred_out;
  std::uint64_t pred_seed = 1;
  predict->add_option("--model", pred_model, "Model file")->required();
  predict->add_option("--data", pred_data, "Data file")->required();
  predict->add_option("--format", pred_format, "Data format: svmlight or csv");
  predict->add_option("--mode", pred_mode, "Prediction rule")
      ->check(CLI::IsMember({"majority", "uniform", "best_h", "randomized"}));
  predict->add_option("--seed", pred_seed, "Seed for randomized mode");
  predict->add_option("--out", pred_out, "Write the label table here instead of stdout");

  // bound
  auto* bound = app.add_subcommand("bound", "Evaluate the bounds on a raw losses file");
  std::string bound_losses;
  std::int64_t bound_n = 0;
  double bound_delta = 0.05;
  double bound_lambda = -1.0;
  bound->add_option("--losses", bound_losses, "Losses file: loss[,multiplicity[,prior_mass]]")
      ->required();
  bound->add_option("--n-eval", bound_n, "Evaluation points behind each loss")->required();
  bound->add_option("--delta", bound_delta, "Confidence parameter");
  auto* bound_lambda_opt =
      bound->add_option("--lambda", bound_lambda,
                        "Evaluate at this lambda with the prior as posterior "
                        "(default: minimize over posteriors and lambda)");

  // scan
  auto* scan = app.add_subcommand("scan", "Tabulate the bound curve over a lambda grid");
  std::string scan_losses, scan_example, scan_model, scan_out;
  std::int64_t scan_n = 0, scan_grid = 1000;
  double scan_delta = 0.05, scan_max = 1.0;
  scan->add_option("--losses", scan_losses, "Losses file");
  scan->add_option("--model", scan_model, "Trained model file");
  scan->add_option("--example", scan_example, "Built-in instance")
      ->check(CLI::IsMember({"nonconvex", "two-minima"}));
  scan->add_option("--n-eval", scan_n, "Evaluation points (with --losses)");
  scan->add_option("--delta", scan_delta, "Confidence parameter (with --losses)");
  scan->add_option("--grid-size", scan_grid, "Grid points")->check(CLI::PositiveNumber);
  scan->add_option("--lambda-max", scan_max, "Upper end of the grid, in (0, 2)");
  scan->add_option("--out", scan_out, "Write the table here instead of stdout");

  // certify
  auto* certify = app.add_subcommand("certify", "Certify strong quasiconvexity");
  std::string cert_losses, cert_example, cert_model;
  std::int64_t cert_n = 0, cert_runtime = 0;
  double cert_delta = 0.05;
  double cert_alpha = -1.0, cert_beta = -1.0;
  bool cert_refine = false;
  int cert_steps = 21;
  certify->add_option("--losses", cert_losses, "Losses file");
  certify->add_option("--model", cert_model, "Trained model file");
  certify->add_option("--example", cert_example, "Built-in instance")
      ->check(CLI::IsMember({"nonconvex", "two-minima"}));
  certify->add_option("--n-eval", cert_n, "Evaluation points (with --losses)");
  certify->add_option("--delta", cert_delta, "Confidence parameter (with --losses)");
  auto* cert_alpha_opt = certify->add_option("--alpha", cert_alpha, "Fix the interval weight alpha");
  auto* cert_beta_opt = certify->add_option("--beta", cert_beta, "Fix the interval weight beta");
  certify->add_flag("--refine-b", cert_refine, "Use the tightened band upper edge");
  certify->add_option("--grid-steps", cert_steps, "Search grid steps per axis")
      ->check(CLI::Range(2, 200));
  certify->add_option("--runtime-grid", cert_runtime,
                      "Also evaluate the runtime curvature conditions on this many grid points");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Experiment harnesses");
  experiment->require_subcommand(1);

  auto* heatmap = experiment->add_subcommand("heatmap", "Test-loss matrix over (m, r)");
  std::string hm_data, hm_test, hm_format = "svmlight", hm_spacing = "linear", hm_out;
  int hm_m_count = 20, hm_r_count = 20;
  double hm_delta = 0.05, hm_baseline = std::nan("");
  std::uint64_t hm_seed = 1;
  LearnerFlags hm_learner;
  heatmap->add_option("--data", hm_data, "Training data")->required();
  heatmap->add_option("--test", hm_test, "Test data")->required();
  heatmap->add_option("--format", hm_format, "Data format");
  heatmap->add_option("--m-count", hm_m_count, "Grid values of m in [1, n]");
  heatmap->add_option("--r-count", hm_r_count, "Grid values of r in [2, d+1]");
  heatmap->add_option("--spacing", hm_spacing, "m grid spacing")
      ->check(CLI::IsMember({"linear", "geometric"}));
  heatmap->add_option("--delta", hm_delta, "Confidence parameter");
  heatmap->add_option("--seed", hm_seed, "Random seed");
  heatmap->add_option("--baseline", hm_baseline,
                      "Subtract this baseline loss from every cell");
  heatmap->add_option("--out", hm_out, "Write the matrix here instead of stdout");
  hm_learner.attach(heatmap);

  auto* validity = experiment->add_subcommand(
      "validity", "Monte Carlo coverage check of the bound on synthetic draws");
  std::int64_t va_trials = 1000, va_n = 500, va_m = 20, va_r = 10;
  double va_delta = 0.05, va_noise = 0.1;
  std::uint64_t va_seed = 1;
  int va_support = 32, va_d = 3;
  std::string va_learner = "stump";
  validity->add_option("--trials", va_trials, "Synthetic datasets to draw")
      ->check(CLI::PositiveNumber);
  validity->add_option("--n", va_n, "Sample size per trial")->check(CLI::PositiveNumber);
  validity->add_option("--m", va_m, "Weak classifiers per trial")->check(CLI::PositiveNumber);
  validity->add_option("--r", va_r, "Subsample size")->check(CLI::PositiveNumber);
  validity->add_option("--delta", va_delta, "Confidence parameter");
  validity->add_option("--seed", va_seed, "Random seed");
  validity->add_option("--noise", va_noise, "Label noise of the generating distribution");
  validity->add_option("--support-size", va_support, "Support points of the distribution");
  validity->add_option("--d", va_d, "Feature dimension");
  validity->add_option("--learner", va_learner, "Weak learner")
      ->check(CLI::IsMember({"stump", "kernel_perceptron"}));

  auto* compare = experiment->add_subcommand(
      "predictor_compare", "Compare the four prediction rules on one trained run");
  std::string cp_data, cp_test, cp_format = "svmlight", cp_r = "auto";
  std::int64_t cp_n = 2000, cp_test_n = 1000, cp_m = 200;
  int cp_d = 10;
  double cp_sep = 2.0, cp_delta = 0.05;
  std::uint64_t cp_seed = 1;
  LearnerFlags cp_learner;
  compare->add_option("--data", cp_data, "Training data (omit to draw a synthetic task)");
  compare->add_option("--test", cp_test, "Test data (required with --data)");
  compare->add_option("--format", cp_format, "Data format");
  compare->add_option("--n", cp_n, "Synthetic training sample size");
  compare->add_option("--test-n", cp_test_n, "Synthetic test sample size");
  compare->add_option("--d", cp_d, "Synthetic feature dimension");
  compare->add_option("--separation", cp_sep, "Synthetic class separation");
  compare->add_option("--m", cp_m, "Weak classifiers")->check(CLI::PositiveNumber);
  compare->add_option("--r", cp_r, "Subsample size or 'auto'");
  compare->add_option("--delta", cp_delta, "Confidence parameter");
  compare->add_option("--seed", cp_seed, "Random seed");
  cp_learner.attach(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train)
      return run_train(train_data, train_format, train_out, train_m, train_r, train_delta,
                       train_seed, train_learner);
    if (*predict)
      return run_predict(pred_model, pred_data, pred_format, pred_mode, pred_seed, pred_out);
    if (*bound)
      return run_bound(bound_losses, bound_n, bound_delta,
                       bound_lambda_opt->count() > 0 ? std::optional<double>(bound_lambda)
                                                     : std::nullopt);
    if (*scan)
      return run_scan(scan_losses, scan_example, scan_model, scan_n, scan_delta, scan_grid,
                      scan_max, scan_out);
    if (*certify)
      return run_certify(cert_losses, cert_example, cert_model, cert_n, cert_delta,
                         cert_alpha_opt->count() > 0 ? std::optional<double>(cert_alpha)
                                                     : std::nullopt,
                         cert_beta_opt->count() > 0 ? std::optional<double>(cert_beta)
                                                    : std::nullopt,
                         cert_refine, cert_steps, cert_runtime);
    if (*experiment) {
      if (*heatmap)
        return run_experiment_heatmap(hm_data, hm_test, hm_format, hm_m_count, hm_r_count,
                                      hm_spacing, hm_delta, hm_seed, hm_learner,
                                      std::isnan(hm_baseline)
                                          ? std::nullopt
                                          : std::optional<double>(hm_baseline),
                                      hm_out);
      if (*validity)
        return run_experiment_validity(va_trials, va_n, va_m, va_r, va_delta, va_seed,
                                       va_noise, va_support, va_d, va_learner);
      if (*compare)
        return run_experiment_compare(cp_data, cp_test, cp_format, cp_n, cp_test_n, cp_d,
                                      cp_sep, cp_m, cp_r, cp_delta, cp_seed, cp_learner);
    }
    std::cerr << "error: no subcommand selected\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
