#include "pbmin/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "pbmin/parallel.hpp"
#include "pbmin/predict.hpp"

namespace pbmin {

namespace {

constexpr std::uint64_t kTrialDataStream = 11;
constexpr std::uint64_t kTrialPlanStream = 12;
constexpr std::uint64_t kHeatmapCellStream = 13;

}  // namespace

Dataset GaussianTask::sample(std::int64_t n, RandomStream stream) const {
  std::vector<std::vector<double>> points(static_cast<std::size_t>(n));
  std::vector<std::string> labels(static_cast<std::size_t>(n));
  const double offset = separation / 2.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const bool positive = (stream.next_u64() & 1) != 0;
    std::vector<double> point(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) point[static_cast<std::size_t>(k)] = stream.next_normal();
    point[0] += positive ? offset : -offset;
    points[static_cast<std::size_t>(i)] = std::move(point);
    labels[static_cast<std::size_t>(i)] = positive ? "1" : "-1";
  }
  return Dataset(std::move(points), std::move(labels));
}

DiscreteTask DiscreteTask::make(int support_size, int d, double label_noise,
                                std::uint64_t seed) {
  if (support_size < 2) throw DomainError("DiscreteTask: need at least two support points");
  if (d < 1) throw DomainError("DiscreteTask: need at least one dimension");
  if (!(label_noise >= 0.0 && label_noise < 0.5))
    throw DomainError("DiscreteTask: label noise must lie in [0, 0.5)");
  DiscreteTask task;
  task.label_noise = label_noise;
  RandomStream stream(seed);
  // Half the support per class, pushed apart on the first coordinate so the
  // clean labels are learnable by threshold rules.
  for (int k = 0; k < support_size; ++k) {
    const bool positive = k % 2 == 0;
    std::vector<double> point(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) point[static_cast<std::size_t>(j)] = stream.next_normal();
    point[0] += positive ? 1.5 : -1.5;
    task.support.push_back(std::move(point));
    task.clean_labels.push_back(positive ? task.label_b : task.label_a);
  }
  return task;
}

Dataset DiscreteTask::sample(std::int64_t n, RandomStream stream) const {
  std::vector<std::vector<double>> points(static_cast<std::size_t>(n));
  std::vector<std::string> labels(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const std::size_t k =
        static_cast<std::size_t>(stream.next_below(support.size()));
    points[static_cast<std::size_t>(i)] = support[k];
    const bool flip = stream.next_unit() < label_noise;
    const std::string& clean = clean_labels[k];
    labels[static_cast<std::size_t>(i)] =
        flip ? (clean == label_a ? label_b : label_a) : clean;
  }
  return Dataset(std::move(points), std::move(labels));
}

double DiscreteTask::true_risk(const TrainedClassifier& clf) const {
  // P(X = x_k) is uniform and the label flips with probability label_noise,
  // so the risk is an exact finite sum.
  double risk = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    const bool clean_hit = predict_label(clf, support[k]) == clean_labels[k];
    risk += clean_hit ? label_noise : 1.0 - label_noise;
  }
  return risk / static_cast<double>(support.size());
}

PipelineResult run_pipeline(const Dataset& train, const PipelineConfig& cfg) {
  const SubsamplePlan plan = draw_subsamples(train.n(), cfg.m, cfg.r, cfg.seed);
  HypothesisEnsemble ensemble = build_ensemble(train, plan, cfg.learner);
  auto [profile, bound_cfg] = ensemble_profile(ensemble, std::nullopt, cfg.delta);
  OptimizationTrace trace = alternate_minimize(profile, bound_cfg);
  const double lambda = trace.final_lambda();
  const double pb_lambda = trace.final_bound();
  const double pb_kl = pac_bayes_kl_bound(profile, trace.final_posterior, bound_cfg);
  PosteriorWeights posterior = trace.final_posterior;
  return {std::move(ensemble), std::move(posterior), std::move(trace),
          lambda,              pb_lambda,            pb_kl};
}

ValidityReport run_validity(const ValidityConfig& cfg) {
  if (cfg.trials < 1) throw DomainError("run_validity: need at least one trial");
  ValidityReport report;
  report.trials = cfg.trials;
  report.delta = cfg.pipeline.delta;
  report.gaps.resize(static_cast<std::size_t>(cfg.trials));
  std::vector<char> violated(static_cast<std::size_t>(cfg.trials), 0);

  parallel_for(static_cast<std::size_t>(cfg.trials), [&](std::size_t t) {
    const Dataset sample = cfg.task.sample(
        cfg.n, RandomStream::derive(cfg.pipeline.seed, t, kTrialDataStream));
    PipelineConfig trial_cfg = cfg.pipeline;
    trial_cfg.seed = RandomStream::derive_seed(cfg.pipeline.seed, t, kTrialPlanStream);
    const PipelineResult result = run_pipeline(sample, trial_cfg);

    double risk = 0.0;
    for (std::size_t h = 0; h < result.ensemble.hypotheses.size(); ++h)
      risk += result.posterior.weights()[h] * cfg.task.true_risk(result.ensemble.hypotheses[h]);

    report.gaps[t] = result.pb_lambda_bound - risk;
    violated[t] = result.pb_lambda_bound < risk ? 1 : 0;
  });

  double gap_total = 0.0;
  for (std::size_t t = 0; t < report.gaps.size(); ++t) {
    gap_total += report.gaps[t];
    report.violations += violated[t];
  }
  report.mean_gap = gap_total / static_cast<double>(report.trials);
  return report;
}

std::vector<std::int64_t> experiment_grid(std::int64_t lo, std::int64_t hi, int count,
                                          bool geometric) {
  if (lo < 1 || hi < lo) throw DomainError("experiment_grid: need 1 <= lo <= hi");
  if (count < 2) throw DomainError("experiment_grid: need at least two grid values");
  std::vector<std::int64_t> values;
  values.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(count - 1);
    double v = 0.0;
    if (geometric)
      v = static_cast<double>(lo) *
          std::pow(static_cast<double>(hi) / static_cast<double>(lo), t);
    else
      v = static_cast<double>(lo) + (static_cast<double>(hi) - static_cast<double>(lo)) * t;
    values.push_back(std::llround(v));
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

HeatmapResult run_heatmap(const Dataset& train, const Dataset& test, const HeatmapConfig& cfg) {
  if (cfg.m_values.empty() || cfg.r_values.empty())
    throw DomainError("run_heatmap: empty grid");
  HeatmapResult result;
  result.m_values = cfg.m_values;
  result.r_values = cfg.r_values;
  result.matrix.assign(cfg.m_values.size(), std::vector<double>(cfg.r_values.size(), 0.0));

  const std::size_t cells = cfg.m_values.size() * cfg.r_values.size();
  parallel_for(cells, [&](std::size_t cell) {
    const std::size_t mi = cell / cfg.r_values.size();
    const std::size_t ri = cell % cfg.r_values.size();
    PipelineConfig pipeline;
    pipeline.m = cfg.m_values[mi];
    pipeline.r = cfg.r_values[ri];
    pipeline.delta = cfg.delta;
    pipeline.seed = RandomStream::derive_seed(cfg.seed, cell, kHeatmapCellStream);
    pipeline.learner = cfg.learner;
    const PipelineResult run = run_pipeline(train, pipeline);
    const double loss =
        test_loss(run.ensemble, run.posterior, PredictionMode::majority(), test);
    result.matrix[mi][ri] = cfg.baseline ? loss - *cfg.baseline : loss;
  });
  return result;
}

PredictorComparison compare_predictors(const HypothesisEnsemble& ensemble,
                                       const PosteriorWeights& rho, const Dataset& test,
                                       std::uint64_t seed) {
  PredictorComparison cmp;
  cmp.randomized_mc = test_loss(ensemble, rho, PredictionMode::randomized(seed), test);
  cmp.randomized_expected = expected_randomized_loss(ensemble, rho, test);
  cmp.majority = test_loss(ensemble, rho, PredictionMode::majority(), test);
  cmp.uniform = test_loss(ensemble, rho, PredictionMode::uniform(), test);
  cmp.best_h = test_loss(ensemble, rho, PredictionMode::best_h(), test);
  cmp.half_mass = half_mass_count(rho.weights());
  cmp.best_index = best_hypothesis(ensemble);
  return cmp;
}

}  // namespace pbmin
