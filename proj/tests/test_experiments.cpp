#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>

#include "pbmin/experiments.hpp"
#include "pbmin/predict.hpp"

using namespace pbmin;

namespace {

LearnerSpec stump_spec() {
  LearnerSpec spec;
  spec.kind = LearnerKind::stump;
  return spec;
}

}  // namespace

TEST_CASE("integer experiment grids") {
  const std::vector<std::int64_t> m_grid = experiment_grid(1, 2000, 20, false);
  REQUIRE(m_grid.size() == 20);
  CHECK(m_grid.front() == 1);
  CHECK(m_grid.back() == 2000);

  const std::vector<std::int64_t> r_grid = experiment_grid(2, 41, 20, false);
  REQUIRE(r_grid.size() == 20);
  CHECK(r_grid.front() == 2);
  CHECK(r_grid.back() == 41);

  const std::vector<std::int64_t> geo = experiment_grid(1, 2000, 20, true);
  CHECK(geo.front() == 1);
  CHECK(geo.back() == 2000);
  for (std::size_t i = 0; i + 1 < geo.size(); ++i) CHECK(geo[i] < geo[i + 1]);

  CHECK_THROWS_AS(experiment_grid(5, 4, 10, false), DomainError);
  CHECK_THROWS_AS(experiment_grid(1, 10, 1, false), DomainError);
}

TEST_CASE("gaussian task sampling is deterministic") {
  const GaussianTask task{4, 2.0};
  const Dataset a = task.sample(50, RandomStream(3));
  const Dataset b = task.sample(50, RandomStream(3));
  CHECK(a.points() == b.points());
  CHECK(a.labels() == b.labels());
  CHECK(a.d() == 4);
}

TEST_CASE("discrete task risks are exact finite sums") {
  const DiscreteTask task = DiscreteTask::make(40, 3, 0.1, 11);
  REQUIRE(task.support.size() == 40);

  TrainedClassifier constant;
  constant.dim = 3;
  constant.model = ConstantModel{"1"};
  // half the support is clean "1": risk = (noise + (1 - noise)) / 2
  CHECK(task.true_risk(constant) == doctest::Approx(0.5).epsilon(1e-12));

  // a perfect split on the first coordinate leaves only the label noise
  TrainedClassifier split;
  split.dim = 3;
  split.model = StumpModel{0, 0.0, "-1", "1"};
  const double split_risk = task.true_risk(split);
  CHECK(split_risk >= 0.1);
  CHECK(split_risk <= 0.35);

  const Dataset sample = task.sample(200, RandomStream(12));
  CHECK(sample.n() == 200);
  CHECK(sample.label_set().size() == 2);
}

TEST_CASE("validity harness sees no violations at desk scale") {
  ValidityConfig cfg;
  cfg.trials = 40;
  cfg.n = 300;
  cfg.pipeline.m = 10;
  cfg.pipeline.r = 10;
  cfg.pipeline.delta = 0.05;
  cfg.pipeline.seed = 21;
  cfg.pipeline.learner = stump_spec();
  cfg.task = DiscreteTask::make(32, 3, 0.1, 5);

  const ValidityReport report = run_validity(cfg);
  CHECK(report.trials == 40);
  CHECK(report.gaps.size() == 40);
  CHECK(report.violations == 0);
  CHECK(report.mean_gap > 0.0);
  CHECK(report.mean_gap < 1.0);

  // deterministic across runs and thread counts
  setenv("PBMIN_THREADS", "1", 1);
  const ValidityReport serial = run_validity(cfg);
  unsetenv("PBMIN_THREADS");
  CHECK(serial.gaps == report.gaps);
  CHECK(serial.violations == report.violations);
}

TEST_CASE("pipeline runs end to end and reports both bounds") {
  const GaussianTask task{3, 2.0};
  const Dataset train = task.sample(120, RandomStream(31));
  PipelineConfig cfg;
  cfg.m = 15;
  cfg.r = 6;
  cfg.delta = 0.05;
  cfg.seed = 4;
  cfg.learner = stump_spec();
  const PipelineResult run = run_pipeline(train, cfg);
  CHECK(run.ensemble.size() == 15);
  CHECK(run.trace.converged);
  CHECK(run.lambda > 0.0);
  CHECK(run.lambda <= 1.0);
  CHECK(run.pb_kl_bound <= run.pb_lambda_bound + 1e-12);

  const PipelineResult again = run_pipeline(train, cfg);
  CHECK(again.posterior.weights() == run.posterior.weights());
}

TEST_CASE("a one-classifier ensemble degenerates to the single-hypothesis bound") {
  const GaussianTask task{2, 2.0};
  const Dataset train = task.sample(100, RandomStream(61));
  PipelineConfig cfg;
  cfg.m = 1;
  cfg.r = 5;
  cfg.delta = 0.05;
  cfg.seed = 8;
  cfg.learner = stump_spec();
  const PipelineResult run = run_pipeline(train, cfg);
  CHECK(run.posterior.weights() == std::vector<double>{1.0});
  CHECK(run.trace.iterations.back().kl == 0.0);

  LossProfile single =
      LossProfile::with_uniform_prior({run.ensemble.validation_losses[0]}, 95);
  BoundConfig single_cfg(95, 0.05);
  const OptimizationTrace expect = alternate_minimize(single, single_cfg);
  CHECK(run.pb_lambda_bound == doctest::Approx(expect.final_bound()).epsilon(1e-12));
}

TEST_CASE("heatmap grid shape, determinism and baseline shift") {
  const GaussianTask task{2, 2.5};
  const Dataset train = task.sample(80, RandomStream(41));
  const Dataset test = task.sample(60, RandomStream(42));

  HeatmapConfig cfg;
  cfg.m_values = {4, 8, 12};
  cfg.r_values = {4, 8};
  cfg.delta = 0.05;
  cfg.seed = 9;
  cfg.learner = stump_spec();

  const HeatmapResult result = run_heatmap(train, test, cfg);
  REQUIRE(result.matrix.size() == 3);
  REQUIRE(result.matrix[0].size() == 2);
  for (const auto& row : result.matrix)
    for (double loss : row) {
      CHECK(loss >= 0.0);
      CHECK(loss <= 1.0);
    }

  HeatmapConfig shifted = cfg;
  shifted.baseline = 0.25;
  const HeatmapResult diff = run_heatmap(train, test, shifted);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(diff.matrix[i][j] == doctest::Approx(result.matrix[i][j] - 0.25).epsilon(1e-12));

  const HeatmapResult again = run_heatmap(train, test, cfg);
  CHECK(again.matrix == result.matrix);
}

TEST_CASE("predictor comparison wires the four modes together") {
  const GaussianTask task{3, 2.0};
  const Dataset train = task.sample(150, RandomStream(51));
  const Dataset test = task.sample(100, RandomStream(52));
  PipelineConfig cfg;
  cfg.m = 20;
  cfg.r = 8;
  cfg.delta = 0.05;
  cfg.seed = 2;
  cfg.learner = stump_spec();
  const PipelineResult run = run_pipeline(train, cfg);

  const PredictorComparison cmp = compare_predictors(run.ensemble, run.posterior, test, 77);
  CHECK(cmp.majority == test_loss(run.ensemble, run.posterior, PredictionMode::majority(), test));
  CHECK(cmp.uniform == test_loss(run.ensemble, run.posterior, PredictionMode::uniform(), test));
  CHECK(cmp.best_h == test_loss(run.ensemble, run.posterior, PredictionMode::best_h(), test));
  CHECK(cmp.randomized_expected ==
        expected_randomized_loss(run.ensemble, run.posterior, test));
  CHECK(cmp.half_mass >= 1);
  CHECK(cmp.half_mass <= 20);
  CHECK(cmp.best_index == best_hypothesis(run.ensemble));
  for (double loss : {cmp.majority, cmp.uniform, cmp.best_h, cmp.randomized_mc}) {
    CHECK(loss >= 0.0);
    CHECK(loss <= 1.0);
  }
}
