#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pbmin/bounds.hpp"
#include "pbmin/dataset.hpp"
#include "pbmin/ensemble.hpp"
#include "pbmin/optimizer.hpp"
#include "pbmin/rng.hpp"

namespace pbmin {

// Two spherical Gaussian classes in d dimensions with means +-(separation/2)
// on the first coordinate, labels "-1" / "1" with equal probability.
struct GaussianTask {
  int d = 10;
  double separation = 2.0;

  Dataset sample(std::int64_t n, RandomStream stream) const;
};

// Finite-support distribution: uniformly drawn support points carry clean
// labels flipped with probability label_noise, so the true risk of any
// classifier is an exact finite sum.  Used by the bound-validity harness.
struct DiscreteTask {
  std::vector<std::vector<double>> support;
  std::vector<std::string> clean_labels;
  double label_noise = 0.1;
  std::string label_a = "-1";
  std::string label_b = "1";

  // support_size points in d dimensions, half per class, separated on the
  // first coordinate so that threshold rules can learn the clean labels.
  static DiscreteTask make(int support_size, int d, double label_noise, std::uint64_t seed);

  Dataset sample(std::int64_t n, RandomStream stream) const;

  // Exact expected zero-one loss of clf under this distribution.
  double true_risk(const TrainedClassifier& clf) const;
};

// Subsample plan + ensemble + bound minimization in one pass; the shared
// training path behind the CLI and the experiment harnesses.
struct PipelineConfig {
  std::int64_t m = 100;
  std::int64_t r = 10;
  double delta = 0.05;
  std::uint64_t seed = 0;
  LearnerSpec learner;
};

struct PipelineResult {
  HypothesisEnsemble ensemble;
  PosteriorWeights posterior;
  OptimizationTrace trace;
  double lambda = 0.0;
  double pb_lambda_bound = 0.0;
  double pb_kl_bound = 0.0;
};

PipelineResult run_pipeline(const Dataset& train, const PipelineConfig& cfg);

// Monte Carlo check of bound coverage: draws `trials` datasets from the task,
// runs the pipeline on each, and compares the final lambda bound against the
// exact randomized risk sum_h rho(h) * true_risk(h).
struct ValidityConfig {
  std::int64_t trials = 100;
  std::int64_t n = 500;
  PipelineConfig pipeline;
  DiscreteTask task;
};

struct ValidityReport {
  std::int64_t trials = 0;
  std::int64_t violations = 0;
  double mean_gap = 0.0;  // mean of (bound - true risk)
  double delta = 0.05;
  std::vector<double> gaps;
};

ValidityReport run_validity(const ValidityConfig& cfg);

// count integer grid values spanning [lo, hi], linearly or geometrically
// spaced, deduplicated ascending.
std::vector<std::int64_t> experiment_grid(std::int64_t lo, std::int64_t hi, int count,
                                          bool geometric);

// Majority-vote test loss for every (m, r) cell, each cell trained with its
// own derived seed.  With a baseline, the matrix holds loss - baseline.
struct HeatmapConfig {
  std::vector<std::int64_t> m_values;
  std::vector<std::int64_t> r_values;
  double delta = 0.05;
  std::uint64_t seed = 0;
  LearnerSpec learner;
  std::optional<double> baseline;
};

struct HeatmapResult {
  std::vector<std::int64_t> m_values;
  std::vector<std::int64_t> r_values;
  std::vector<std::vector<double>> matrix;  // [m index][r index]
};

HeatmapResult run_heatmap(const Dataset& train, const Dataset& test, const HeatmapConfig& cfg);

// Test losses of the four prediction rules plus the number of hypotheses
// carrying half the posterior mass.
struct PredictorComparison {
  double randomized_mc = 0.0;
  double randomized_expected = 0.0;
  double majority = 0.0;
  double uniform = 0.0;
  double best_h = 0.0;
  std::int64_t half_mass = 0;
  std::size_t best_index = 0;
};

PredictorComparison compare_predictors(const HypothesisEnsemble& ensemble,
                                       const PosteriorWeights& rho, const Dataset& test,
                                       std::uint64_t seed);

}  // namespace pbmin
