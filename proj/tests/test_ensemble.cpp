#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "pbmin/bounds.hpp"
#include "pbmin/ensemble.hpp"
#include "pbmin/optimizer.hpp"
#include "pbmin/rng.hpp"

using namespace pbmin;

namespace {

Dataset small_task(std::uint64_t seed, std::int64_t n, int d) {
  RandomStream stream(seed);
  std::vector<std::vector<double>> points;
  std::vector<std::string> labels;
  for (std::int64_t i = 0; i < n; ++i) {
    std::vector<double> p(static_cast<std::size_t>(d));
    for (double& v : p) v = stream.next_normal();
    const bool positive = p[0] + 0.3 * p[d > 1 ? 1 : 0] > 0.0;
    p[0] += positive ? 0.8 : -0.8;
    points.push_back(std::move(p));
    labels.push_back(positive ? "1" : "-1");
  }
  return Dataset(std::move(points), std::move(labels));
}

LearnerSpec stump_spec() {
  LearnerSpec spec;
  spec.kind = LearnerKind::stump;
  return spec;
}

}  // namespace

TEST_CASE("subsample plans validate their arguments") {
  CHECK_THROWS_AS(draw_subsamples(10, 1, 10, 0), DomainError);
  CHECK_THROWS_AS(draw_subsamples(10, 1, 0, 0), DomainError);
  CHECK_THROWS_AS(draw_subsamples(10, 0, 5, 0), DomainError);
  CHECK_THROWS_AS(draw_subsamples(1, 1, 1, 0), DomainError);
}

TEST_CASE("subsample plans are deterministic and well formed") {
  const SubsamplePlan plan = draw_subsamples(100, 50, 7, 12345);
  REQUIRE(plan.subsets.size() == 50);
  for (const auto& subset : plan.subsets) {
    REQUIRE(subset.size() == 7);
    std::set<std::int64_t> unique(subset.begin(), subset.end());
    CHECK(unique.size() == subset.size());
    CHECK(std::is_sorted(subset.begin(), subset.end()));
    CHECK(*subset.begin() >= 0);
    CHECK(*subset.rbegin() < 100);
  }

  const SubsamplePlan again = draw_subsamples(100, 50, 7, 12345);
  CHECK(plan.subsets == again.subsets);

  const SubsamplePlan other = draw_subsamples(1000, 200, 35, 1);
  const SubsamplePlan different = draw_subsamples(1000, 200, 35, 2);
  CHECK(other.subsets != different.subsets);
}

TEST_CASE("validation losses match a brute-force recomputation") {
  const Dataset data = small_task(7, 60, 3);
  const SubsamplePlan plan = draw_subsamples(60, 25, 8, 99);
  const HypothesisEnsemble ens = build_ensemble(data, plan, stump_spec());
  REQUIRE(ens.size() == 25);

  for (std::size_t h = 0; h < ens.hypotheses.size(); ++h) {
    const std::set<std::int64_t> in_subset(plan.subsets[h].begin(), plan.subsets[h].end());
    std::int64_t errors = 0;
    std::int64_t validation_points = 0;
    for (std::int64_t i = 0; i < data.n(); ++i) {
      if (in_subset.count(i)) continue;
      ++validation_points;
      if (predict_label(ens.hypotheses[h], data.points()[static_cast<std::size_t>(i)]) !=
          data.labels()[static_cast<std::size_t>(i)])
        ++errors;
    }
    CHECK(validation_points == 60 - 8);
    CHECK(ens.validation_losses[h] ==
          static_cast<double>(errors) / static_cast<double>(validation_points));

    // subset and validation indices partition [0, n)
    CHECK(in_subset.size() + static_cast<std::size_t>(validation_points) ==
          static_cast<std::size_t>(data.n()));
  }
}

TEST_CASE("ensembles are bit-identical across thread counts") {
  const Dataset data = small_task(8, 80, 3);
  const SubsamplePlan plan = draw_subsamples(80, 40, 9, 5);

  setenv("PBMIN_THREADS", "1", 1);
  const HypothesisEnsemble serial = build_ensemble(data, plan, stump_spec());
  setenv("PBMIN_THREADS", "4", 1);
  const HypothesisEnsemble threaded = build_ensemble(data, plan, stump_spec());
  unsetenv("PBMIN_THREADS");

  REQUIRE(serial.validation_losses.size() == threaded.validation_losses.size());
  for (std::size_t h = 0; h < serial.validation_losses.size(); ++h)
    CHECK(serial.validation_losses[h] == threaded.validation_losses[h]);
}

TEST_CASE("single-class subsets fall back to constant classifiers") {
  Dataset data({{0.0}, {0.1}, {0.2}, {5.0}}, {"a", "a", "a", "b"});
  SubsamplePlan plan;
  plan.seed = 0;
  plan.n = 4;
  plan.r = 2;
  plan.subsets = {{0, 1}, {2, 3}};
  LearnerSpec spec;
  spec.kind = LearnerKind::kernel_perceptron;
  spec.gamma = GammaPolicy::fixed(1.0);
  const HypothesisEnsemble ens = build_ensemble(data, plan, spec);
  CHECK(ens.hypotheses[0].kind() == LearnerKind::constant);
  const std::vector<double> probe{3.0};
  CHECK(predict_label(ens.hypotheses[0], probe) == "a");
  CHECK(ens.hypotheses[1].kind() == LearnerKind::kernel_perceptron);
}

TEST_CASE("a minority-class constant picks up the majority fraction as loss") {
  // subset {0, 1} is pure "a"; the 10 validation points split 3 "a" / 7 "b"
  std::vector<std::vector<double>> points(12, std::vector<double>{0.0});
  std::vector<std::string> labels(12, "b");
  labels[0] = labels[1] = "a";
  labels[2] = labels[3] = labels[4] = "a";
  Dataset data(points, labels);
  SubsamplePlan plan;
  plan.seed = 0;
  plan.n = 12;
  plan.r = 2;
  plan.subsets = {{0, 1}};
  const HypothesisEnsemble ens = build_ensemble(data, plan, stump_spec());
  CHECK(ens.hypotheses[0].kind() == LearnerKind::constant);
  CHECK(ens.validation_losses[0] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("validation count at a full-size split") {
  // n = 2000, r = 41 leaves 1959 evaluation points per hypothesis
  RandomStream stream(13);
  std::vector<std::vector<double>> points;
  std::vector<std::string> labels;
  for (int i = 0; i < 2000; ++i) {
    points.push_back({stream.next_normal()});
    labels.push_back(i % 2 == 0 ? "a" : "b");
  }
  Dataset data(points, labels);
  const SubsamplePlan plan = draw_subsamples(2000, 3, 41, 0);
  LearnerSpec constant;
  constant.kind = LearnerKind::constant;
  const HypothesisEnsemble ens = build_ensemble(data, plan, constant);
  auto [profile, cfg] = ensemble_profile(ens, std::nullopt, 0.05);
  CHECK(cfg.n_eff == 1959);
  CHECK(profile.n_eff() == 1959);
}

TEST_CASE("plans are validated against the data they are used with") {
  const Dataset data = small_task(9, 30, 2);
  SubsamplePlan plan = draw_subsamples(40, 5, 6, 0);
  LearnerSpec spec = stump_spec();
  CHECK_THROWS_AS(build_ensemble(data, plan, spec), DomainError);

  plan = draw_subsamples(30, 5, 6, 0);
  plan.subsets[2][0] = plan.subsets[2][1];  // break distinctness
  CHECK_THROWS_AS(build_ensemble(data, plan, spec), DomainError);
}

TEST_CASE("ensemble profile carries the held-out sample count") {
  const Dataset data = small_task(10, 50, 2);
  const SubsamplePlan plan = draw_subsamples(50, 12, 9, 3);
  const HypothesisEnsemble ens = build_ensemble(data, plan, stump_spec());

  auto [profile, cfg] = ensemble_profile(ens, std::nullopt, 0.05);
  CHECK(cfg.n_eff == 41);
  CHECK(profile.n_eff() == 41);
  REQUIRE(profile.size() == 12);
  for (std::size_t h = 0; h < profile.size(); ++h) {
    CHECK(profile.entries()[h].loss == ens.validation_losses[h]);
    CHECK(profile.entries()[h].prior_mass == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(profile.entries()[h].multiplicity == 1);
  }

  std::vector<double> masses(12, 1.0 / 12.0);
  auto [explicit_profile, cfg2] = ensemble_profile(ens, masses, 0.1);
  CHECK(explicit_profile.has_uniform_prior());
  CHECK_THROWS_AS(ensemble_profile(ens, std::vector<double>(5, 0.2), 0.05), DomainError);
}

TEST_CASE("identical hypotheses collapse to the single-hypothesis bound") {
  const Dataset data = small_task(11, 40, 2);
  SubsamplePlan plan;
  plan.seed = 1;
  plan.n = 40;
  plan.r = 5;
  const std::vector<std::int64_t> shared{3, 11, 19, 27, 35};
  plan.subsets.assign(8, shared);
  const HypothesisEnsemble ens = build_ensemble(data, plan, stump_spec());
  for (double loss : ens.validation_losses) CHECK(loss == ens.validation_losses[0]);

  auto [profile, cfg] = ensemble_profile(ens, std::nullopt, 0.05);
  const OptimizationTrace trace = alternate_minimize(profile, cfg);
  for (double w : trace.final_posterior.weights())
    CHECK(w == doctest::Approx(1.0 / 8.0).epsilon(1e-12));

  // kl vanishes at the uniform posterior, so the bound equals the
  // single-hypothesis bound at the same loss and sample count
  LossProfile single = LossProfile::with_uniform_prior({ens.validation_losses[0]}, 35);
  const OptimizationTrace single_trace = alternate_minimize(single, BoundConfig(35, 0.05));
  CHECK(trace.final_bound() == doctest::Approx(single_trace.final_bound()).epsilon(1e-12));
}

TEST_CASE("ensemble bound recomposes from raw parts") {
  const Dataset data = small_task(12, 70, 3);
  const SubsamplePlan plan = draw_subsamples(70, 15, 10, 21);
  const HypothesisEnsemble ens = build_ensemble(data, plan, stump_spec());
  auto [profile, cfg] = ensemble_profile(ens, std::nullopt, 0.05);
  const OptimizationTrace trace = alternate_minimize(profile, cfg);

  // recompute the kl bound from scratch: means, kl and budget by hand
  const std::vector<double>& w = trace.final_posterior.weights();
  double mean = 0.0;
  double kl = 0.0;
  for (std::size_t h = 0; h < w.size(); ++h) {
    mean += w[h] * ens.validation_losses[h];
    if (w[h] > 0.0) kl += w[h] * std::log(w[h] * 15.0);
  }
  const double n_eff = 60.0;
  const double budget =
      (kl + std::log(2.0 * std::sqrt(n_eff) / 0.05)) / n_eff;
  const double by_hand = kl_inverse_upper(std::clamp(mean, 0.0, 1.0), budget);
  CHECK(pac_bayes_kl_bound(profile, trace.final_posterior, cfg) ==
        doctest::Approx(by_hand).epsilon(1e-9));
}
