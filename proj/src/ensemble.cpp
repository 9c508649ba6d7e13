#include "pbmin/ensemble.hpp"

#include <algorithm>
#include <unordered_set>

#include "pbmin/parallel.hpp"
#include "pbmin/rng.hpp"

namespace pbmin {

namespace {

// Stream purpose tags: the index draw and the learner of hypothesis h consume
// disjoint streams, so adding randomness to one never shifts the other.
constexpr std::uint64_t kSubsetStream = 1;
constexpr std::uint64_t kLearnerStream = 2;

std::vector<std::int64_t> sample_without_replacement(std::int64_t n, std::int64_t r,
                                                     RandomStream& stream) {
  // Floyd's algorithm: r distinct indices using O(r) memory.
  std::unordered_set<std::int64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(r) * 2);
  for (std::int64_t j = n - r; j < n; ++j) {
    const std::int64_t candidate =
        static_cast<std::int64_t>(stream.next_below(static_cast<std::uint64_t>(j) + 1));
    if (!chosen.insert(candidate).second) chosen.insert(j);
  }
  std::vector<std::int64_t> subset(chosen.begin(), chosen.end());
  std::sort(subset.begin(), subset.end());
  return subset;
}

void validate_plan(const Dataset& data, const SubsamplePlan& plan) {
  if (plan.n != data.n())
    throw DomainError("build_ensemble: the plan was drawn for a different sample size");
  if (plan.subsets.empty()) throw DomainError("build_ensemble: the plan has no subsets");
  for (const auto& subset : plan.subsets) {
    if (static_cast<std::int64_t>(subset.size()) != plan.r)
      throw DomainError("build_ensemble: every subset must have exactly r indices");
    for (std::size_t k = 0; k < subset.size(); ++k) {
      if (subset[k] < 0 || subset[k] >= plan.n)
        throw DomainError("build_ensemble: subset index out of range");
      if (k > 0 && subset[k] <= subset[k - 1])
        throw DomainError("build_ensemble: subset indices must be distinct and ascending");
    }
  }
}

}  // namespace

SubsamplePlan draw_subsamples(std::int64_t n, std::int64_t m, std::int64_t r,
                              std::uint64_t seed) {
  if (n < 2) throw DomainError("draw_subsamples: need at least two sample points");
  if (m < 1) throw DomainError("draw_subsamples: need at least one subset");
  if (r < 1 || r >= n)
    throw DomainError(
        "draw_subsamples: need 1 <= r < n so that n - r validation points remain");

  SubsamplePlan plan;
  plan.seed = seed;
  plan.n = n;
  plan.r = r;
  plan.subsets.resize(static_cast<std::size_t>(m));
  for (std::int64_t h = 0; h < m; ++h) {
    RandomStream stream =
        RandomStream::derive(seed, static_cast<std::uint64_t>(h), kSubsetStream);
    plan.subsets[static_cast<std::size_t>(h)] = sample_without_replacement(n, r, stream);
  }
  return plan;
}

HypothesisEnsemble build_ensemble(const Dataset& data, const SubsamplePlan& plan,
                                  const LearnerSpec& spec) {
  validate_plan(data, plan);
  const std::size_t m = plan.subsets.size();
  const std::int64_t n = plan.n;
  const std::int64_t r = plan.r;

  HypothesisEnsemble ensemble;
  ensemble.plan = plan;
  ensemble.n = n;
  ensemble.r = r;
  ensemble.d = data.d();
  ensemble.label_set = data.label_set();
  ensemble.hypotheses.resize(m);
  ensemble.validation_losses.resize(m);

  parallel_for(m, [&](std::size_t h) {
    const auto& subset = plan.subsets[h];
    std::vector<std::vector<double>> train_points;
    std::vector<std::string> train_labels;
    train_points.reserve(subset.size());
    train_labels.reserve(subset.size());
    for (std::int64_t idx : subset) {
      train_points.push_back(data.points()[static_cast<std::size_t>(idx)]);
      train_labels.push_back(data.labels()[static_cast<std::size_t>(idx)]);
    }

    TrainedClassifier clf;
    const std::uint64_t learner_seed =
        RandomStream::derive_seed(plan.seed, static_cast<std::uint64_t>(h), kLearnerStream);
    try {
      clf = fit(spec, train_points, train_labels, learner_seed);
    } catch (const std::exception&) {
      clf.dim = data.d();
      clf.model = ConstantModel{majority_label(train_labels)};
    }

    // Zero-one loss over the n - r points outside the subset.
    std::int64_t errors = 0;
    std::size_t cursor = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      if (cursor < subset.size() && subset[cursor] == i) {
        ++cursor;
        continue;
      }
      if (predict_label(clf, data.points()[static_cast<std::size_t>(i)]) !=
          data.labels()[static_cast<std::size_t>(i)])
        ++errors;
    }
    ensemble.validation_losses[h] =
        static_cast<double>(errors) / static_cast<double>(n - r);
    ensemble.hypotheses[h] = std::move(clf);
  });

  return ensemble;
}

std::pair<LossProfile, BoundConfig> ensemble_profile(
    const HypothesisEnsemble& ensemble, const std::optional<std::vector<double>>& prior_masses,
    double delta) {
  const std::int64_t m = ensemble.size();
  if (m < 1) throw DomainError("ensemble_profile: the ensemble is empty");
  const std::int64_t n_eff = ensemble.n - ensemble.r;

  std::vector<LossEntry> entries;
  entries.reserve(static_cast<std::size_t>(m));
  if (prior_masses) {
    if (static_cast<std::int64_t>(prior_masses->size()) != m)
      throw DomainError("ensemble_profile: prior masses are not aligned with the ensemble");
    for (std::int64_t h = 0; h < m; ++h)
      entries.push_back({ensemble.validation_losses[static_cast<std::size_t>(h)],
                         (*prior_masses)[static_cast<std::size_t>(h)], 1});
  } else {
    const double mass = 1.0 / static_cast<double>(m);
    for (std::int64_t h = 0; h < m; ++h)
      entries.push_back({ensemble.validation_losses[static_cast<std::size_t>(h)], mass, 1});
  }
  return {LossProfile(std::move(entries), n_eff), BoundConfig(n_eff, delta)};
}

}  // namespace pbmin
