#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pbmin/core.hpp"
#include "pbmin/dataset.hpp"
#include "pbmin/learners.hpp"

namespace pbmin {

// m training subsets of r distinct indices each, drawn from [0, n).  Subsets
// may overlap.  Each subset comes from its own stream derived from (seed, h),
// so plans are reproducible and independent of evaluation order.
struct SubsamplePlan {
  std::vector<std::vector<std::int64_t>> subsets;  // each sorted ascending
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  std::int64_t r = 0;
};

// m trained weak classifiers with their subsets and held-out validation
// losses; validation_losses[h] is the zero-one loss over exactly the n - r
// points outside subsets[h].
struct HypothesisEnsemble {
  std::vector<TrainedClassifier> hypotheses;
  SubsamplePlan plan;
  std::vector<double> validation_losses;
  std::int64_t n = 0;
  std::int64_t r = 0;
  int d = 0;
  std::vector<std::string> label_set;

  std::int64_t size() const { return static_cast<std::int64_t>(hypotheses.size()); }
};

// Draws m subsets of r distinct indices, uniformly without replacement within
// each subset and independently across subsets.  Requires 1 <= r < n so that
// every hypothesis keeps n - r validation points.
SubsamplePlan draw_subsamples(std::int64_t n, std::int64_t m, std::int64_t r, std::uint64_t seed);

// Trains one classifier per subset and validates it on the complement.
// A learner failure on a subset (for example a single-class subset) falls
// back to a constant classifier predicting the subset's majority label; the
// ensemble is never aborted.  Hypotheses train in parallel; results are
// bit-identical for any thread count.
HypothesisEnsemble build_ensemble(const Dataset& data, const SubsamplePlan& plan,
                                  const LearnerSpec& spec);

// Loss profile over the validation losses with n_eff = n - r, one entry per
// hypothesis (multiplicity 1, aligned with the ensemble).  prior_masses empty
// means uniform.  Every bound, optimizer and certificate operation applies to
// the result unchanged.
std::pair<LossProfile, BoundConfig> ensemble_profile(
    const HypothesisEnsemble& ensemble, const std::optional<std::vector<double>>& prior_masses,
    double delta);

}  // namespace pbmin
