#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "pbmin/core.hpp"
#include "pbmin/dataset.hpp"
#include "pbmin/ensemble.hpp"
#include "pbmin/rng.hpp"

namespace pbmin {

// The four prediction rules compared in the experiments.
struct PredictionMode {
  enum class Kind { randomized, majority, uniform, best_h } kind = Kind::majority;
  std::uint64_t seed = 0;  // randomized mode only

  static PredictionMode randomized(std::uint64_t seed) { return {Kind::randomized, seed}; }
  static PredictionMode majority() { return {Kind::majority, 0}; }
  static PredictionMode uniform() { return {Kind::uniform, 0}; }
  static PredictionMode best_h() { return {Kind::best_h, 0}; }
};

// Label with the largest posterior-weighted vote mass; ties broken by
// ascending label order.  Invariant under positive rescaling of the weights.
std::string majority_vote(const HypothesisEnsemble& ensemble, const PosteriorWeights& rho,
                          std::span<const double> point);

// Draws one hypothesis by inverse CDF over hypothesis index order and applies it.
std::string randomized_predict(const HypothesisEnsemble& ensemble, const PosteriorWeights& rho,
                               std::span<const double> point, RandomStream& stream);

// Index of the lowest validation loss, lowest index on ties.
std::size_t best_hypothesis(const HypothesisEnsemble& ensemble);

// Mean zero-one loss of the chosen rule over the test set.  Randomized mode
// draws a fresh hypothesis per test point from a per-point substream, so the
// result is reproducible for any evaluation order.
double test_loss(const HypothesisEnsemble& ensemble, const PosteriorWeights& rho,
                 const PredictionMode& mode, const Dataset& test);

// Exact expectation of the randomized rule's test loss:
// sum_h rho(h) * (per-hypothesis test loss).  Noise-free counterpart of the
// Monte Carlo randomized mode.
double expected_randomized_loss(const HypothesisEnsemble& ensemble, const PosteriorWeights& rho,
                                const Dataset& test);

// Smallest number of hypotheses whose descending-sorted weights reach mass >= 0.5.
std::int64_t half_mass_count(const std::vector<double>& weights);

}  // namespace pbmin
