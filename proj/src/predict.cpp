#include "pbmin/predict.hpp"

#include <algorithm>
#include <map>

#include "pbmin/learners.hpp"

namespace pbmin {

namespace {

void check_aligned(const HypothesisEnsemble& ensemble, const PosteriorWeights& rho) {
  if (static_cast<std::int64_t>(rho.size()) != ensemble.size())
    throw DomainError("posterior weights are not aligned with the ensemble");
}

void check_test_data(const HypothesisEnsemble& ensemble, const Dataset& test) {
  if (test.d() != ensemble.d)
    throw DomainError("test points do not match the ensemble feature dimension");
}

std::size_t draw_index(const PosteriorWeights& rho, RandomStream& stream) {
  const double u = stream.next_unit();
  double cumulative = 0.0;
  for (std::size_t h = 0; h < rho.size(); ++h) {
    cumulative += rho.weights()[h];
    if (u < cumulative) return h;
  }
  return rho.size() - 1;
}

}  // namespace

std::string majority_vote(const HypothesisEnsemble& ensemble, const PosteriorWeights& rho,
                          std::span<const double> point) {
  check_aligned(ensemble, rho);
  std::map<std::string, double> tally;
  for (std::size_t h = 0; h < ensemble.hypotheses.size(); ++h)
    tally[predict_label(ensemble.hypotheses[h], point)] += rho.weights()[h];
  std::string best = tally.begin()->first;
  double best_mass = tally.begin()->second;
  for (const auto& [label, mass] : tally) {
    if (mass > best_mass) {  // ascending map order, so ties keep the first label
      best = label;
      best_mass = mass;
    }
  }
  return best;
}

std::string randomized_predict(const HypothesisEnsemble& ensemble, const PosteriorWeights& rho,
                               std::span<const double> point, RandomStream& stream) {
  check_aligned(ensemble, rho);
  return predict_label(ensemble.hypotheses[draw_index(rho, stream)], point);
}

std::size_t best_hypothesis(const HypothesisEnsemble& ensemble) {
  if (ensemble.hypotheses.empty()) throw DomainError("best_hypothesis: empty ensemble");
  std::size_t best = 0;
  for (std::size_t h = 1; h < ensemble.validation_losses.size(); ++h)
    if (ensemble.validation_losses[h] < ensemble.validation_losses[best]) best = h;
  return best;
}

double test_loss(const HypothesisEnsemble& ensemble, const PosteriorWeights& rho,
                 const PredictionMode& mode, const Dataset& test) {
  check_test_data(ensemble, test);
  const std::int64_t n = test.n();
  std::int64_t errors = 0;

  switch (mode.kind) {
    case PredictionMode::Kind::majority: {
      check_aligned(ensemble, rho);
      for (std::int64_t i = 0; i < n; ++i)
        if (majority_vote(ensemble, rho, test.points()[static_cast<std::size_t>(i)]) !=
            test.labels()[static_cast<std::size_t>(i)])
          ++errors;
      break;
    }
    case PredictionMode::Kind::uniform: {
      const PosteriorWeights uniform = PosteriorWeights::from_flat(
          std::vector<double>(ensemble.hypotheses.size(),
                              1.0 / static_cast<double>(ensemble.size())));
      for (std::int64_t i = 0; i < n; ++i)
        if (majority_vote(ensemble, uniform, test.points()[static_cast<std::size_t>(i)]) !=
            test.labels()[static_cast<std::size_t>(i)])
          ++errors;
      break;
    }
    case PredictionMode::Kind::best_h: {
      const TrainedClassifier& clf = ensemble.hypotheses[best_hypothesis(ensemble)];
      for (std::int64_t i = 0; i < n; ++i)
        if (predict_label(clf, test.points()[static_cast<std::size_t>(i)]) !=
            test.labels()[static_cast<std::size_t>(i)])
          ++errors;
      break;
    }
    case PredictionMode::Kind::randomized: {
      check_aligned(ensemble, rho);
      // Fresh hypothesis per test point, from a per-point substream.
      for (std::int64_t i = 0; i < n; ++i) {
        RandomStream stream = RandomStream::derive(mode.seed, static_cast<std::uint64_t>(i));
        if (randomized_predict(ensemble, rho, test.points()[static_cast<std::size_t>(i)],
                               stream) != test.labels()[static_cast<std::size_t>(i)])
          ++errors;
      }
      break;
    }
  }
  return static_cast<double>(errors) / static_cast<double>(n);
}

double expected_randomized_loss(const HypothesisEnsemble& ensemble, const PosteriorWeights& rho,
                                const Dataset& test) {
  check_aligned(ensemble, rho);
  check_test_data(ensemble, test);
  double expectation = 0.0;
  for (std::size_t h = 0; h < ensemble.hypotheses.size(); ++h) {
    if (rho.weights()[h] == 0.0) continue;
    std::int64_t errors = 0;
    for (std::int64_t i = 0; i < test.n(); ++i)
      if (predict_label(ensemble.hypotheses[h], test.points()[static_cast<std::size_t>(i)]) !=
          test.labels()[static_cast<std::size_t>(i)])
        ++errors;
    expectation += rho.weights()[h] * static_cast<double>(errors) /
                   static_cast<double>(test.n());
  }
  return expectation;
}

std::int64_t half_mass_count(const std::vector<double>& weights) {
  std::vector<double> sorted = weights;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  std::int64_t count = 0;
  for (double w : sorted) {
    cumulative += w;
    ++count;
    if (cumulative >= 0.5) break;
  }
  return count;
}

}  // namespace pbmin
