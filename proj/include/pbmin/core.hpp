#pragma once

#include <cstdint>
#include <vector>

#include "pbmin/errors.hpp"

namespace pbmin {

struct LossEntry {
  double loss = 0.0;               // empirical loss, in [0, 1]
  double prior_mass = 0.0;         // per-hypothesis prior mass, in (0, 1]
  std::int64_t multiplicity = 1;   // number of hypotheses sharing this loss and mass
};

// Compressed multiset of per-hypothesis empirical losses with prior masses.
// An entry with multiplicity k stands for k hypotheses sharing one loss and
// one per-hypothesis prior mass; the compression is exact, not approximate.
// n_eff is the number of i.i.d. evaluation points behind each loss (the full
// sample size, or n - r when losses come from held-out validation).
//
// Total prior mass must be 1: a drift of up to 1e-9 is renormalized away,
// anything larger is rejected.  Immutable after construction.
class LossProfile {
 public:
  LossProfile(std::vector<LossEntry> entries, std::int64_t n_eff);

  // Uniform prior over `losses.size()` hypotheses, multiplicity 1 each.
  static LossProfile with_uniform_prior(const std::vector<double>& losses, std::int64_t n_eff);

  const std::vector<LossEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::int64_t n_eff() const { return n_eff_; }
  std::int64_t hypothesis_count() const { return hypothesis_count_; }
  double min_loss() const { return min_loss_; }
  bool has_uniform_prior() const;

 private:
  std::vector<LossEntry> entries_;
  std::int64_t n_eff_ = 1;
  std::int64_t hypothesis_count_ = 0;
  double min_loss_ = 0.0;
};

// Posterior distribution over hypotheses, stored as one per-hypothesis weight
// per profile entry (an entry of multiplicity k carries total mass
// weight * k).  Weights must be nonnegative with total mass 1; a drift of up
// to 1e-9 is renormalized, larger errors are rejected.
class PosteriorWeights {
 public:
  PosteriorWeights(std::vector<double> weights, const LossProfile& profile);

  // Treats every weight as a multiplicity-1 mass; used where weights align
  // 1:1 with hypotheses (ensembles).
  static PosteriorWeights from_flat(std::vector<double> weights);

  static PosteriorWeights prior_of(const LossProfile& profile);

  // Point mass on one hypothesis; the entry must have multiplicity 1.
  static PosteriorWeights point_mass(const LossProfile& profile, std::size_t entry_index);

  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }

 private:
  explicit PosteriorWeights(std::vector<double> weights) : weights_(std::move(weights)) {}
  std::vector<double> weights_;
};

// Sample count and confidence level for every bound evaluation, plus the
// numeric tolerances used by the optimizer.
struct BoundConfig {
  std::int64_t n_eff = 1;
  double delta = 0.05;
  double tol_mass = 1e-12;
  double tol_bound = 1e-9;
  std::int64_t max_iters = 1000;

  BoundConfig(std::int64_t n_eff_in, double delta_in);
};

// Throws unless cfg.n_eff matches the profile it is used with.
void require_matching_config(const LossProfile& profile, const BoundConfig& cfg);

// E_rho[loss]; clamped to [0, 1] against roundoff.
double gibbs_loss(const LossProfile& profile, const PosteriorWeights& rho);

// Var_rho[loss] = E_rho[loss^2] - E_rho[loss]^2, clamped at 0.
double gibbs_variance(const LossProfile& profile, const PosteriorWeights& rho);

// KL(rho || prior) with 0 ln 0 = 0; nonnegative.  Absolute continuity is
// automatic because prior masses are strictly positive by construction.
double kl_posterior_prior(const LossProfile& profile, const PosteriorWeights& rho);

// ln(2 sqrt(n_eff) / delta), the confidence term entering every bound.
double confidence_log_term(const BoundConfig& cfg);

// ln E_prior[e^{-scale * loss}], computed with the max-shift trick so that
// huge multiplicities and scale * loss up to ~1e4 stay in range.
double log_partition(const LossProfile& profile, double scale);

// Per-hypothesis weights proportional to prior_mass * e^{-scale * loss},
// normalized in the log domain; aligned with profile entries.
std::vector<double> gibbs_weights(const LossProfile& profile, double scale);

}  // namespace pbmin
