#include "pbmin/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pbmin {

namespace {

// Mass drift up to this is renormalized away; larger errors are rejected so
// they surface as bugs instead of being silently absorbed.
constexpr double kMassRenormTol = 1e-9;

double normalized_total(std::vector<double>& masses, const char* what) {
  double total = 0.0;
  for (double m : masses) total += m;
  if (std::abs(total - 1.0) > kMassRenormTol) {
    std::ostringstream msg;
    msg << what << ": total mass must be 1, got " << total;
    throw DomainError(msg.str());
  }
  return total;
}

void check_aligned(const LossProfile& profile, const PosteriorWeights& rho) {
  if (rho.size() != profile.size())
    throw DomainError("posterior weights are not aligned with the loss profile");
}

}  // namespace

LossProfile::LossProfile(std::vector<LossEntry> entries, std::int64_t n_eff)
    : entries_(std::move(entries)), n_eff_(n_eff) {
  if (entries_.empty()) throw DomainError("LossProfile: at least one entry is required");
  if (n_eff_ < 1) throw DomainError("LossProfile: n_eff must be >= 1");
  double mass = 0.0;
  hypothesis_count_ = 0;
  min_loss_ = std::numeric_limits<double>::infinity();
  for (const LossEntry& e : entries_) {
    if (!(e.loss >= 0.0 && e.loss <= 1.0))
      throw DomainError("LossProfile: losses must lie in [0, 1]");
    if (!(e.prior_mass > 0.0 && e.prior_mass <= 1.0))
      throw DomainError("LossProfile: prior masses must lie in (0, 1]");
    if (e.multiplicity < 1) throw DomainError("LossProfile: multiplicity must be >= 1");
    mass += e.prior_mass * static_cast<double>(e.multiplicity);
    hypothesis_count_ += e.multiplicity;
    min_loss_ = std::min(min_loss_, e.loss);
  }
  if (std::abs(mass - 1.0) > kMassRenormTol) {
    std::ostringstream msg;
    msg << "LossProfile: prior masses must sum to 1, got " << mass;
    throw DomainError(msg.str());
  }
  if (mass != 1.0)
    for (LossEntry& e : entries_) e.prior_mass /= mass;
}

LossProfile LossProfile::with_uniform_prior(const std::vector<double>& losses,
                                            std::int64_t n_eff) {
  if (losses.empty()) throw DomainError("LossProfile: at least one loss is required");
  const double mass = 1.0 / static_cast<double>(losses.size());
  std::vector<LossEntry> entries;
  entries.reserve(losses.size());
  for (double loss : losses) entries.push_back({loss, mass, 1});
  return LossProfile(std::move(entries), n_eff);
}

bool LossProfile::has_uniform_prior() const {
  double lo = entries_.front().prior_mass;
  double hi = lo;
  for (const LossEntry& e : entries_) {
    lo = std::min(lo, e.prior_mass);
    hi = std::max(hi, e.prior_mass);
  }
  return hi - lo <= 1e-12 * hi;
}

PosteriorWeights::PosteriorWeights(std::vector<double> weights, const LossProfile& profile)
    : weights_(std::move(weights)) {
  if (weights_.size() != profile.size())
    throw DomainError("PosteriorWeights: weight count must match the profile entry count");
  std::vector<double> masses(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i]))
      throw DomainError("PosteriorWeights: weights must be finite and nonnegative");
    masses[i] = weights_[i] * static_cast<double>(profile.entries()[i].multiplicity);
  }
  const double total = normalized_total(masses, "PosteriorWeights");
  if (total != 1.0)
    for (double& w : weights_) w /= total;
}

PosteriorWeights PosteriorWeights::from_flat(std::vector<double> weights) {
  if (weights.empty()) throw DomainError("PosteriorWeights: at least one weight is required");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw DomainError("PosteriorWeights: weights must be finite and nonnegative");
  std::vector<double> masses = weights;
  const double total = normalized_total(masses, "PosteriorWeights");
  if (total != 1.0)
    for (double& w : weights) w /= total;
  return PosteriorWeights(std::move(weights));
}

PosteriorWeights PosteriorWeights::prior_of(const LossProfile& profile) {
  std::vector<double> weights;
  weights.reserve(profile.size());
  for (const LossEntry& e : profile.entries()) weights.push_back(e.prior_mass);
  return PosteriorWeights(std::move(weights), profile);
}

PosteriorWeights PosteriorWeights::point_mass(const LossProfile& profile,
                                              std::size_t entry_index) {
  if (entry_index >= profile.size())
    throw DomainError("PosteriorWeights::point_mass: entry index out of range");
  if (profile.entries()[entry_index].multiplicity != 1)
    throw DomainError(
        "PosteriorWeights::point_mass: the entry must have multiplicity 1; "
        "a compressed entry cannot carry a single-hypothesis point mass");
  std::vector<double> weights(profile.size(), 0.0);
  weights[entry_index] = 1.0;
  return PosteriorWeights(std::move(weights), profile);
}

BoundConfig::BoundConfig(std::int64_t n_eff_in, double delta_in)
    : n_eff(n_eff_in), delta(delta_in) {
  if (n_eff < 1) throw DomainError("BoundConfig: n_eff must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw DomainError("BoundConfig: delta must lie strictly in (0, 1)");
}

void require_matching_config(const LossProfile& profile, const BoundConfig& cfg) {
  if (cfg.n_eff != profile.n_eff())
    throw DomainError("BoundConfig: n_eff does not match the profile it is used with");
}

double gibbs_loss(const LossProfile& profile, const PosteriorWeights& rho) {
  check_aligned(profile, rho);
  double total = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const LossEntry& e = profile.entries()[i];
    total += rho.weights()[i] * static_cast<double>(e.multiplicity) * e.loss;
  }
  return std::clamp(total, 0.0, 1.0);
}

double gibbs_variance(const LossProfile& profile, const PosteriorWeights& rho) {
  check_aligned(profile, rho);
  double first = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const LossEntry& e = profile.entries()[i];
    const double mass = rho.weights()[i] * static_cast<double>(e.multiplicity);
    first += mass * e.loss;
    second += mass * e.loss * e.loss;
  }
  return std::max(0.0, second - first * first);
}

double kl_posterior_prior(const LossProfile& profile, const PosteriorWeights& rho) {
  check_aligned(profile, rho);
  double total = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const LossEntry& e = profile.entries()[i];
    const double w = rho.weights()[i];
    if (w > 0.0) total += w * static_cast<double>(e.multiplicity) * std::log(w / e.prior_mass);
  }
  return std::max(0.0, total);
}

double confidence_log_term(const BoundConfig& cfg) {
  return std::log(2.0) + 0.5 * std::log(static_cast<double>(cfg.n_eff)) - std::log(cfg.delta);
}

double log_partition(const LossProfile& profile, double scale) {
  double max_arg = -std::numeric_limits<double>::infinity();
  for (const LossEntry& e : profile.entries()) {
    const double arg =
        std::log(e.prior_mass) + std::log(static_cast<double>(e.multiplicity)) - scale * e.loss;
    max_arg = std::max(max_arg, arg);
  }
  double sum = 0.0;
  for (const LossEntry& e : profile.entries()) {
    const double arg =
        std::log(e.prior_mass) + std::log(static_cast<double>(e.multiplicity)) - scale * e.loss;
    sum += std::exp(arg - max_arg);
  }
  return max_arg + std::log(sum);
}

std::vector<double> gibbs_weights(const LossProfile& profile, double scale) {
  const double log_z = log_partition(profile, scale);
  std::vector<double> weights;
  weights.reserve(profile.size());
  for (const LossEntry& e : profile.entries())
    weights.push_back(std::exp(std::log(e.prior_mass) - scale * e.loss - log_z));
  return weights;
}

}  // namespace pbmin
