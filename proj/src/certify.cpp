#include "pbmin/certify.hpp"

#include <cmath>
#include <limits>

#include "pbmin/optimizer.hpp"

namespace pbmin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBaseSplit = 1.0 / 3.0;

void check_certificate_premises(const LossProfile& profile, const BoundConfig& cfg) {
  require_matching_config(profile, cfg);
  if (!profile.has_uniform_prior())
    throw DomainError("counting certificate: the prior must be uniform");
  if (cfg.n_eff < 7)
    throw DomainError(
        "counting certificate: n_eff must be >= 7; use runtime_conditions for smaller samples");
}

std::int64_t count_in_band(const LossProfile& profile, double lower, double upper) {
  const std::vector<double> excess = excess_losses(profile);
  std::int64_t count = 0;
  for (std::size_t i = 0; i < profile.size(); ++i)
    if (excess[i] > lower && excess[i] < upper) count += profile.entries()[i].multiplicity;
  return count;
}

}  // namespace

std::vector<double> excess_losses(const LossProfile& profile) {
  const double lowest = profile.min_loss();
  std::vector<double> excess;
  excess.reserve(profile.size());
  for (const LossEntry& e : profile.entries()) excess.push_back(e.loss - lowest);
  return excess;
}

Certificate tuned_certificate(const LossProfile& profile, const BoundConfig& cfg,
                              double alpha, double beta, bool refine_upper) {
  check_certificate_premises(profile, cfg);
  if (!(alpha >= 0.0) || !(beta >= 0.0))
    throw DomainError("tuned_certificate: alpha and beta must be nonnegative");
  if (alpha + beta > 1.0 + 1e-9)
    throw DomainError("tuned_certificate: alpha + beta must not exceed 1");

  const double n = static_cast<double>(cfg.n_eff);
  const double m = static_cast<double>(profile.hypothesis_count());
  const double log_conf = confidence_log_term(cfg);  // ln(2 sqrt(n)/delta)
  const double log_conf2 = 2.0 * log_conf;           // ln(4n/delta^2)

  const double band_lower = std::sqrt(alpha * log_conf2) / n;
  double band_upper = kInf;
  bool refined = false;
  if (beta > 0.0) {
    band_upper = (std::log(m) + 2.0 * std::log(n) - std::log(beta)) / std::sqrt(n * log_conf);
    if (refine_upper) {
      const double m_n_over_beta = m * n / beta;
      const double log_mn = std::log(m_n_over_beta);
      const double argument = 4.0 * m_n_over_beta * log_mn * log_mn / (log_conf * log_conf2);
      if (m_n_over_beta >= 0.5 && std::log(argument) >= 2.0) {
        band_upper = std::log(argument) / std::sqrt(n * log_conf);
        refined = true;
      }
    }
  }
  const double budget =
      std::exp(2.0) * std::max(0.0, 1.0 - alpha - beta) / 4.0 * log_conf2;

  Certificate cert;
  cert.band_lower = band_lower;
  cert.band_upper = band_upper;
  cert.count_budget = budget;
  cert.mediocre_count = count_in_band(profile, band_lower, band_upper);
  cert.certified = static_cast<double>(cert.mediocre_count) <= budget;
  cert.alpha = alpha;
  cert.beta = beta;
  const bool base_split = alpha == kBaseSplit && beta == kBaseSplit;
  cert.method = refined
                    ? (base_split ? CertificateMethod::refined_upper : CertificateMethod::combined)
                    : (base_split ? CertificateMethod::base_constants
                                  : CertificateMethod::tuned_intervals);
  return cert;
}

Certificate counting_certificate(const LossProfile& profile, const BoundConfig& cfg) {
  return tuned_certificate(profile, cfg, kBaseSplit, kBaseSplit, false);
}

Certificate search_certificate(const LossProfile& profile, const BoundConfig& cfg,
                               int grid_steps) {
  if (grid_steps < 2) throw DomainError("search_certificate: grid_steps must be >= 2");
  check_certificate_premises(profile, cfg);

  std::vector<std::pair<double, double>> candidates;
  candidates.emplace_back(kBaseSplit, kBaseSplit);
  const double step = 1.0 / static_cast<double>(grid_steps - 1);
  for (int i = 0; i < grid_steps; ++i)
    for (int j = 0; j + i < grid_steps; ++j)
      candidates.emplace_back(static_cast<double>(i) * step, static_cast<double>(j) * step);

  bool have_best = false;
  Certificate best;
  double best_ratio = kInf;
  for (const auto& [alpha, beta] : candidates) {
    for (bool refine : {false, true}) {
      const Certificate cert = tuned_certificate(profile, cfg, alpha, beta, refine);
      if (cert.certified) return cert;
      const double ratio = cert.count_budget > 0.0
                               ? static_cast<double>(cert.mediocre_count) / cert.count_budget
                               : kInf;
      if (!have_best || ratio < best_ratio) {
        have_best = true;
        best = cert;
        best_ratio = ratio;
      }
    }
  }
  return best;
}

ConditionReport runtime_conditions(const LossProfile& profile, const BoundConfig& cfg,
                                   const std::vector<double>& lambda_grid) {
  require_matching_config(profile, cfg);
  const double n = static_cast<double>(cfg.n_eff);
  const double log_conf2 = 2.0 * confidence_log_term(cfg);

  ConditionReport report;
  report.lambda_floor = std::sqrt(confidence_log_term(cfg) / n);
  report.rows.reserve(lambda_grid.size());

  bool any_in_range = false;
  bool all_hold = true;
  for (double lambda : lambda_grid) {
    if (!(lambda > 0.0 && lambda <= 1.0))
      throw DomainError("runtime_conditions: the lambda grid must lie in (0, 1]");
    const PosteriorWeights rho = gibbs_posterior(profile, lambda);
    const double mean = gibbs_loss(profile, rho);
    const double variance = gibbs_variance(profile, rho);
    const double kl = kl_posterior_prior(profile, rho);
    ConditionRow row;
    row.lambda = lambda;
    row.kl_condition = 2.0 * kl + log_conf2 > lambda * lambda * n * n * variance;
    row.loss_condition = mean > (1.0 - lambda) * n * variance;
    report.rows.push_back(row);
    if (lambda >= report.lambda_floor - 1e-12) {
      any_in_range = true;
      if (!row.kl_condition && !row.loss_condition) all_hold = false;
    }
  }
  report.certified = any_in_range && all_hold;
  return report;
}

std::pair<LossProfile, BoundConfig> make_nonconvex_example() {
  LossProfile profile({{0.0, 0.5, 1}, {0.5, 0.5, 1}}, 100);
  return {std::move(profile), BoundConfig(100, 0.01)};
}

std::pair<LossProfile, BoundConfig> make_two_minima_example() {
  const std::int64_t m = std::llround(std::exp(14.8)) + 1;  // 0.74 * 200 * 0.1 = 14.8
  const double mass = 1.0 / static_cast<double>(m);
  LossProfile profile({{0.0, mass, 1}, {0.1, mass, m - 1}}, 200);
  return {std::move(profile), BoundConfig(200, 0.25)};
}

}  // namespace pbmin
