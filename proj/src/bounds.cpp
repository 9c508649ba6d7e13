#include "pbmin/bounds.hpp"

#include <cmath>
#include <limits>

namespace pbmin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 2.0))
    throw DomainError("lambda must lie strictly in (0, 2)");
}

}  // namespace

double binary_kl(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0))
    throw DomainError("binary_kl: both arguments must lie in [0, 1]");
  auto term = [](double a, double b) {
    if (a == 0.0) return 0.0;
    if (b == 0.0) return kInf;
    return a * std::log(a / b);
  };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

double kl_inverse_upper(double p_hat, double eps, double tol) {
  if (!(p_hat >= 0.0 && p_hat <= 1.0))
    throw DomainError("kl_inverse_upper: p_hat must lie in [0, 1]");
  if (std::isnan(eps) || eps < 0.0)
    throw DomainError("kl_inverse_upper: eps must be nonnegative");
  if (!(tol > 0.0)) throw DomainError("kl_inverse_upper: tol must be positive");
  if (eps == 0.0) return p_hat;
  if (p_hat >= 1.0) return 1.0;
  if (std::isinf(eps)) return 1.0;

  double lo = p_hat;                 // kl(p_hat, lo) = 0 <= eps
  double hi = 1.0 - 1e-15;
  if (lo >= hi) return p_hat;        // p_hat within an ulp of 1
  if (binary_kl(p_hat, hi) <= eps) return hi;
  for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (binary_kl(p_hat, mid) <= eps)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double pac_bayes_kl_bound(const LossProfile& profile, const PosteriorWeights& rho,
                          const BoundConfig& cfg) {
  require_matching_config(profile, cfg);
  const double p_hat = gibbs_loss(profile, rho);
  const double eps = (kl_posterior_prior(profile, rho) + confidence_log_term(cfg)) /
                     static_cast<double>(cfg.n_eff);
  return kl_inverse_upper(p_hat, eps);
}

BoundValue pac_bayes_lambda_bound(const LossProfile& profile, const PosteriorWeights& rho,
                                  double lambda, const BoundConfig& cfg) {
  require_matching_config(profile, cfg);
  check_lambda(lambda);
  const double half_slack = 1.0 - lambda / 2.0;
  const double gibbs_term = gibbs_loss(profile, rho) / half_slack;
  const double complexity_term =
      (kl_posterior_prior(profile, rho) + confidence_log_term(cfg)) /
      (lambda * half_slack * static_cast<double>(cfg.n_eff));
  return {gibbs_term + complexity_term, gibbs_term, complexity_term};
}

double pinsker_sqrt_bound_terms(double p_hat, double c) {
  if (!(p_hat >= 0.0 && p_hat <= 1.0))
    throw DomainError("pinsker_sqrt_bound_terms: p_hat must lie in [0, 1]");
  if (!(c >= 0.0)) throw DomainError("pinsker_sqrt_bound_terms: c must be nonnegative");
  const double root = 0.5 * (std::sqrt(2.0 * c) + std::sqrt(2.0 * c + 4.0 * p_hat));
  return root * root;
}

double pinsker_sqrt_bound(const LossProfile& profile, const PosteriorWeights& rho,
                          const BoundConfig& cfg) {
  require_matching_config(profile, cfg);
  const double c = (kl_posterior_prior(profile, rho) + confidence_log_term(cfg)) /
                   static_cast<double>(cfg.n_eff);
  return pinsker_sqrt_bound_terms(gibbs_loss(profile, rho), c);
}

double gibbs_bound(const LossProfile& profile, double lambda, const BoundConfig& cfg) {
  require_matching_config(profile, cfg);
  check_lambda(lambda);
  const double n = static_cast<double>(cfg.n_eff);
  const double log_z = log_partition(profile, lambda * n);
  return (-log_z + confidence_log_term(cfg)) / (n * lambda * (1.0 - lambda / 2.0));
}

GibbsBoundCurvature gibbs_bound_derivatives(const LossProfile& profile, double lambda,
                                            const BoundConfig& cfg) {
  require_matching_config(profile, cfg);
  check_lambda(lambda);
  const double n = static_cast<double>(cfg.n_eff);
  const PosteriorWeights rho(gibbs_weights(profile, lambda * n), profile);
  const double mean = gibbs_loss(profile, rho);
  const double variance = gibbs_variance(profile, rho);
  const double kl = kl_posterior_prior(profile, rho);

  const double f = lambda * mean + (kl + confidence_log_term(cfg)) / n;
  const double f1 = mean;
  const double f2 = -n * variance;

  const double half_slack = 1.0 - lambda / 2.0;
  const double g = 1.0 / (lambda * half_slack);
  const double g1 = (lambda - 1.0) / ((lambda * half_slack) * (lambda * half_slack));
  const double g2 = (3.0 * (lambda - 1.0) * (lambda - 1.0) + 1.0) /
                    (2.0 * lambda * lambda * lambda * half_slack * half_slack * half_slack);

  return {f * g, f1 * g + g1 * f, f2 * g + 2.0 * f1 * g1 + g2 * f};
}

}  // namespace pbmin
