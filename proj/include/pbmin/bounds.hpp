#pragma once

#include "pbmin/core.hpp"

namespace pbmin {

// PAC-Bayes-lambda bound split into its two terms.  value may exceed 1;
// vacuous bounds are reported, not clipped.
struct BoundValue {
  double value = 0.0;
  double gibbs_loss_term = 0.0;
  double complexity_term = 0.0;
};

struct GibbsBoundCurvature {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
};

// kl(p || q) between Bernoulli biases, with 0 ln 0 = 0.  +infinity when q is
// 0 or 1 and p differs.  Arguments outside [0, 1] are rejected.
double binary_kl(double p, double q);

// Largest q in [p_hat, 1) with binary_kl(p_hat, q) <= eps, found by bisection
// on [p_hat, 1 - 1e-15] to absolute tolerance tol (200 iterations cap).
// Returns 1 only when the budget is infinite or p_hat = 1; never above 1.
double kl_inverse_upper(double p_hat, double eps, double tol = 1e-12);

// PAC-Bayes-kl bound on the expected loss of the randomized classifier:
// inverts kl(E_rho[loss] || .) at budget (KL(rho||prior) + ln(2 sqrt(n)/delta)) / n.
double pac_bayes_kl_bound(const LossProfile& profile, const PosteriorWeights& rho,
                          const BoundConfig& cfg);

// PAC-Bayes-lambda bound for lambda in (0, 2):
//   E_rho[loss] / (1 - lambda/2)
//   + (KL(rho||prior) + ln(2 sqrt(n)/delta)) / (lambda (1 - lambda/2) n).
BoundValue pac_bayes_lambda_bound(const LossProfile& profile, const PosteriorWeights& rho,
                                  double lambda, const BoundConfig& cfg);

// Tightest risk bound implied by the square-root relaxation
//   risk - E_rho[loss] <= sqrt(2 risk (KL + ln(2 sqrt(n)/delta)) / n),
// i.e. the larger root of the quadratic in sqrt(risk).  Sits between the
// PAC-Bayes-kl bound and the lambda bound at any lambda.
double pinsker_sqrt_bound(const LossProfile& profile, const PosteriorWeights& rho,
                          const BoundConfig& cfg);

// The same quadratic solution from raw terms: p_hat = E_rho[loss] and
// c = (KL + ln(2 sqrt(n)/delta)) / n.
double pinsker_sqrt_bound_terms(double p_hat, double c);

// PAC-Bayes-lambda bound evaluated at the Gibbs posterior for this lambda,
// reduced to a function of lambda alone:
//   (-ln E_prior[e^{-n lambda loss}] + ln(2 sqrt(n)/delta)) / (n lambda (1 - lambda/2)).
double gibbs_bound(const LossProfile& profile, double lambda, const BoundConfig& cfg);

// Analytic value, first and second derivative of gibbs_bound in lambda,
// assembled from the product decomposition F = f * g with
//   f(lambda)  = lambda E_rho[loss] + (KL + ln(2 sqrt(n)/delta)) / n,
//   f'         = E_rho[loss],     f'' = -n Var_rho[loss],
//   g(lambda)  = 1 / (lambda (1 - lambda/2)),
// where rho is the Gibbs posterior at lambda.
GibbsBoundCurvature gibbs_bound_derivatives(const LossProfile& profile, double lambda,
                                            const BoundConfig& cfg);

}  // namespace pbmin
