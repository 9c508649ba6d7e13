#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pbmin/core.hpp"

namespace pbmin {

enum class CertificateMethod {
  base_constants,   // fixed interval constants (the alpha = beta = 1/3 split)
  tuned_intervals,  // caller-chosen (alpha, beta) interval split
  refined_upper,    // alpha = beta = 1/3 with the tightened upper edge
  combined,         // tuned split with the tightened upper edge
};

// Counting certificate of strong quasiconvexity for the one-dimensional bound
// curve.  Hypotheses are split by excess loss x = loss - min loss into good
// (x <= band_lower), mediocre (band_lower < x < band_upper, open interval) and
// bad (x >= band_upper); certification holds when the mediocre count stays
// within count_budget.  band_upper above 1 is vacuous since losses never
// exceed 1, and is reported as +infinity when beta = 0.
struct Certificate {
  bool certified = false;
  CertificateMethod method = CertificateMethod::base_constants;
  double band_lower = 0.0;         // a
  double band_upper = 0.0;         // b, may be +infinity
  double count_budget = 0.0;       // K
  std::int64_t mediocre_count = 0;
  double alpha = 0.0;
  double beta = 0.0;
};

struct ConditionRow {
  double lambda = 0.0;
  bool kl_condition = false;    // 2 KL + ln(4n/delta^2) > lambda^2 n^2 Var
  bool loss_condition = false;  // E > (1 - lambda) n Var
};

// Per-grid-point curvature conditions under the Gibbs posterior.  certified
// is true when at least one condition holds at every grid point inside
// [lambda_floor, 1], the range where stationary points can live; a grid with
// no point in that range is never certified.
struct ConditionReport {
  std::vector<ConditionRow> rows;
  double lambda_floor = 0.0;  // sqrt(ln(2 sqrt(n)/delta) / n)
  bool certified = false;
};

// Excess losses x = loss - min loss, aligned with profile entries
// (multiplicity compression is preserved).  Minimum over the output is 0.
std::vector<double> excess_losses(const LossProfile& profile);

// Certificate with the fixed constants
//   a = sqrt(ln(4n/delta^2)) / (n sqrt(3)),
//   b = ln(3 m n^2) / sqrt(n ln(2 sqrt(n)/delta)),
//   K = (e^2 / 12) ln(4n/delta^2).
// Requires a uniform prior and n_eff >= 7 (use runtime_conditions below that).
Certificate counting_certificate(const LossProfile& profile, const BoundConfig& cfg);

// Generalized certificate with caller-chosen interval weights alpha, beta >= 0,
// alpha + beta <= 1:
//   a(alpha) = sqrt(alpha ln(4n/delta^2)) / n,
//   b(beta)  = ln(m n^2 / beta) / sqrt(n ln(2 sqrt(n)/delta)),
//   K        = (e^2 (1 - alpha - beta) / 4) ln(4n/delta^2).
// With refine_upper, b is replaced by the tightened
//   ln((4 m n / beta) ln(m n / beta)^2 / (ln(2 sqrt(n)/delta) ln(4n/delta^2)))
//     / sqrt(n ln(2 sqrt(n)/delta))
// whenever its side conditions hold (log argument >= e^2 and m n / beta >= 0.5);
// otherwise the unrefined b is kept.
Certificate tuned_certificate(const LossProfile& profile, const BoundConfig& cfg,
                              double alpha, double beta, bool refine_upper);

// Scans (alpha, beta) over a simplex grid (the base 1/3, 1/3 split first, then
// grid_steps x grid_steps points with step 1/(grid_steps - 1)), each with and
// without the refined upper edge.  Returns the first certifying witness in
// grid order, or the non-certifying witness with the lowest count/budget ratio.
Certificate search_certificate(const LossProfile& profile, const BoundConfig& cfg,
                               int grid_steps = 21);

// Evaluates the two curvature conditions at every grid point; the grid must
// lie in (0, 1].
ConditionReport runtime_conditions(const LossProfile& profile, const BoundConfig& cfg,
                                   const std::vector<double>& lambda_grid);

// Two hypotheses with losses {0, 0.5}, uniform prior, n = 100, delta = 0.01:
// the bound curve is non-convex in lambda yet still has a single minimum.
std::pair<LossProfile, BoundConfig> make_nonconvex_example();

// One loss-0 hypothesis plus m - 1 hypotheses at loss 0.1 with
// m = round(e^{14.8}) + 1 = 2,676,446, uniform prior, n = 200, delta = 0.25:
// the bound curve has two local minima on (0, 1].  Stored with multiplicity
// compression, so evaluation cost does not depend on m.
std::pair<LossProfile, BoundConfig> make_two_minima_example();

}  // namespace pbmin
