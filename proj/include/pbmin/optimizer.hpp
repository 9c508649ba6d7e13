#pragma once

#include <cstdint>
#include <vector>

#include "pbmin/bounds.hpp"
#include "pbmin/core.hpp"

namespace pbmin {

struct TraceIteration {
  double lambda = 0.0;
  double bound = 0.0;
  double gibbs_loss = 0.0;
  double kl = 0.0;
};

// History of alternating minimization.  Bound values are non-increasing along
// iterations and every lambda lies in (0, 1].
struct OptimizationTrace {
  std::vector<TraceIteration> iterations;
  bool converged = false;
  PosteriorWeights final_posterior;

  double final_lambda() const { return iterations.back().lambda; }
  double final_bound() const { return iterations.back().bound; }
};

struct LambdaScan {
  std::vector<double> grid;             // strictly increasing
  std::vector<double> values;           // gibbs_bound at each grid point
  std::vector<std::size_t> local_minima;  // first index of each minimal plateau
};

// Closed-form minimizer of the lambda bound over posteriors at fixed
// lambda >= 0: weights proportional to prior * e^{-lambda n_eff loss}.
PosteriorWeights gibbs_posterior(const LossProfile& profile, double lambda);

// Closed-form minimizer of the lambda bound over lambda at fixed posterior:
//   2 / (sqrt(2 n gibbs_loss / complexity + 1) + 1),
// where complexity = KL(rho||prior) + ln(2 sqrt(n)/delta) must be positive.
// Result is in (0, 1]; it equals 1 exactly when gibbs_loss is 0.
double optimal_lambda(double gibbs_loss, double complexity, std::int64_t n_eff);

// Alternating minimization: start from rho = prior, repeat (lambda update,
// posterior update) until the bound decrease falls below cfg.tol_bound or
// cfg.max_iters is reached.  Each half step is an exact coordinate minimum,
// so the bound decreases monotonically.
OptimizationTrace alternate_minimize(const LossProfile& profile, const BoundConfig& cfg);

// Discrete local minima of a value sequence.  Runs of equal values coalesce
// into a single candidate reported at the run's first index; a boundary run
// counts when its one interior neighbor is strictly higher.
std::vector<std::size_t> discrete_local_minima(const std::vector<double>& values);

// Evaluates gibbs_bound on the uniform grid { j * lambda_max / grid_size :
// j = 1..grid_size } and reports all discrete local minima.
LambdaScan scan_lambda(const LossProfile& profile, const BoundConfig& cfg,
                       std::int64_t grid_size, double lambda_max);

}  // namespace pbmin
