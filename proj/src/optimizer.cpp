#include "pbmin/optimizer.hpp"

#include <cmath>
#include <limits>

#include "pbmin/parallel.hpp"

namespace pbmin {

PosteriorWeights gibbs_posterior(const LossProfile& profile, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("gibbs_posterior: lambda must be nonnegative");
  return PosteriorWeights(gibbs_weights(profile, lambda * static_cast<double>(profile.n_eff())),
                          profile);
}

double optimal_lambda(double gibbs_loss, double complexity, std::int64_t n_eff) {
  if (!(gibbs_loss >= 0.0 && gibbs_loss <= 1.0))
    throw DomainError("optimal_lambda: gibbs_loss must lie in [0, 1]");
  if (!(complexity > 0.0)) throw DomainError("optimal_lambda: complexity must be positive");
  if (n_eff < 1) throw DomainError("optimal_lambda: n_eff must be >= 1");
  const double ratio = 2.0 * static_cast<double>(n_eff) * gibbs_loss / complexity;
  return 2.0 / (std::sqrt(ratio + 1.0) + 1.0);
}

OptimizationTrace alternate_minimize(const LossProfile& profile, const BoundConfig& cfg) {
  require_matching_config(profile, cfg);
  const double confidence = confidence_log_term(cfg);

  PosteriorWeights rho = PosteriorWeights::prior_of(profile);
  std::vector<TraceIteration> iterations;
  bool converged = false;
  double previous = std::numeric_limits<double>::infinity();

  for (std::int64_t iter = 0; iter < cfg.max_iters; ++iter) {
    const double lambda =
        optimal_lambda(gibbs_loss(profile, rho), kl_posterior_prior(profile, rho) + confidence,
                       cfg.n_eff);
    rho = gibbs_posterior(profile, lambda);
    const BoundValue bound = pac_bayes_lambda_bound(profile, rho, lambda, cfg);
    iterations.push_back(
        {lambda, bound.value, gibbs_loss(profile, rho), kl_posterior_prior(profile, rho)});
    if (previous - bound.value < cfg.tol_bound) {
      converged = true;
      break;
    }
    previous = bound.value;
  }

  return {std::move(iterations), converged, std::move(rho)};
}

std::vector<std::size_t> discrete_local_minima(const std::vector<double>& values) {
  std::vector<std::size_t> minima;
  const std::size_t count = values.size();
  std::size_t i = 0;
  while (i < count) {
    std::size_t j = i;
    while (j + 1 < count && values[j + 1] == values[i]) ++j;  // plateau [i, j]
    const bool left_higher = i == 0 || values[i - 1] > values[i];
    const bool right_higher = j == count - 1 || values[j + 1] > values[j];
    if (left_higher && right_higher) minima.push_back(i);
    i = j + 1;
  }
  return minima;
}

LambdaScan scan_lambda(const LossProfile& profile, const BoundConfig& cfg,
                       std::int64_t grid_size, double lambda_max) {
  require_matching_config(profile, cfg);
  if (grid_size < 3) throw DomainError("scan_lambda: grid_size must be >= 3");
  if (!(lambda_max > 0.0 && lambda_max < 2.0))
    throw DomainError("scan_lambda: lambda_max must lie in (0, 2)");

  LambdaScan scan;
  scan.grid.resize(grid_size);
  scan.values.resize(grid_size);
  for (std::int64_t j = 0; j < grid_size; ++j)
    scan.grid[j] = lambda_max * static_cast<double>(j + 1) / static_cast<double>(grid_size);
  parallel_for(static_cast<std::size_t>(grid_size), [&](std::size_t j) {
    scan.values[j] = gibbs_bound(profile, scan.grid[j], cfg);
  });
  scan.local_minima = discrete_local_minima(scan.values);
  return scan;
}

}  // namespace pbmin
