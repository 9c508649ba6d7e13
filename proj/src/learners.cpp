#include "pbmin/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "pbmin/rng.hpp"

namespace pbmin {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double squared = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    squared += diff * diff;
  }
  return std::exp(-gamma * squared);
}

std::string majority_label(const std::vector<std::string>& labels) {
  if (labels.empty()) throw DomainError("majority_label: no labels");
  std::map<std::string, std::int64_t> counts;
  for (const std::string& label : labels) ++counts[label];
  std::string best = counts.begin()->first;
  std::int64_t best_count = counts.begin()->second;
  for (const auto& [label, count] : counts) {
    if (count > best_count) {  // map order is ascending, so ties keep the first label
      best = label;
      best_count = count;
    }
  }
  return best;
}

std::vector<double> jaakkola_grid(const Dataset& data) {
  if (data.label_set().size() < 2)
    throw DomainError("jaakkola_grid: the data must contain at least two classes");
  const std::int64_t n = data.n();
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (std::int64_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t j = 0; j < n; ++j) {
      if (data.labels()[i] == data.labels()[j]) continue;
      double squared = 0.0;
      for (int k = 0; k < data.d(); ++k) {
        const double diff = data.points()[i][k] - data.points()[j][k];
        squared += diff * diff;
      }
      best = std::min(best, squared);
    }
    nearest[i] = std::sqrt(best);
  }
  std::sort(nearest.begin(), nearest.end());
  const std::size_t half = nearest.size() / 2;
  const double median = nearest.size() % 2 == 1
                            ? nearest[half]
                            : 0.5 * (nearest[half - 1] + nearest[half]);
  if (!(median > 0.0))
    throw DomainError(
        "jaakkola_grid: the median opposite-class distance is zero (duplicate points with "
        "conflicting labels); deduplicate the data or pass a fixed gamma instead");
  const double seed_gamma = 1.0 / (2.0 * median * median);
  return {seed_gamma * 1e-4, seed_gamma * 1e-2, seed_gamma, seed_gamma * 1e2, seed_gamma * 1e4};
}

namespace {

TrainedClassifier fit_kernel_perceptron(const LearnerSpec& spec,
                                        const std::vector<std::vector<double>>& points,
                                        const std::vector<std::string>& labels,
                                        const std::vector<std::string>& label_set,
                                        std::uint64_t stream_seed) {
  if (label_set.size() > 2)
    throw DomainError("kernel perceptron: only binary labels are supported");
  if (spec.epochs < 1) throw DomainError("kernel perceptron: epochs must be >= 1");

  double gamma = spec.gamma.fixed_gamma;
  if (spec.gamma.randomized) {
    if (spec.gamma.grid.empty())
      throw DomainError("kernel perceptron: the gamma grid must not be empty");
    RandomStream stream(stream_seed);
    gamma = spec.gamma.grid[stream.next_below(spec.gamma.grid.size())];
  }
  if (!(gamma > 0.0)) throw DomainError("kernel perceptron: gamma must be positive");

  const std::string& negative = label_set[0];
  const std::string& positive = label_set[1];
  const std::size_t r = points.size();
  std::vector<int> signs(r);
  for (std::size_t i = 0; i < r; ++i) signs[i] = labels[i] == positive ? 1 : -1;

  std::vector<std::vector<double>> kernel(r, std::vector<double>(r));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      kernel[i][j] = kernel[j][i] = rbf_kernel(points[i], points[j], gamma);

  std::vector<double> alphas(r, 0.0);
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    bool mistake = false;
    for (std::size_t i = 0; i < r; ++i) {
      double score = 0.0;
      for (std::size_t j = 0; j < r; ++j) score += alphas[j] * signs[j] * kernel[j][i];
      const int predicted = score > 0.0 ? 1 : -1;  // zero score maps to the first label
      if (predicted != signs[i]) {
        alphas[i] += 1.0;
        mistake = true;
      }
    }
    if (!mistake) break;  // remaining passes would be no-ops
  }

  TrainedClassifier clf;
  clf.dim = static_cast<int>(points.front().size());
  clf.model = KernelPerceptronModel{gamma, points, labels, std::move(alphas), negative, positive};
  return clf;
}

TrainedClassifier fit_stump(const std::vector<std::vector<double>>& points,
                            const std::vector<std::string>& labels) {
  const std::size_t r = points.size();
  const int d = static_cast<int>(points.front().size());

  std::int64_t best_errors = std::numeric_limits<std::int64_t>::max();
  StumpModel best;
  bool found = false;

  for (int feature = 0; feature < d; ++feature) {
    std::set<double> distinct;
    for (const auto& p : points) distinct.insert(p[feature]);
    if (distinct.size() < 2) continue;
    std::vector<double> sorted(distinct.begin(), distinct.end());
    for (std::size_t t = 0; t + 1 < sorted.size(); ++t) {
      const double threshold = 0.5 * (sorted[t] + sorted[t + 1]);
      std::vector<std::string> below;
      std::vector<std::string> above;
      for (std::size_t i = 0; i < r; ++i)
        (points[i][feature] <= threshold ? below : above).push_back(labels[i]);
      const std::string below_label = majority_label(below);
      const std::string above_label = majority_label(above);
      std::int64_t errors = 0;
      for (std::size_t i = 0; i < r; ++i) {
        const std::string& predicted =
            points[i][feature] <= threshold ? below_label : above_label;
        if (predicted != labels[i]) ++errors;
      }
      if (errors < best_errors) {  // strict: ties keep the lowest feature, lowest threshold
        best_errors = errors;
        best = {feature, threshold, below_label, above_label};
        found = true;
      }
    }
  }

  TrainedClassifier clf;
  clf.dim = d;
  if (!found)
    clf.model = ConstantModel{majority_label(labels)};  // all features constant
  else
    clf.model = best;
  return clf;
}

}  // namespace

TrainedClassifier fit(const LearnerSpec& spec, const std::vector<std::vector<double>>& points,
                      const std::vector<std::string>& labels, std::uint64_t stream_seed) {
  if (points.empty()) throw DomainError("fit: the training set must not be empty");
  if (points.size() != labels.size())
    throw DomainError("fit: points and labels must have equal length");
  const std::size_t dim = points.front().size();
  for (const auto& p : points)
    if (p.size() != dim) throw DomainError("fit: inconsistent feature dimensions");

  std::vector<std::string> label_set(labels.begin(), labels.end());
  std::sort(label_set.begin(), label_set.end());
  label_set.erase(std::unique(label_set.begin(), label_set.end()), label_set.end());

  if (label_set.size() == 1 || spec.kind == LearnerKind::constant) {
    TrainedClassifier clf;
    clf.dim = static_cast<int>(dim);
    clf.model = ConstantModel{majority_label(labels)};
    return clf;
  }

  switch (spec.kind) {
    case LearnerKind::kernel_perceptron:
      return fit_kernel_perceptron(spec, points, labels, label_set, stream_seed);
    case LearnerKind::stump:
      return fit_stump(points, labels);
    default:
      throw DomainError("fit: unknown learner kind");
  }
}

std::string predict_label(const TrainedClassifier& clf, std::span<const double> point) {
  if (static_cast<int>(point.size()) != clf.dim)
    throw DomainError("predict_label: point dimension does not match the classifier");
  if (const auto* constant = std::get_if<ConstantModel>(&clf.model)) return constant->label;
  if (const auto* stump = std::get_if<StumpModel>(&clf.model))
    return point[stump->feature] <= stump->threshold ? stump->below_label : stump->above_label;
  const auto& kp = std::get<KernelPerceptronModel>(clf.model);
  double score = 0.0;
  for (std::size_t i = 0; i < kp.points.size(); ++i) {
    if (kp.alphas[i] == 0.0) continue;
    const double sign = kp.labels[i] == kp.positive_label ? 1.0 : -1.0;
    score += kp.alphas[i] * sign * rbf_kernel(kp.points[i], point, kp.gamma);
  }
  return score > 0.0 ? kp.positive_label : kp.negative_label;
}

}  // namespace pbmin
