#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pbmin/dataset.hpp"

namespace pbmin {

enum class LearnerKind { kernel_perceptron, stump, constant };

// Kernel bandwidth selection: a fixed value, or one value drawn per training
// call from a grid.  The draw is seeded by the per-subset stream passed to
// fit, so it never depends on label values.
struct GammaPolicy {
  bool randomized = false;
  double fixed_gamma = 1.0;
  std::vector<double> grid;

  static GammaPolicy fixed(double gamma) { return {false, gamma, {}}; }
  static GammaPolicy from_grid(std::vector<double> grid_values) {
    return {true, 1.0, std::move(grid_values)};
  }
};

struct LearnerSpec {
  LearnerKind kind = LearnerKind::kernel_perceptron;
  GammaPolicy gamma = GammaPolicy::fixed(1.0);
  int epochs = 50;  // kernel perceptron passes over the training set
};

// Dual-form RBF kernel perceptron.  Prediction is the sign of
// sum_i alphas[i] y_i exp(-gamma ||x_i - x||^2) with y_i = +1 for
// positive_label and -1 otherwise; a zero score maps to negative_label
// (the label ordered first).
struct KernelPerceptronModel {
  double gamma = 1.0;
  std::vector<std::vector<double>> points;
  std::vector<std::string> labels;
  std::vector<double> alphas;
  std::string negative_label;
  std::string positive_label;
};

// Axis-aligned threshold: feature value <= threshold predicts below_label.
struct StumpModel {
  int feature = 0;
  double threshold = 0.0;
  std::string below_label;
  std::string above_label;
};

struct ConstantModel {
  std::string label;
};

// Self-contained trained classifier; prediction needs nothing beyond this
// record, so it can be serialized into a model file and reloaded.
struct TrainedClassifier {
  int dim = 0;
  std::variant<KernelPerceptronModel, StumpModel, ConstantModel> model;

  LearnerKind kind() const {
    if (std::holds_alternative<KernelPerceptronModel>(model)) return LearnerKind::kernel_perceptron;
    if (std::holds_alternative<StumpModel>(model)) return LearnerKind::stump;
    return LearnerKind::constant;
  }
};

// Bandwidth grid from the nearest-opposite-label-distance heuristic: with
// G(x_i) = min over opposite-label points of ||x_i - x_j|| and
// gamma_seed = 1 / (2 median(G)^2), returns the geometric grid
// gamma_seed * {1e-4, 1e-2, 1, 1e2, 1e4}, ascending.  Rejects single-class
// data and a zero median (duplicate points with conflicting labels).
std::vector<double> jaakkola_grid(const Dataset& data);

// Trains one classifier.  Single-class input falls back to a constant
// classifier for every learner kind; the kernel perceptron rejects more than
// two classes.  Deterministic given (spec, points, labels, stream_seed).
TrainedClassifier fit(const LearnerSpec& spec, const std::vector<std::vector<double>>& points,
                      const std::vector<std::string>& labels, std::uint64_t stream_seed);

// Pure deterministic prediction; rejects a dimension mismatch.
std::string predict_label(const TrainedClassifier& clf, std::span<const double> point);

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

// Most frequent label, ties broken by ascending label order.
std::string majority_label(const std::vector<std::string>& labels);

}  // namespace pbmin
