#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pbmin/errors.hpp"

namespace pbmin {

// Labeled points with a fixed feature dimension.  Features must be finite;
// labels are opaque strings ordered lexicographically wherever a total order
// on labels is needed (tie-breaking, sign conventions).
class Dataset {
 public:
  Dataset(std::vector<std::vector<double>> points, std::vector<std::string> labels)
      : points_(std::move(points)), labels_(std::move(labels)) {
    if (points_.empty()) throw DomainError("Dataset: at least one point is required");
    if (points_.size() != labels_.size())
      throw DomainError("Dataset: points and labels must have equal length");
    d_ = static_cast<int>(points_.front().size());
    if (d_ < 1) throw DomainError("Dataset: points must have at least one feature");
    for (const auto& p : points_) {
      if (static_cast<int>(p.size()) != d_)
        throw DomainError("Dataset: inconsistent feature dimensions");
      for (double v : p)
        if (!std::isfinite(v)) throw DomainError("Dataset: features must be finite");
    }
    for (const std::string& label : labels_)
      if (label.empty()) throw DomainError("Dataset: labels must not be empty");
    label_set_ = labels_;
    std::sort(label_set_.begin(), label_set_.end());
    label_set_.erase(std::unique(label_set_.begin(), label_set_.end()), label_set_.end());
  }

  std::int64_t n() const { return static_cast<std::int64_t>(points_.size()); }
  int d() const { return d_; }
  const std::vector<std::vector<double>>& points() const { return points_; }
  const std::vector<std::string>& labels() const { return labels_; }

  // Sorted unique labels.
  const std::vector<std::string>& label_set() const { return label_set_; }

 private:
  std::vector<std::vector<double>> points_;
  std::vector<std::string> labels_;
  std::vector<std::string> label_set_;
  int d_ = 0;
};

}  // namespace pbmin
