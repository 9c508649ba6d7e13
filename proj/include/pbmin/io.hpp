#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pbmin/core.hpp"
#include "pbmin/dataset.hpp"
#include "pbmin/ensemble.hpp"

namespace pbmin {

enum class DatasetFormat { svmlight, csv };

// svmlight lines are "label idx:val idx:val ..." with 1-based strictly
// ascending indices; missing features read as 0 and the dimension is the
// largest index seen.  Numeric labels are canonicalized ("+1" and "1" agree).
// csv needs a header row with exactly one "label" column; all other columns
// are numeric features.  NaN or infinite features are rejected.  Parse errors
// carry the offending line number.
Dataset parse_dataset(const std::string& path, DatasetFormat format);
Dataset parse_dataset_stream(std::istream& in, DatasetFormat format, const std::string& origin);

void write_dataset(const std::string& path, const Dataset& data, DatasetFormat format);
void write_dataset_stream(std::ostream& out, const Dataset& data, DatasetFormat format);

// Losses file: one "loss[,multiplicity[,prior_mass]]" row per entry.  Rows
// must all use the same number of columns; without prior_mass the prior is
// uniform over hypotheses.
LossProfile parse_losses_file(const std::string& path, std::int64_t n_eff);
LossProfile parse_losses_stream(std::istream& in, std::int64_t n_eff, const std::string& origin);

// Shortest round-trip decimal form of a double.
std::string format_double(double value);

// Everything a trained run needs for later prediction and bound reporting.
// Self-contained: prediction never touches the training data again.
struct TrainedModel {
  HypothesisEnsemble ensemble;
  std::vector<double> posterior;  // per hypothesis, sums to 1
  double lambda = 0.0;
  double pb_lambda_bound = 0.0;
  double pb_kl_bound = 0.0;
  double delta = 0.05;
  std::uint64_t seed = 0;
  std::string prior_kind = "uniform";
};

// Versioned self-describing JSON object format.  Writing is byte-deterministic
// for identical models; reading validates the version and that posterior
// weights sum to 1 within 1e-9.
void write_model(const std::string& path, const TrainedModel& model);
TrainedModel read_model(const std::string& path);

std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(const std::string& text, const std::string& origin);

}  // namespace pbmin
