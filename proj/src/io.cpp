#include "pbmin/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pbmin {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& origin, std::int64_t line, const std::string& what) {
  std::ostringstream msg;
  msg << origin << ":" << line << ": " << what;
  throw DataError(msg.str());
}

std::string trim(const std::string& s) {
  std::size_t first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  std::size_t last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.push_back("");
  return fields;
}

bool parse_full_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  // std::from_chars rejects a leading '+', which svmlight labels use
  const char* start = (*begin == '+') ? begin + 1 : begin;
  if (start == end) return false;
  auto [ptr, ec] = std::from_chars(start, end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_full_int(const std::string& text, std::int64_t& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

Dataset parse_svmlight(std::istream& in, const std::string& origin) {
  std::vector<std::vector<std::pair<std::int64_t, double>>> sparse_rows;
  std::vector<std::string> labels;
  std::int64_t max_index = 0;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    std::istringstream row(trimmed);
    std::string token;
    row >> token;
    double label_value = 0.0;
    if (!parse_full_double(token, label_value) || !std::isfinite(label_value))
      parse_fail(origin, line_no, "expected a numeric label, got '" + token + "'");
    labels.push_back(format_double(label_value));

    std::vector<std::pair<std::int64_t, double>> features;
    std::int64_t previous_index = 0;
    while (row >> token) {
      const std::size_t colon = token.find(':');
      if (colon == std::string::npos)
        parse_fail(origin, line_no, "expected 'index:value', got '" + token + "'");
      std::int64_t index = 0;
      double value = 0.0;
      if (!parse_full_int(token.substr(0, colon), index) || index < 1)
        parse_fail(origin, line_no, "feature indices must be integers >= 1");
      if (index <= previous_index)
        parse_fail(origin, line_no, "feature indices must be strictly ascending");
      if (!parse_full_double(token.substr(colon + 1), value))
        parse_fail(origin, line_no, "bad feature value in '" + token + "'");
      if (!std::isfinite(value))
        parse_fail(origin, line_no, "features must be finite");
      previous_index = index;
      features.emplace_back(index, value);
      max_index = std::max(max_index, index);
    }
    sparse_rows.push_back(std::move(features));
  }
  if (sparse_rows.empty()) throw DataError(origin + ": the file contains no data points");
  if (max_index == 0) throw DataError(origin + ": no features found in any line");

  std::vector<std::vector<double>> points(sparse_rows.size(),
                                          std::vector<double>(max_index, 0.0));
  for (std::size_t i = 0; i < sparse_rows.size(); ++i)
    for (const auto& [index, value] : sparse_rows[i])
      points[i][static_cast<std::size_t>(index - 1)] = value;
  return Dataset(std::move(points), std::move(labels));
}

Dataset parse_csv(std::istream& in, const std::string& origin) {
  std::string line;
  std::int64_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(origin + ": the file is empty");
  ++line_no;
  const std::vector<std::string> header = split(line, ',');
  std::ptrdiff_t label_column = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (trim(header[c]) == "label") {
      if (label_column >= 0) parse_fail(origin, line_no, "more than one 'label' column");
      label_column = static_cast<std::ptrdiff_t>(c);
    }
  }
  if (label_column < 0) parse_fail(origin, line_no, "the header must contain a 'label' column");
  if (header.size() < 2) parse_fail(origin, line_no, "at least one feature column is required");

  std::vector<std::vector<double>> points;
  std::vector<std::string> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() != header.size())
      parse_fail(origin, line_no, "wrong number of columns");
    std::vector<double> point;
    point.reserve(header.size() - 1);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (static_cast<std::ptrdiff_t>(c) == label_column) {
        const std::string label = trim(fields[c]);
        if (label.empty()) parse_fail(origin, line_no, "empty label");
        labels.push_back(label);
        continue;
      }
      double value = 0.0;
      if (!parse_full_double(fields[c], value))
        parse_fail(origin, line_no, "bad numeric value '" + trim(fields[c]) + "'");
      if (!std::isfinite(value)) parse_fail(origin, line_no, "features must be finite");
      point.push_back(value);
    }
    points.push_back(std::move(point));
  }
  if (points.empty()) throw DataError(origin + ": the file contains no data points");
  return Dataset(std::move(points), std::move(labels));
}

json classifier_to_json(const TrainedClassifier& clf) {
  json record;
  record["dim"] = clf.dim;
  switch (clf.kind()) {
    case LearnerKind::kernel_perceptron: {
      const auto& kp = std::get<KernelPerceptronModel>(clf.model);
      record["kind"] = "kernel_perceptron";
      record["gamma"] = kp.gamma;
      record["points"] = kp.points;
      record["labels"] = kp.labels;
      record["alphas"] = kp.alphas;
      record["negative_label"] = kp.negative_label;
      record["positive_label"] = kp.positive_label;
      break;
    }
    case LearnerKind::stump: {
      const auto& stump = std::get<StumpModel>(clf.model);
      record["kind"] = "stump";
      record["feature"] = stump.feature;
      record["threshold"] = stump.threshold;
      record["below_label"] = stump.below_label;
      record["above_label"] = stump.above_label;
      break;
    }
    case LearnerKind::constant: {
      record["kind"] = "constant";
      record["label"] = std::get<ConstantModel>(clf.model).label;
      break;
    }
  }
  return record;
}

TrainedClassifier classifier_from_json(const json& record, const std::string& origin) {
  try {
    TrainedClassifier clf;
    clf.dim = record.at("dim").get<int>();
    const std::string kind = record.at("kind").get<std::string>();
    if (kind == "kernel_perceptron") {
      KernelPerceptronModel kp;
      kp.gamma = record.at("gamma").get<double>();
      kp.points = record.at("points").get<std::vector<std::vector<double>>>();
      kp.labels = record.at("labels").get<std::vector<std::string>>();
      kp.alphas = record.at("alphas").get<std::vector<double>>();
      kp.negative_label = record.at("negative_label").get<std::string>();
      kp.positive_label = record.at("positive_label").get<std::string>();
      clf.model = std::move(kp);
    } else if (kind == "stump") {
      StumpModel stump;
      stump.feature = record.at("feature").get<int>();
      stump.threshold = record.at("threshold").get<double>();
      stump.below_label = record.at("below_label").get<std::string>();
      stump.above_label = record.at("above_label").get<std::string>();
      clf.model = std::move(stump);
    } else if (kind == "constant") {
      clf.model = ConstantModel{record.at("label").get<std::string>()};
    } else {
      throw DataError(origin + ": unknown classifier kind '" + kind + "'");
    }
    return clf;
  } catch (const json::exception& e) {
    throw DataError(origin + ": bad classifier record: " + e.what());
  }
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

Dataset parse_dataset_stream(std::istream& in, DatasetFormat format, const std::string& origin) {
  return format == DatasetFormat::svmlight ? parse_svmlight(in, origin) : parse_csv(in, origin);
}

Dataset parse_dataset(const std::string& path, DatasetFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  return parse_dataset_stream(in, format, path);
}

void write_dataset_stream(std::ostream& out, const Dataset& data, DatasetFormat format) {
  if (format == DatasetFormat::svmlight) {
    for (std::int64_t i = 0; i < data.n(); ++i) {
      out << data.labels()[static_cast<std::size_t>(i)];
      const auto& point = data.points()[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < point.size(); ++k)
        if (point[k] != 0.0) out << ' ' << k + 1 << ':' << format_double(point[k]);
      out << '\n';
    }
    return;
  }
  out << "label";
  for (int k = 0; k < data.d(); ++k) out << ",f" << k + 1;
  out << '\n';
  for (std::int64_t i = 0; i < data.n(); ++i) {
    out << data.labels()[static_cast<std::size_t>(i)];
    for (double v : data.points()[static_cast<std::size_t>(i)]) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_dataset(const std::string& path, const Dataset& data, DatasetFormat format) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  write_dataset_stream(out, data, format);
}

LossProfile parse_losses_stream(std::istream& in, std::int64_t n_eff, const std::string& origin) {
  std::vector<double> losses;
  std::vector<std::int64_t> multiplicities;
  std::vector<double> masses;
  std::size_t columns = 0;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() < 1 || fields.size() > 3)
      parse_fail(origin, line_no, "expected loss[,multiplicity[,prior_mass]]");
    if (columns == 0) columns = fields.size();
    if (fields.size() != columns)
      parse_fail(origin, line_no, "all rows must have the same number of columns");

    double loss = 0.0;
    if (!parse_full_double(fields[0], loss))
      parse_fail(origin, line_no, "bad loss value '" + trim(fields[0]) + "'");
    std::int64_t multiplicity = 1;
    if (columns >= 2 && (!parse_full_int(fields[1], multiplicity) || multiplicity < 1))
      parse_fail(origin, line_no, "multiplicity must be an integer >= 1");
    double mass = 0.0;
    if (columns == 3 && !parse_full_double(fields[2], mass))
      parse_fail(origin, line_no, "bad prior mass '" + trim(fields[2]) + "'");
    losses.push_back(loss);
    multiplicities.push_back(multiplicity);
    masses.push_back(mass);
  }
  if (losses.empty()) throw DataError(origin + ": the losses file contains no rows");

  std::vector<LossEntry> entries;
  entries.reserve(losses.size());
  if (columns == 3) {
    for (std::size_t i = 0; i < losses.size(); ++i)
      entries.push_back({losses[i], masses[i], multiplicities[i]});
  } else {
    std::int64_t total = 0;
    for (std::int64_t mult : multiplicities) total += mult;
    const double uniform = 1.0 / static_cast<double>(total);
    for (std::size_t i = 0; i < losses.size(); ++i)
      entries.push_back({losses[i], uniform, multiplicities[i]});
  }
  return LossProfile(std::move(entries), n_eff);
}

LossProfile parse_losses_file(const std::string& path, std::int64_t n_eff) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  return parse_losses_stream(in, n_eff, path);
}

std::string serialize_model(const TrainedModel& model) {
  json doc;
  doc["format_version"] = 1;
  doc["bound"] = {
      {"lambda", model.lambda},          {"pb_lambda", model.pb_lambda_bound},
      {"pb_kl", model.pb_kl_bound},      {"delta", model.delta},
      {"n", model.ensemble.n},           {"r", model.ensemble.r},
      {"m", model.ensemble.size()},
  };
  doc["prior"] = {{"kind", model.prior_kind}};
  doc["seed"] = model.seed;
  doc["d"] = model.ensemble.d;
  doc["label_set"] = model.ensemble.label_set;

  json hypotheses = json::array();
  for (std::int64_t h = 0; h < model.ensemble.size(); ++h) {
    json record = classifier_to_json(model.ensemble.hypotheses[static_cast<std::size_t>(h)]);
    record["subset"] = model.ensemble.plan.subsets[static_cast<std::size_t>(h)];
    record["validation_loss"] = model.ensemble.validation_losses[static_cast<std::size_t>(h)];
    record["weight"] = model.posterior[static_cast<std::size_t>(h)];
    hypotheses.push_back(std::move(record));
  }
  doc["hypotheses"] = std::move(hypotheses);
  return doc.dump(2) + "\n";
}

TrainedModel deserialize_model(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(origin + ": not a valid model file: " + e.what());
  }
  try {
    if (doc.at("format_version").get<int>() != 1)
      throw DataError(origin + ": unsupported model format version");
    TrainedModel model;
    const json& bound = doc.at("bound");
    model.lambda = bound.at("lambda").get<double>();
    model.pb_lambda_bound = bound.at("pb_lambda").get<double>();
    model.pb_kl_bound = bound.at("pb_kl").get<double>();
    model.delta = bound.at("delta").get<double>();
    model.prior_kind = doc.at("prior").at("kind").get<std::string>();
    model.seed = doc.at("seed").get<std::uint64_t>();

    HypothesisEnsemble& ens = model.ensemble;
    ens.n = bound.at("n").get<std::int64_t>();
    ens.r = bound.at("r").get<std::int64_t>();
    ens.d = doc.at("d").get<int>();
    ens.label_set = doc.at("label_set").get<std::vector<std::string>>();
    ens.plan.seed = model.seed;
    ens.plan.n = ens.n;
    ens.plan.r = ens.r;

    double weight_total = 0.0;
    for (const json& record : doc.at("hypotheses")) {
      ens.hypotheses.push_back(classifier_from_json(record, origin));
      ens.plan.subsets.push_back(record.at("subset").get<std::vector<std::int64_t>>());
      ens.validation_losses.push_back(record.at("validation_loss").get<double>());
      model.posterior.push_back(record.at("weight").get<double>());
      weight_total += model.posterior.back();
    }
    if (ens.hypotheses.empty()) throw DataError(origin + ": the model has no hypotheses");
    if (std::abs(weight_total - 1.0) > 1e-9)
      throw DataError(origin + ": posterior weights do not sum to 1");
    return model;
  } catch (const json::exception& e) {
    throw DataError(origin + ": bad model file: " + e.what());
  }
}

void write_model(const std::string& path, const TrainedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << serialize_model(model);
  if (!out) throw DataError("failed while writing '" + path + "'");
}

TrainedModel read_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_model(buffer.str(), path);
}

}  // namespace pbmin
