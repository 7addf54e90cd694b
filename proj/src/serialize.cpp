#include "aqicast/serialize.hpp"

#include "aqicast/csv.hpp"
#include "aqicast/error.hpp"

#include <fstream>
#include <sstream>

namespace aqicast {

using nlohmann::json;

json to_json(const SvmModel& model) {
  model.validate();
  json doc;
  doc["format"] = "aqicast.svm_model";
  doc["version"] = kModelFormatVersion;
  json classes = json::array();
  for (auto c : model.classes) classes.push_back(std::string(to_string(c)));
  doc["classes"] = classes;
  doc["feature_names"] = model.feature_names;
  json weights = json::array();
  for (Eigen::Index c = 0; c < model.weights.rows(); ++c) {
    json row = json::array();
    for (Eigen::Index j = 0; j < model.weights.cols(); ++j) row.push_back(model.weights(c, j));
    weights.push_back(std::move(row));
  }
  doc["weights"] = std::move(weights);
  doc["biases"] = std::vector<double>(model.biases.data(), model.biases.data() + model.biases.size());
  doc["trained"] = std::vector<bool>(model.trained);
  doc["hyper"] = {{"lambda", model.hyper.lambda},
                  {"epochs", model.hyper.epochs},
                  {"learning_rate", model.hyper.learning_rate},
                  {"seed", model.hyper.seed},
                  {"batch_size", model.hyper.batch_size}};
  doc["normalizer"] = model.normalizer;
  return doc;
}

SvmModel svm_model_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "aqicast.svm_model") {
      throw Error(ErrorKind::config, "not an aqicast model document");
    }
    if (doc.at("version").get<int>() != kModelFormatVersion) {
      throw Error(ErrorKind::config, "unsupported model version " + doc.at("version").dump());
    }
    SvmModel model;
    for (const auto& c : doc.at("classes")) model.classes.push_back(parse_bucket(c.get<std::string>()));
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    const auto& weights = doc.at("weights");
    const auto rows = static_cast<Eigen::Index>(weights.size());
    const auto cols = static_cast<Eigen::Index>(model.feature_names.size());
    model.weights.resize(rows, cols);
    for (Eigen::Index c = 0; c < rows; ++c) {
      const auto& row = weights.at(static_cast<std::size_t>(c));
      if (static_cast<Eigen::Index>(row.size()) != cols) {
        throw Error(ErrorKind::shape, "model weight row " + std::to_string(c) + " has wrong length");
      }
      for (Eigen::Index j = 0; j < cols; ++j) model.weights(c, j) = row.at(static_cast<std::size_t>(j)).get<double>();
    }
    const auto biases = doc.at("biases").get<std::vector<double>>();
    model.biases = Eigen::Map<const Eigen::VectorXd>(biases.data(), static_cast<Eigen::Index>(biases.size()));
    model.trained = doc.at("trained").get<std::vector<bool>>();
    const auto& h = doc.at("hyper");
    model.hyper.lambda = h.at("lambda").get<double>();
    model.hyper.epochs = h.at("epochs").get<int>();
    model.hyper.learning_rate = h.at("learning_rate").get<double>();
    model.hyper.seed = h.at("seed").get<std::uint64_t>();
    model.hyper.batch_size = h.at("batch_size").get<int>();
    model.normalizer = doc.at("normalizer").get<double>();
    model.validate();
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("malformed model document: ") + e.what());
  }
}

json to_json(const FeatureRanking& ranking, const SelectConfig& config) {
  json doc;
  doc["target"] = ranking.target;
  json ranked = json::array();
  for (const auto& [name, score] : ranking.ranked) ranked.push_back({{"name", name}, {"score", score}});
  doc["ranked"] = std::move(ranked);
  doc["selected"] = ranking.selected;
  doc["k"] = config.k;
  json coefficients = json::object();
  for (std::size_t j = 0; j < ranking.candidates.size(); ++j) {
    coefficients[ranking.candidates[j]] = ranking.fit.coefficients[static_cast<Eigen::Index>(j)];
  }
  doc["regression"] = {{"intercept", ranking.fit.intercept},
                       {"coefficients", std::move(coefficients)},
                       {"final_loss", ranking.fit.final_loss},
                       {"iterations", ranking.fit.iterations},
                       {"converged", ranking.fit.converged}};
  return doc;
}

FeatureRanking ranking_from_json(const json& doc) {
  try {
    FeatureRanking ranking;
    ranking.target = doc.at("target").get<std::string>();
    for (const auto& entry : doc.at("ranked")) {
      ranking.ranked.emplace_back(entry.at("name").get<std::string>(), entry.at("score").get<double>());
    }
    ranking.selected = doc.at("selected").get<std::vector<std::string>>();
    return ranking;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("malformed ranking document: ") + e.what());
  }
}

json to_json(const EvalReport& report) {
  json confusion = json::array();
  for (int t = 0; t < kBucketCount; ++t) {
    json row = json::array();
    for (int p = 0; p < kBucketCount; ++p) row.push_back(report.confusion(t, p));
    confusion.push_back(std::move(row));
  }
  json labels = json::array();
  for (auto b : kAllBuckets) labels.push_back(std::string(to_string(b)));
  return {{"n_samples", report.n_samples},
          {"n_correct", report.n_correct},
          {"n_wrong", report.n_wrong},
          {"accuracy_pct", report.accuracy_pct},
          {"error_pct", report.error_pct},
          {"forecast_time_ms", report.forecast_time_ms},
          {"per_sample_ms", report.per_sample_ms},
          {"confusion", std::move(confusion)},
          {"labels", std::move(labels)}};
}

void write_report_csv_header(std::ostream& out) {
  csv::write_record(out, {"n", "accuracy_pct", "error_pct", "forecast_time_ms", "per_sample_ms"});
}

void write_report_csv_row(std::ostream& out, const EvalReport& report) {
  csv::write_record(out, {std::to_string(report.n_samples), csv::format_number(report.accuracy_pct),
                          csv::format_number(report.error_pct),
                          csv::format_number(report.forecast_time_ms),
                          csv::format_number(report.per_sample_ms)});
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::config, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace aqicast
