#include "aqicast/error.hpp"
#include "aqicast/log.hpp"
#include "aqicast/pipeline.hpp"
#include "aqicast/serialize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void print_error(std::string_view kind, std::string_view stage, std::string_view message) {
  json doc = {{"error", {{"kind", kind}, {"stage", stage}, {"message", message}}}};
  std::cerr << doc.dump() << '\n';
}

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> cities;
  std::optional<double> split;
  std::optional<std::string> policy;
  std::optional<std::string> input;
  bool random_split = false;
};

aqicast::PipelineConfig resolve(const Flags& flags) {
  json doc = json::object();
  if (!flags.config.empty()) doc = aqicast::read_json_file(flags.config);
  aqicast::PipelineConfig config = aqicast::config_from_json(doc);
  if (flags.out) config.out = *flags.out;
  if (flags.seed) config.seed = *flags.seed;
  if (!flags.cities.empty()) config.cities = flags.cities;
  if (flags.split) config.split = *flags.split;
  if (flags.random_split) config.split_mode = aqicast::SplitMode::random;
  if (flags.policy) config.impute.mode = aqicast::parse_impute_mode(*flags.policy);
  if (flags.input) {
    config.input = *flags.input;
    config.synthetic.reset();
  }
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  aqicast::log::init_from_env();

  CLI::App app{"Air-quality bucket forecasting: ingest, denoise, select, train, evaluate."};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("--config", flags.config, "Pipeline config JSON")->check(CLI::ExistingFile);
  app.add_option("--out", flags.out, "Output directory for artifacts");
  app.add_option("--seed", flags.seed, "Seed for synthetic data, splits and training");
  app.add_option("--cities", flags.cities, "Comma-separated cities to keep")->delimiter(',');
  app.add_option("--split", flags.split, "Training fraction in (0, 1)");
  app.add_option("--policy", flags.policy, "Imputation policy")
      ->check(CLI::IsMember({"forward_fill", "drop_row", "column_mean"}));
  app.add_flag("--random-split", flags.random_split, "Random instead of chronological split");

  auto* synth = app.add_subcommand("synth", "Write a seeded synthetic dataset CSV");
  Eigen::Index synth_rows = 2000;
  synth->add_option("--rows", synth_rows, "Rows per city")->check(CLI::PositiveNumber);

  auto* ingest = app.add_subcommand("ingest", "Parse and impute the input");
  ingest->add_option("--input", flags.input, "Input CSV (overrides the config)")->check(CLI::ExistingFile);

  app.add_subcommand("preprocess", "Wavelet-denoise every series");
  app.add_subcommand("select", "Rank and select features");
  app.add_subcommand("train", "Build windows, split and train the classifier");

  auto* predict = app.add_subcommand("predict", "Predict buckets for feature rows");
  std::string model_path, rows_path, output_path;
  predict->add_option("--model", model_path, "Model JSON")->check(CLI::ExistingFile);
  predict->add_option("--input", rows_path, "Rows CSV with row_id and feature columns")
      ->check(CLI::ExistingFile);
  predict->add_option("--output", output_path, "Predictions CSV (default stdout)");

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against truth");
  std::string pred_path, truth_path, eval_model, eval_rows;
  evaluate->add_option("--pred", pred_path, "Predictions CSV")->check(CLI::ExistingFile);
  evaluate->add_option("--truth", truth_path, "Truth CSV")->check(CLI::ExistingFile);
  evaluate->add_option("--model", eval_model, "Model JSON, enables timing")->check(CLI::ExistingFile);
  evaluate->add_option("--rows", eval_rows, "Rows CSV the predictions came from")
      ->check(CLI::ExistingFile);

  app.add_subcommand("pipeline", "Run every stage in order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", "", e.what());
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "synth") {
      if (!flags.seed) throw aqicast::Error(aqicast::ErrorKind::config, "synth needs --seed");
      std::vector<std::string> cities = flags.cities;
      if (cities.empty()) cities.push_back("Synthetic");
      std::vector<aqicast::SeriesFrame> frames;
      std::sort(cities.begin(), cities.end());
      for (std::size_t i = 0; i < cities.size(); ++i) {
        aqicast::SyntheticParams params;
        params.city = cities[i];
        frames.push_back(aqicast::generate_synthetic(*flags.seed + i, synth_rows, params));
      }
      const fs::path dir = flags.out.value_or(".");
      fs::create_directories(dir);
      const fs::path path = dir / "synthetic.csv";
      std::ofstream out(path, std::ios::binary);
      if (!out) throw aqicast::Error(aqicast::ErrorKind::io, "cannot write '" + path.string() + "'");
      aqicast::write_csv(out, frames);
      std::cout << path.string() << '\n';
      return 0;
    }

    if (command == "predict" && (!model_path.empty() || !rows_path.empty())) {
      if (model_path.empty() || rows_path.empty()) {
        print_error("usage", "predict", "--model and --input must be given together");
        return kExitUsage;
      }
      const auto model = aqicast::svm_model_from_json(aqicast::read_json_file(model_path));
      const auto rows = aqicast::read_rows_csv(rows_path);
      if (output_path.empty()) {
        aqicast::write_predictions(std::cout, model, rows);
      } else {
        std::ofstream out(output_path, std::ios::binary);
        if (!out) throw aqicast::Error(aqicast::ErrorKind::io, "cannot write '" + output_path + "'");
        aqicast::write_predictions(out, model, rows);
      }
      return 0;
    }

    if (command == "evaluate" && (!pred_path.empty() || !truth_path.empty())) {
      if (pred_path.empty() || truth_path.empty()) {
        print_error("usage", "evaluate", "--pred and --truth must be given together");
        return kExitUsage;
      }
      std::optional<fs::path> model, rows;
      if (!eval_model.empty()) model = eval_model;
      if (!eval_rows.empty()) rows = eval_rows;
      const auto result = aqicast::evaluate_files(pred_path, truth_path, model, rows,
                                                  model && rows, 10);
      if (flags.out) aqicast::write_eval_outputs(result, *flags.out);
      std::cout << aqicast::dump(aqicast::to_json(result.report));
      return 0;
    }

    const aqicast::PipelineConfig config = resolve(flags);
    if (command == "ingest") {
      aqicast::write_resolved_config(config);
      aqicast::run_ingest(config);
    } else if (command == "preprocess") {
      aqicast::run_preprocess(config);
    } else if (command == "select") {
      aqicast::run_select(config);
    } else if (command == "train") {
      aqicast::run_train(config);
    } else if (command == "predict") {
      aqicast::run_predict(config);
    } else if (command == "evaluate") {
      std::cout << aqicast::dump(aqicast::to_json(aqicast::run_evaluate(config)));
    } else if (command == "pipeline") {
      std::cout << aqicast::dump(aqicast::to_json(aqicast::run_pipeline(config)));
    }
    return 0;
  } catch (const aqicast::Error& e) {
    print_error(aqicast::to_string(e.kind()), e.stage(), e.what());
  } catch (const std::exception& e) {
    print_error("internal", command, e.what());
  }
  return kExitFailure;
}
