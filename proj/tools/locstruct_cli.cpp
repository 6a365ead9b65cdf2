// Command-line front end: validate, synth, train, experiment, predict.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric error.
// LOCSTRUCT_LOG selects verbosity: quiet, info (default) or debug.

#include "locstruct/dataset.hpp"
#include "locstruct/error.hpp"
#include "locstruct/experiment.hpp"
#include "locstruct/io.hpp"
#include "locstruct/loss.hpp"
#include "locstruct/synthetic.hpp"
#include "locstruct/trainer.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("LOCSTRUCT_LOG");
  if (!env) return LogLevel::Info;
  const std::string v = env;
  if (v == "quiet" || v == "0" || v == "error") return LogLevel::Quiet;
  if (v == "debug" || v == "2") return LogLevel::Debug;
  return LogLevel::Info;
}

void log(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) <= static_cast<int>(log_level())) std::cerr << msg << "\n";
}

constexpr int kUsage = 1;
constexpr int kDataError = 2;
constexpr int kNumericError = 3;

struct TrainOptions {
  std::string data;
  std::string model_out;
  locstruct::Hyperparameters hp;
  std::string backend = "auto";
  std::string loss;
  std::uint64_t seed = 0;
};

int cmd_validate(const std::string& path) {
  locstruct::Dataset ds = locstruct::dataset_from_json(locstruct::read_json_file(path));
  auto report = locstruct::validate_dataset(ds);
  if (!report.empty()) {
    for (const auto& r : report) std::cout << r << "\n";
    return kDataError;
  }
  std::cout << "ok: " << ds.size() << " points, " << ds.labeled_count << " labeled, input dimension "
            << ds.input_dim() << "\n";
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out) {
  auto spec = locstruct::load_synthetic_spec(spec_path);
  auto ds = locstruct::generate_synthetic(spec);
  locstruct::save_dataset(ds, out);
  log(LogLevel::Info, "wrote " + std::to_string(ds.size()) + " points to " + out);
  return 0;
}

int cmd_train(const TrainOptions& opt) {
  auto ds = locstruct::load_dataset(opt.data);
  const auto loss = opt.loss.empty() ? locstruct::default_loss(ds.output_space) : locstruct::parse_loss(opt.loss);
  locstruct::InferenceConfig inference;
  inference.backend = locstruct::parse_backend(opt.backend);
  log(LogLevel::Debug, "seed " + std::to_string(opt.seed) + " (training is deterministic)");

  auto observer = [](int t, locstruct::Phase phase, const locstruct::TrainingProblem&,
                     const locstruct::TrainingState& state) {
    if (phase == locstruct::Phase::Targets && log_level() == LogLevel::Debug)
      log(LogLevel::Debug, "iteration " + std::to_string(t) + " objective " + std::to_string(state.objective_trace.back()));
  };
  auto report = locstruct::fit(ds, opt.hp, loss, inference, observer);
  std::cout << "iterations " << report.iterations_run << "\n";
  std::cout << "objective initial " << report.objective_trace.front() << " final " << report.objective_trace.back()
            << "\n";
  for (std::size_t i = ds.labeled_count; i < ds.size(); ++i)
    std::cout << i << "\t" << ds.output_space.format(report.state.outputs[i]) << "\n";
  if (!opt.model_out.empty()) {
    locstruct::save_model(report.model, opt.model_out);
    log(LogLevel::Info, "model written to " + opt.model_out);
  }
  return 0;
}

int cmd_experiment(const std::string& config_path, bool baseline, const std::string& out, const std::string& format) {
  auto cfg = locstruct::load_experiment_config(config_path);
  if (baseline) cfg.baseline = true;
  auto rec = locstruct::run_experiment(cfg);
  locstruct::ResultsFormat fmt = locstruct::results_format_for(out);
  if (format == "json") fmt = locstruct::ResultsFormat::Json;
  if (format == "csv") fmt = locstruct::ResultsFormat::Csv;
  locstruct::emit_results(rec, out, fmt);
  std::cout << rec.method << " mean loss " << rec.mean_loss << " (std " << rec.std_loss << ", " << rec.folds.size()
            << " folds)\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path) {
  auto model = locstruct::load_model(model_path);
  auto ds = locstruct::dataset_from_json(locstruct::read_json_file(data_path));
  if (!(ds.output_space == model.output_space))
    throw locstruct::ValidationError("dataset output space differs from the model's");
  double total = 0.0;
  std::size_t scored = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto y = model.predict(ds.points[i].input);
    std::cout << i << "\t" << ds.output_space.format(y) << "\n";
    if (ds.points[i].truth) {
      total += locstruct::loss(model.loss, *ds.points[i].truth, y, ds.output_space);
      ++scored;
    }
  }
  if (scored > 0)
    log(LogLevel::Info, "average " + locstruct::loss_name(model.loss) + " loss over " + std::to_string(scored) +
                            " labeled points: " + std::to_string(total / static_cast<double>(scored)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-supervised structured output prediction with local linear predictors"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a dataset file");
  validate->add_option("data", validate_path, "Dataset file")->required();

  std::string synth_spec, synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic clustered dataset");
  synth->add_option("spec", synth_spec, "Generator spec (JSON)")->required();
  synth->add_option("-o,--output", synth_out, "Output dataset file")->required();

  TrainOptions topt;
  auto* train = app.add_subcommand("train", "Train local predictors and impute unlabeled outputs");
  train->add_option("data", topt.data, "Dataset file")->required();
  train->add_option("--k", topt.hp.k, "Neighbourhood size (0 = max(2, n/10))");
  train->add_option("--C", topt.hp.C, "Regularisation scale");
  train->add_option("--eta", topt.hp.eta, "Step size");
  train->add_option("--eta-decay", topt.hp.eta_decay, "Per-iteration step decay in (0, 1]");
  train->add_option("--iters", topt.hp.iterations, "Outer iterations");
  train->add_option("--seed", topt.seed, "Seed (recorded; training is deterministic)");
  train->add_option("--backend", topt.backend, "auto, exhaustive or dp");
  train->add_option("--loss", topt.loss, "tree, hamming, hamming-count, zero-one");
  train->add_option("-o,--model", topt.model_out, "Write the trained model here");

  std::string exp_config, exp_out, exp_format;
  bool exp_baseline = false;
  auto* experiment = app.add_subcommand("experiment", "Run the cross-validation protocol");
  experiment->add_option("config", exp_config, "Experiment config (JSON)")->required();
  experiment->add_flag("--baseline", exp_baseline, "Run the single global predictor instead");
  experiment->add_option("-o,--output", exp_out, "Results file (.json or .csv)")->required();
  experiment->add_option("--format", exp_format, "json or csv (default: from extension)")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string pred_model, pred_data;
  auto* predict = app.add_subcommand("predict", "Predict outputs with a trained model");
  predict->add_option("model", pred_model, "Model file")->required();
  predict->add_option("data", pred_data, "Dataset file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*validate) return cmd_validate(validate_path);
    if (*synth) return cmd_synth(synth_spec, synth_out);
    if (*train) return cmd_train(topt);
    if (*experiment) return cmd_experiment(exp_config, exp_baseline, exp_out, exp_format);
    if (*predict) return cmd_predict(pred_model, pred_data);
  } catch (const locstruct::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}
