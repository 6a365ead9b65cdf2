#pragma once

#include "locstruct/dataset.hpp"
#include "locstruct/experiment.hpp"
#include "locstruct/synthetic.hpp"
#include "locstruct/trainer.hpp"

#include <json.hpp>

#include <string>

namespace locstruct {

using json = nlohmann::json;

json output_space_to_json(const OutputSpace& space);
OutputSpace output_space_from_json(const json& j, const std::string& where = "output_space");

json dataset_to_json(const Dataset& ds);
/// Structural parse only; call require_valid() for the semantic checks.
Dataset dataset_from_json(const json& j);

/// Parses and validates. ParseError carries line or field context,
/// ValidationError lists every violation.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& ds, const std::string& path);

json model_to_json(const LocalModel& model);
LocalModel model_from_json(const json& j);
void save_model(const LocalModel& model, const std::string& path);
LocalModel load_model(const std::string& path);

json synthetic_to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_from_json(const json& j);
SyntheticSpec load_synthetic_spec(const std::string& path);

json config_to_json(const ExperimentConfig& cfg);
/// Relative dataset paths are resolved against `base_dir`.
ExperimentConfig config_from_json(const json& j, const std::string& base_dir = "");
ExperimentConfig load_experiment_config(const std::string& path);

enum class ResultsFormat { Json, Csv };

/// Picks Csv for a ".csv" extension, Json otherwise.
ResultsFormat results_format_for(const std::string& path);

json results_to_json(const ResultsRecord& rec);
ResultsRecord results_from_json(const json& j);
/// Sorted keys, fixed layout, doubles printed with 9 significant digits.
std::string format_results(const ResultsRecord& rec, ResultsFormat format);
void emit_results(const ResultsRecord& rec, const std::string& path, ResultsFormat format);

/// Deterministic pretty printer: sorted keys, two-space indent, %.9g doubles.
std::string canonical_json(const json& j);

/// Reads and parses a JSON document, reporting the line of a syntax error.
json read_json_file(const std::string& path);

}  // namespace locstruct
