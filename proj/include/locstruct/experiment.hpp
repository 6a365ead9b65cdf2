#pragma once

#include "locstruct/dataset.hpp"
#include "locstruct/inference.hpp"
#include "locstruct/loss.hpp"
#include "locstruct/synthetic.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace locstruct {

struct ExperimentConfig {
  std::string dataset_path;                 // used when `synthetic` is empty
  std::optional<SyntheticSpec> synthetic;
  Hyperparameters hp;
  std::optional<LossSpec> loss;             // default_loss(space) when empty
  Backend backend = Backend::Auto;
  int folds = 10;
  double labeled_fraction = 0.5;
  std::uint64_t seed = 0;
  bool baseline = false;
};

struct FoldResult {
  int fold = 0;
  std::size_t train_size = 0;
  std::size_t labeled_size = 0;
  std::size_t test_size = 0;
  double average_loss = 0.0;
};

struct ResultsRecord {
  std::string method;  // "local" or "global"
  std::string loss;
  std::vector<FoldResult> folds;
  double mean_loss = 0.0;
  double std_loss = 0.0;        // sample standard deviation across folds
  double standard_error = 0.0;  // std_loss / sqrt(folds)
  double wall_seconds = 0.0;
  ExperimentConfig config;
};

/// Throws ValidationError for out-of-range settings.
void validate_config(const ExperimentConfig& cfg);

/// Test-index sets of a seeded random partition into `folds` parts whose sizes differ by at most one.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, int folds, std::uint64_t seed);

/// Labeled count for a training split: round(fraction * n), at least 1.
std::size_t labeled_count_for(std::size_t n_train, double fraction);

/// The configured dataset (loaded or generated); it must be fully labeled.
Dataset experiment_dataset(const ExperimentConfig& cfg);

/// Cross-validated local method (or the global baseline when cfg.baseline).
ResultsRecord run_experiment(const ExperimentConfig& cfg);
ResultsRecord run_experiment(const ExperimentConfig& cfg, const Dataset& data);

/// One weight vector trained on the labeled part of each training split.
ResultsRecord run_baseline_global(const ExperimentConfig& cfg);
ResultsRecord run_baseline_global(const ExperimentConfig& cfg, const Dataset& data);

}  // namespace locstruct
