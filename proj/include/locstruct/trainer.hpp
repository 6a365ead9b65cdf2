#pragma once

#include "locstruct/dataset.hpp"
#include "locstruct/inference.hpp"
#include "locstruct/loss.hpp"
#include "locstruct/output.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace locstruct {

/// The k points nearest to `anchor`, nearest first. The anchor is always first.
struct Neighborhood {
  std::size_t anchor = 0;
  std::vector<std::size_t> members;
};

enum class Metric { Euclidean };

/// Distance ties are broken by the lower point index. Throws ValidationError when k is out of [1, n].
std::vector<Neighborhood> build_neighborhoods(const Dataset& ds, int k, Metric metric = Metric::Euclidean);

/// z*_{i,j} for one neighbourhood member.
struct TargetEntry {
  std::size_t member = 0;
  StructuredOutput z_star;
  double bound_value = 0.0;
};

/// Loss-augmented targets for every (anchor, member) pair.
struct AugmentedTargets {
  std::vector<std::vector<TargetEntry>> entries;  // per anchor, sorted by member index
  std::uint64_t revision = 0;                      // TrainingState::revision at refresh time
  bool populated = false;

  const TargetEntry& at(std::size_t anchor, std::size_t member) const;
  std::size_t size() const;
};

/// One local weight vector per training point.
struct PredictorBank {
  std::vector<Eigen::VectorXd> weights;
};

struct TrainingState {
  PredictorBank predictors;
  std::vector<StructuredOutput> outputs;
  AugmentedTargets augmented;
  std::vector<double> objective_trace;
  std::uint64_t revision = 0;  // bumped whenever weights or outputs change
};

/// Everything that stays fixed while training: data, neighbourhoods and settings.
struct TrainingProblem {
  Dataset data;
  std::vector<Neighborhood> neighborhoods;
  std::vector<std::vector<std::size_t>> members_by_index;  // neighbourhood members, ascending
  std::vector<std::vector<std::size_t>> covering;           // covering[j] = anchors i with j in N_i, ascending
  LossSpec loss;
  InferenceConfig inference;
  int k = 1;
  double C = 1.0;
  std::size_t feature_dim = 0;
};

TrainingProblem make_problem(Dataset ds, int k, double C, LossSpec loss, InferenceConfig inference = {});

/// Zero weights; labeled outputs set to their truth, unlabeled outputs copied
/// from the nearest labeled point.
TrainingState initial_state(const TrainingProblem& problem);

void refresh_augmented_targets(const TrainingProblem& problem, TrainingState& state);

/// (1/k) sum_j [Phi(x_j, z*_ij) - Phi(x_j, y_j)] + C w_i. Throws ContractViolation on stale targets.
Eigen::VectorXd subgradient(const TrainingProblem& problem, const TrainingState& state, std::size_t i);

/// g(w) for anchor i with the current targets and outputs held fixed.
double local_objective(const TrainingProblem& problem, const TrainingState& state, std::size_t i,
                       const Eigen::VectorXd& w);

/// w_i <- w_i - eta * subgradient(i), every i computed from the same snapshot.
void update_weights(const TrainingProblem& problem, TrainingState& state, double eta);

/// Exact minimiser of the outputs-only objective for unlabeled point i.
StructuredOutput impute_output(const TrainingProblem& problem, const TrainingState& state, std::size_t i);

/// Labeled outputs reset to truth; unlabeled outputs imputed one by one in ascending order.
void update_outputs(const TrainingProblem& problem, TrainingState& state);

/// The combined surrogate objective evaluated with the stored targets.
double objective(const TrainingProblem& problem, const TrainingState& state);

/// Throws ContractViolation if a labeled output differs from its truth.
void check_labeled_outputs(const TrainingProblem& problem, const TrainingState& state);

/// Trained predictors plus what is needed to apply them to new inputs.
struct LocalModel {
  OutputSpace output_space;
  LossSpec loss;
  InferenceConfig inference;
  Hyperparameters hyperparameters;
  std::vector<Input> anchors;
  std::vector<Eigen::VectorXd> weights;

  /// Index of the closest anchor; ties go to the lower index.
  std::size_t nearest_anchor(const Input& x) const;
  /// Prediction with the weights of the nearest anchor.
  StructuredOutput predict(const Input& x) const;
};

struct TrainReport {
  int iterations_run = 0;
  std::vector<double> objective_trace;  // iterations_run + 1 values, initial state first
  TrainingState state;
  LocalModel model;
};

enum class Phase { Targets, Weights, Outputs };

/// Called after each phase of each iteration (0-based).
using TrainObserver = std::function<void(int iteration, Phase phase, const TrainingProblem&, const TrainingState&)>;

/// Alternates target refresh, sub-gradient weight steps and output imputation
/// for hp.iterations rounds. The objective is recorded with freshly refreshed
/// targets at the start of every round and once more after the last one.
TrainReport fit(const Dataset& ds, const Hyperparameters& hp, const LossSpec& loss, InferenceConfig inference = {},
                const TrainObserver& observer = {});

}  // namespace locstruct
