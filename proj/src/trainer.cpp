#include "locstruct/trainer.hpp"

#include "locstruct/error.hpp"
#include "locstruct/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace locstruct {

namespace {

double squared_distance(const Input& a, const Input& b) { return (a - b).squaredNorm(); }

std::size_t nearest(const Input& x, const std::vector<const Input*>& candidates) {
  std::size_t best = 0;
  double best_dist = squared_distance(x, *candidates[0]);
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    const double d = squared_distance(x, *candidates[c]);
    if (d < best_dist) {
      best = c;
      best_dist = d;
    }
  }
  return best;
}

[[noreturn]] void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const NumericError& e) {
    throw NumericError(context + e.what());
  } catch (const DimensionError& e) {
    throw DimensionError(context + e.what());
  } catch (const InvalidOutputError& e) {
    throw InvalidOutputError(context + e.what());
  } catch (const CapacityError& e) {
    throw CapacityError(context + e.what());
  } catch (const ContractViolation& e) {
    throw ContractViolation(context + e.what());
  }
}

}  // namespace

std::vector<Neighborhood> build_neighborhoods(const Dataset& ds, int k, Metric) {
  const std::size_t n = ds.size();
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw ValidationError("k = " + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");
  std::vector<Neighborhood> out(n);
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      dist[j] = {j == i ? -1.0 : squared_distance(ds.points[i].input, ds.points[j].input), j};
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    out[i].anchor = i;
    for (int r = 0; r < k; ++r) out[i].members.push_back(dist[static_cast<std::size_t>(r)].second);
  }
  return out;
}

const TargetEntry& AugmentedTargets::at(std::size_t anchor, std::size_t member) const {
  if (anchor >= entries.size()) throw ContractViolation("no augmented targets for anchor " + std::to_string(anchor));
  const auto& row = entries[anchor];
  auto it = std::lower_bound(row.begin(), row.end(), member,
                             [](const TargetEntry& e, std::size_t m) { return e.member < m; });
  if (it == row.end() || it->member != member)
    throw ContractViolation("point " + std::to_string(member) + " is not in the neighbourhood of " +
                            std::to_string(anchor));
  return *it;
}

std::size_t AugmentedTargets::size() const {
  std::size_t total = 0;
  for (const auto& row : entries) total += row.size();
  return total;
}

TrainingProblem make_problem(Dataset ds, int k, double C, LossSpec loss, InferenceConfig inference) {
  require_valid(ds);
  check_loss_compatible(loss, ds.output_space);
  resolve_backend(inference.backend, ds.output_space);
  if (!std::isfinite(C) || C < 0) throw ValidationError("C must be finite and >= 0");

  TrainingProblem p;
  p.neighborhoods = build_neighborhoods(ds, k);
  p.members_by_index.reserve(ds.size());
  p.covering.assign(ds.size(), {});
  for (const auto& nb : p.neighborhoods) {
    auto sorted = nb.members;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t j : sorted) p.covering[j].push_back(nb.anchor);
    p.members_by_index.push_back(std::move(sorted));
  }
  p.feature_dim = feature_dimension(feature_spec(ds.output_space, ds.input_dim()));
  p.data = std::move(ds);
  p.loss = std::move(loss);
  p.inference = inference;
  p.k = k;
  p.C = C;
  return p;
}

TrainingState initial_state(const TrainingProblem& problem) {
  const auto& ds = problem.data;
  TrainingState state;
  state.predictors.weights.assign(ds.size(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.feature_dim)));

  std::vector<const Input*> labeled;
  for (std::size_t i = 0; i < ds.labeled_count; ++i) labeled.push_back(&ds.points[i].input);
  state.outputs.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (i < ds.labeled_count)
      state.outputs.push_back(*ds.points[i].truth);
    else
      state.outputs.push_back(*ds.points[nearest(ds.points[i].input, labeled)].truth);
  }
  return state;
}

void refresh_augmented_targets(const TrainingProblem& problem, TrainingState& state) {
  const auto& ds = problem.data;
  AugmentedTargets fresh;
  fresh.entries.resize(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& w = state.predictors.weights[i];
    for (std::size_t j : problem.members_by_index[i]) {
      auto target =
          loss_augmented_argmax(w, ds.points[j].input, state.outputs[j], problem.loss, ds.output_space, problem.inference);
      fresh.entries[i].push_back({j, std::move(target.z_star), target.bound_value});
    }
  }
  fresh.revision = state.revision;
  fresh.populated = true;
  state.augmented = std::move(fresh);
}

Eigen::VectorXd subgradient(const TrainingProblem& problem, const TrainingState& state, std::size_t i) {
  if (!state.augmented.populated || state.augmented.revision != state.revision)
    throw ContractViolation("augmented targets are stale for the current weights and outputs");
  const auto& ds = problem.data;
  Eigen::VectorXd diff = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.feature_dim));
  for (const auto& entry : state.augmented.entries[i]) {
    const auto& x = ds.points[entry.member].input;
    diff += joint_feature(x, entry.z_star, ds.output_space) - joint_feature(x, state.outputs[entry.member], ds.output_space);
  }
  return diff * (1.0 / static_cast<double>(problem.k)) + problem.C * state.predictors.weights[i];
}

double local_objective(const TrainingProblem& problem, const TrainingState& state, std::size_t i,
                       const Eigen::VectorXd& w) {
  const auto& ds = problem.data;
  double total = 0.0;
  for (std::size_t j : problem.members_by_index[i]) {
    const auto& x = ds.points[j].input;
    const auto& z = state.augmented.at(i, j).z_star;
    total += w.dot(joint_feature(x, z, ds.output_space) - joint_feature(x, state.outputs[j], ds.output_space));
  }
  return total / static_cast<double>(problem.k) + 0.5 * problem.C * w.squaredNorm();
}

void update_weights(const TrainingProblem& problem, TrainingState& state, double eta) {
  const std::size_t n = problem.data.size();
  std::vector<Eigen::VectorXd> steps(n);
  for (std::size_t i = 0; i < n; ++i) steps[i] = subgradient(problem, state, i);
  for (std::size_t i = 0; i < n; ++i) {
    auto& w = state.predictors.weights[i];
    w -= eta * steps[i];
    if (!w.allFinite()) throw NumericError("weights of local predictor " + std::to_string(i) + " became non-finite");
  }
  ++state.revision;
}

StructuredOutput impute_output(const TrainingProblem& problem, const TrainingState& state, std::size_t i) {
  const auto& ds = problem.data;
  if (i < ds.labeled_count) throw ContractViolation("point " + std::to_string(i) + " is labeled; its output is fixed");
  const auto& cover = problem.covering.at(i);
  if (cover.empty()) throw ContractViolation("point " + std::to_string(i) + " lies in no neighbourhood");
  std::vector<ImputationTerm> terms;
  terms.reserve(cover.size());
  for (std::size_t anchor : cover)
    terms.push_back({std::cref(state.predictors.weights[anchor]), std::cref(state.augmented.at(anchor, i).z_star)});
  return impute_scored(terms, problem.k, ds.points[i].input, problem.loss, ds.output_space, problem.inference).output;
}

void update_outputs(const TrainingProblem& problem, TrainingState& state) {
  const auto& ds = problem.data;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (i < ds.labeled_count)
      state.outputs[i] = *ds.points[i].truth;
    else
      state.outputs[i] = impute_output(problem, state, i);
  }
  ++state.revision;
}

double objective(const TrainingProblem& problem, const TrainingState& state) {
  const auto& ds = problem.data;
  const double inv_k = 1.0 / static_cast<double>(problem.k);
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& w = state.predictors.weights[i];
    double local = 0.0;
    for (std::size_t j : problem.members_by_index[i]) {
      const auto& x = ds.points[j].input;
      const auto& z = state.augmented.at(i, j).z_star;
      const double margin =
          w.dot(joint_feature(x, z, ds.output_space)) - w.dot(joint_feature(x, state.outputs[j], ds.output_space));
      local += margin + loss(problem.loss, state.outputs[j], z, ds.output_space);
    }
    total += inv_k * local + 0.5 * problem.C * w.squaredNorm();
  }
  return total;
}

void check_labeled_outputs(const TrainingProblem& problem, const TrainingState& state) {
  for (std::size_t i = 0; i < problem.data.labeled_count; ++i)
    if (state.outputs[i] != *problem.data.points[i].truth)
      throw ContractViolation("labeled point " + std::to_string(i) + " lost its ground-truth output");
}

std::size_t LocalModel::nearest_anchor(const Input& x) const {
  if (anchors.empty()) throw ContractViolation("model has no anchors");
  std::vector<const Input*> refs;
  refs.reserve(anchors.size());
  for (const auto& a : anchors) {
    if (a.rows() != x.rows() || a.cols() != x.cols())
      throw DimensionError("input shape " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                           " does not match the training inputs " + std::to_string(a.rows()) + "x" +
                           std::to_string(a.cols()));
    refs.push_back(&a);
  }
  return nearest(x, refs);
}

StructuredOutput LocalModel::predict(const Input& x) const {
  return locstruct::predict(weights[nearest_anchor(x)], x, output_space, inference);
}

TrainReport fit(const Dataset& ds, const Hyperparameters& hp, const LossSpec& loss_spec, InferenceConfig inference,
                const TrainObserver& observer) {
  require_valid(ds);
  validate_hyperparameters(hp, ds.size());
  const int k = effective_k(hp, ds.size());
  TrainingProblem problem = make_problem(ds, k, hp.C, loss_spec, inference);
  TrainingState state = initial_state(problem);

  auto notify = [&](int t, Phase phase) {
    if (observer) observer(t, phase, problem, state);
  };

  int t = 0;
  for (; t < hp.iterations; ++t) {
    try {
      refresh_augmented_targets(problem, state);
      state.objective_trace.push_back(objective(problem, state));
      if (hp.early_stop && t > 0) {
        const double prev = state.objective_trace[state.objective_trace.size() - 2];
        const double cur = state.objective_trace.back();
        if (std::abs(cur - prev) <= hp.early_stop_tolerance * std::max(1.0, std::abs(prev))) break;
      }
      notify(t, Phase::Targets);
      update_weights(problem, state, hp.eta * std::pow(hp.eta_decay, t));
      notify(t, Phase::Weights);
      update_outputs(problem, state);
      check_labeled_outputs(problem, state);
      notify(t, Phase::Outputs);
    } catch (const Error&) {
      rethrow_with_context("iteration " + std::to_string(t) + ": ");
    }
  }
  if (t == hp.iterations) {
    refresh_augmented_targets(problem, state);
    state.objective_trace.push_back(objective(problem, state));
  }
  check_labeled_outputs(problem, state);

  TrainReport report;
  report.iterations_run = t;
  report.objective_trace = state.objective_trace;
  report.model.output_space = problem.data.output_space;
  report.model.loss = problem.loss;
  report.model.inference = problem.inference;
  report.model.hyperparameters = hp;
  report.model.hyperparameters.k = k;
  for (const auto& p : problem.data.points) report.model.anchors.push_back(p.input);
  report.model.weights = state.predictors.weights;
  report.state = std::move(state);
  return report;
}

}  // namespace locstruct
