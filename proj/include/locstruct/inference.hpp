#pragma once

#include "locstruct/dataset.hpp"
#include "locstruct/loss.hpp"
#include "locstruct/output.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace locstruct {

/// Exhaustive enumerates Y; SequenceDP runs max-sum over the label lattice.
/// Auto picks SequenceDP for sequence spaces and Exhaustive for taxonomies.
enum class Backend { Auto, Exhaustive, SequenceDP };

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

struct InferenceConfig {
  Backend backend = Backend::Auto;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
};

std::string backend_name(Backend b);
Backend parse_backend(const std::string& name);

/// Concrete backend for `space`; throws ContractViolation for SequenceDP on a taxonomy.
Backend resolve_backend(Backend requested, const OutputSpace& space);

/// Calls `visit` for every y in canonical order: taxonomy leaves in pre-order,
/// sequences lexicographically. Throws CapacityError when |Y| exceeds `cap`.
void for_each_output(const OutputSpace& space, std::uint64_t cap,
                     const std::function<void(const StructuredOutput&)>& visit);

std::vector<StructuredOutput> enumerate_outputs(const OutputSpace& space,
                                                std::uint64_t cap = kDefaultEnumerationCap);

struct ScoredOutput {
  StructuredOutput output;
  double value = 0.0;
};

/// argmax_y w' Phi(x, y); ties go to the first maximiser in canonical order.
ScoredOutput predict_scored(const Eigen::VectorXd& w, const Input& x, const OutputSpace& space,
                            const InferenceConfig& cfg = {});
StructuredOutput predict(const Eigen::VectorXd& w, const Input& x, const OutputSpace& space,
                         const InferenceConfig& cfg = {});

struct AugmentedTarget {
  StructuredOutput z_star;
  double bound_value = 0.0;  // w'(Phi(x,z) - Phi(x,y_cur)) + loss(y_cur, z) at z = z_star
};

/// Loss-augmented inference: maximises w'(Phi(x,y') - Phi(x,y_cur)) + loss(y_cur, y').
AugmentedTarget loss_augmented_argmax(const Eigen::VectorXd& w, const Input& x, const StructuredOutput& y_cur,
                                      const LossSpec& loss, const OutputSpace& space,
                                      const InferenceConfig& cfg = {});

/// One covering neighbourhood's contribution to an imputation problem.
struct ImputationTerm {
  std::reference_wrapper<const Eigen::VectorXd> weights;
  std::reference_wrapper<const StructuredOutput> target;
};

/// argmin_y sum_terms (1/k) [loss(y, target) - weights' Phi(x, y)], with the
/// minimised value. Ties go to the first minimiser in canonical order.
ScoredOutput impute_scored(std::span<const ImputationTerm> terms, int k, const Input& x, const LossSpec& loss,
                           const OutputSpace& space, const InferenceConfig& cfg = {});

/// The imputation objective at a given y, evaluated term by term.
double imputation_objective(std::span<const ImputationTerm> terms, int k, const Input& x, const StructuredOutput& y,
                            const LossSpec& loss, const OutputSpace& space);

}  // namespace locstruct
