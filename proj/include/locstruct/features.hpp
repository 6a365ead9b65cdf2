#pragma once

#include "locstruct/dataset.hpp"
#include "locstruct/output.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <variant>

namespace locstruct {

/// Phi(x, y) = x (outer) code(y), flattened with the input index major.
struct TensorProductSpec {
  int input_dim = 0;
  int code_dim = 0;
  friend bool operator==(const TensorProductSpec&, const TensorProductSpec&) = default;
};

/// Transition histogram (A*A entries, from-label major) followed by one
/// emission block of input_dim entries per label.
struct SequenceFeatureSpec {
  int alphabet_size = 0;
  int length = 0;
  int input_dim = 0;
  friend bool operator==(const SequenceFeatureSpec&, const SequenceFeatureSpec&) = default;
};

using FeatureMapSpec = std::variant<TensorProductSpec, SequenceFeatureSpec>;

std::size_t feature_dimension(const FeatureMapSpec& spec);

/// The feature map used for `space` with inputs of `input_dim` columns.
FeatureMapSpec feature_spec(const OutputSpace& space, int input_dim);

Eigen::VectorXd joint_feature_tensor(const Eigen::VectorXd& x, const TaxonomyLeaf& y, const Taxonomy& tax);

Eigen::VectorXd joint_feature_sequence(const Input& x, const LabelSequence& y, const SequenceSpace& space);

/// Dispatches on the output space. Taxonomy inputs must have exactly one row.
Eigen::VectorXd joint_feature(const Input& x, const StructuredOutput& y, const OutputSpace& space);

/// w' Phi(x, y), computed from the materialised feature vector.
double score(const Eigen::VectorXd& w, const Input& x, const StructuredOutput& y, const OutputSpace& space);

namespace seqlayout {
inline Eigen::Index transition(int from, int to, int alphabet) { return Eigen::Index(from) * alphabet + to; }
inline Eigen::Index emission(int label, int alphabet, int input_dim) {
  return Eigen::Index(alphabet) * alphabet + Eigen::Index(label) * input_dim;
}
}  // namespace seqlayout

}  // namespace locstruct
