#include "locstruct/features.hpp"

#include "locstruct/error.hpp"

#include <string>

namespace locstruct {

std::size_t feature_dimension(const FeatureMapSpec& spec) {
  if (const auto* t = std::get_if<TensorProductSpec>(&spec))
    return static_cast<std::size_t>(t->input_dim) * static_cast<std::size_t>(t->code_dim);
  const auto& s = std::get<SequenceFeatureSpec>(spec);
  const auto a = static_cast<std::size_t>(s.alphabet_size);
  return a * a + a * static_cast<std::size_t>(s.input_dim);
}

FeatureMapSpec feature_spec(const OutputSpace& space, int input_dim) {
  if (space.is_taxonomy()) return TensorProductSpec{input_dim, static_cast<int>(space.taxonomy().code_dim())};
  const auto& s = space.sequence();
  return SequenceFeatureSpec{s.alphabet_size(), s.length, input_dim};
}

Eigen::VectorXd joint_feature_tensor(const Eigen::VectorXd& x, const TaxonomyLeaf& y, const Taxonomy& tax) {
  if (!tax.has_leaf(y.leaf)) throw InvalidOutputError("unknown taxonomy leaf " + std::to_string(y.leaf));
  const Eigen::VectorXd& code = tax.code(y.leaf);
  const Eigen::Index dy = code.size();
  Eigen::VectorXd phi(x.size() * dy);
  for (Eigen::Index p = 0; p < x.size(); ++p) phi.segment(p * dy, dy) = x[p] * code;
  return phi;
}

Eigen::VectorXd joint_feature_sequence(const Input& x, const LabelSequence& y, const SequenceSpace& space) {
  const int a_size = space.alphabet_size();
  const int length = static_cast<int>(y.labels.size());
  if (length != space.length)
    throw DimensionError("label sequence has length " + std::to_string(length) + ", expected " +
                         std::to_string(space.length));
  if (x.rows() != length)
    throw DimensionError("input has " + std::to_string(x.rows()) + " positions, expected " + std::to_string(length));
  for (int label : y.labels)
    if (label < 0 || label >= a_size) throw InvalidOutputError("unknown label " + std::to_string(label));

  const int d = static_cast<int>(x.cols());
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(Eigen::Index(a_size) * a_size + Eigen::Index(a_size) * d);
  for (int t = 0; t + 1 < length; ++t) phi[seqlayout::transition(y.labels[t], y.labels[t + 1], a_size)] += 1.0;
  for (int t = 0; t < length; ++t)
    phi.segment(seqlayout::emission(y.labels[t], a_size, d), d) += x.row(t).transpose();
  return phi;
}

Eigen::VectorXd joint_feature(const Input& x, const StructuredOutput& y, const OutputSpace& space) {
  if (space.is_taxonomy()) {
    const auto* leaf = std::get_if<TaxonomyLeaf>(&y);
    if (!leaf) throw InvalidOutputError("expected a taxonomy leaf");
    if (x.rows() != 1) throw DimensionError("taxonomy inputs must have exactly one row, got " + std::to_string(x.rows()));
    return joint_feature_tensor(x.row(0).transpose(), *leaf, space.taxonomy());
  }
  const auto* seq = std::get_if<LabelSequence>(&y);
  if (!seq) throw InvalidOutputError("expected a label sequence");
  return joint_feature_sequence(x, *seq, space.sequence());
}

double score(const Eigen::VectorXd& w, const Input& x, const StructuredOutput& y, const OutputSpace& space) {
  Eigen::VectorXd phi = joint_feature(x, y, space);
  if (phi.size() != w.size())
    throw DimensionError("weight vector has dimension " + std::to_string(w.size()) + ", feature map produces " +
                         std::to_string(phi.size()));
  return w.dot(phi);
}

}  // namespace locstruct
