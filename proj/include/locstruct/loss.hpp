#pragma once

#include "locstruct/output.hpp"

#include <string>
#include <variant>

namespace locstruct {

/// Height of the lowest common ancestor of two taxonomy leaves.
struct TreeAncestorLoss {
  friend bool operator==(const TreeAncestorLoss&, const TreeAncestorLoss&) = default;
};
/// Per-position mismatch count, optionally divided by the sequence length.
struct HammingLoss {
  bool normalized = true;
  friend bool operator==(const HammingLoss&, const HammingLoss&) = default;
};
/// 0 when two sequences are identical, 1 otherwise.
struct SequenceZeroOneLoss {
  friend bool operator==(const SequenceZeroOneLoss&, const SequenceZeroOneLoss&) = default;
};
/// Identically zero. Only useful for isolating the score term in tests.
struct ZeroLoss {
  friend bool operator==(const ZeroLoss&, const ZeroLoss&) = default;
};

using LossSpec = std::variant<TreeAncestorLoss, HammingLoss, SequenceZeroOneLoss, ZeroLoss>;

double tree_loss(const TaxonomyLeaf& y, const TaxonomyLeaf& y2, const Taxonomy& tax);
double hamming_loss(const LabelSequence& y, const LabelSequence& y2, bool normalized);
double sequence_zero_one_loss(const LabelSequence& y, const LabelSequence& y2);

/// Throws ContractViolation when `loss` cannot be evaluated on `space`.
void check_loss_compatible(const LossSpec& loss, const OutputSpace& space);

double loss(const LossSpec& spec, const StructuredOutput& y, const StructuredOutput& y2, const OutputSpace& space);

/// max over y' of loss(y, y').
double max_loss_from(const LossSpec& spec, const StructuredOutput& y, const OutputSpace& space);
/// max over all pairs; the range of reported average losses is [0, max_loss].
double max_loss(const LossSpec& spec, const OutputSpace& space);

/// Tree loss for taxonomies, normalised Hamming for sequences.
LossSpec default_loss(const OutputSpace& space);

/// "tree", "hamming", "hamming-count", "zero-one", "zero".
std::string loss_name(const LossSpec& spec);
LossSpec parse_loss(const std::string& name);

}  // namespace locstruct
