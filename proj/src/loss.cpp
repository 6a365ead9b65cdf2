#include "locstruct/loss.hpp"

#include "locstruct/error.hpp"

#include <algorithm>

namespace locstruct {

namespace {

void check_same_length(const LabelSequence& y, const LabelSequence& y2) {
  if (y.labels.size() != y2.labels.size())
    throw DimensionError("sequence lengths differ: " + std::to_string(y.labels.size()) + " vs " +
                         std::to_string(y2.labels.size()));
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

double tree_loss(const TaxonomyLeaf& y, const TaxonomyLeaf& y2, const Taxonomy& tax) {
  return tax.leaf_lca_height(y.leaf, y2.leaf);
}

double hamming_loss(const LabelSequence& y, const LabelSequence& y2, bool normalized) {
  check_same_length(y, y2);
  std::size_t mismatches = 0;
  for (std::size_t t = 0; t < y.labels.size(); ++t) mismatches += y.labels[t] != y2.labels[t];
  if (!normalized || y.labels.empty()) return static_cast<double>(mismatches);
  return static_cast<double>(mismatches) / static_cast<double>(y.labels.size());
}

double sequence_zero_one_loss(const LabelSequence& y, const LabelSequence& y2) {
  check_same_length(y, y2);
  return y.labels == y2.labels ? 0.0 : 1.0;
}

void check_loss_compatible(const LossSpec& spec, const OutputSpace& space) {
  const bool ok = std::visit(overloaded{
                                 [&](const TreeAncestorLoss&) { return space.is_taxonomy(); },
                                 [&](const HammingLoss&) { return space.is_sequence(); },
                                 [&](const SequenceZeroOneLoss&) { return space.is_sequence(); },
                                 [&](const ZeroLoss&) { return true; },
                             },
                             spec);
  if (!ok)
    throw ContractViolation("loss '" + loss_name(spec) + "' is not defined on a " +
                            (space.is_taxonomy() ? "taxonomy" : "sequence") + " output space");
}

double loss(const LossSpec& spec, const StructuredOutput& y, const StructuredOutput& y2, const OutputSpace& space) {
  check_loss_compatible(spec, space);
  space.check(y);
  space.check(y2);
  return std::visit(overloaded{
                        [&](const TreeAncestorLoss&) {
                          return tree_loss(std::get<TaxonomyLeaf>(y), std::get<TaxonomyLeaf>(y2), space.taxonomy());
                        },
                        [&](const HammingLoss& h) {
                          return hamming_loss(std::get<LabelSequence>(y), std::get<LabelSequence>(y2), h.normalized);
                        },
                        [&](const SequenceZeroOneLoss&) {
                          return sequence_zero_one_loss(std::get<LabelSequence>(y), std::get<LabelSequence>(y2));
                        },
                        [&](const ZeroLoss&) { return 0.0; },
                    },
                    spec);
}

double max_loss_from(const LossSpec& spec, const StructuredOutput& y, const OutputSpace& space) {
  check_loss_compatible(spec, space);
  space.check(y);
  if (std::holds_alternative<ZeroLoss>(spec)) return 0.0;
  if (space.is_taxonomy()) {
    const auto& tax = space.taxonomy();
    int best = 0;
    for (int b = 0; b < static_cast<int>(tax.num_leaves()); ++b)
      best = std::max(best, tax.leaf_lca_height(std::get<TaxonomyLeaf>(y).leaf, b));
    return best;
  }
  const auto& s = space.sequence();
  if (s.alphabet_size() < 2) return 0.0;
  if (const auto* h = std::get_if<HammingLoss>(&spec)) return h->normalized ? 1.0 : static_cast<double>(s.length);
  return 1.0;
}

double max_loss(const LossSpec& spec, const OutputSpace& space) {
  check_loss_compatible(spec, space);
  if (space.is_taxonomy()) {
    double best = 0.0;
    for (int a = 0; a < static_cast<int>(space.taxonomy().num_leaves()); ++a)
      best = std::max(best, max_loss_from(spec, TaxonomyLeaf{a}, space));
    return best;
  }
  const auto& s = space.sequence();
  return max_loss_from(spec, LabelSequence{std::vector<int>(static_cast<std::size_t>(s.length), 0)}, space);
}

LossSpec default_loss(const OutputSpace& space) {
  if (space.is_taxonomy()) return TreeAncestorLoss{};
  return HammingLoss{true};
}

std::string loss_name(const LossSpec& spec) {
  return std::visit(overloaded{
                        [](const TreeAncestorLoss&) -> std::string { return "tree"; },
                        [](const HammingLoss& h) -> std::string { return h.normalized ? "hamming" : "hamming-count"; },
                        [](const SequenceZeroOneLoss&) -> std::string { return "zero-one"; },
                        [](const ZeroLoss&) -> std::string { return "zero"; },
                    },
                    spec);
}

LossSpec parse_loss(const std::string& name) {
  if (name == "tree") return TreeAncestorLoss{};
  if (name == "hamming") return HammingLoss{true};
  if (name == "hamming-count") return HammingLoss{false};
  if (name == "zero-one") return SequenceZeroOneLoss{};
  if (name == "zero") return ZeroLoss{};
  throw ValidationError("unknown loss '" + name + "' (expected tree, hamming, hamming-count, zero-one or zero)");
}

}  // namespace locstruct
