#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace locstruct {

/// A leaf of a taxonomy, identified by its position in the pre-order leaf list.
struct TaxonomyLeaf {
  int leaf = 0;
  friend bool operator==(const TaxonomyLeaf&, const TaxonomyLeaf&) = default;
  friend auto operator<=>(const TaxonomyLeaf&, const TaxonomyLeaf&) = default;
};

/// A fixed-length sequence of label indices into a SequenceSpace alphabet.
struct LabelSequence {
  std::vector<int> labels;
  friend bool operator==(const LabelSequence&, const LabelSequence&) = default;
  friend auto operator<=>(const LabelSequence&, const LabelSequence&) = default;
};

using StructuredOutput = std::variant<TaxonomyLeaf, LabelSequence>;

/// Rooted tree of named nodes. Leaves carry output-code vectors of a common
/// dimension; when no codes are given every leaf gets a one-hot code.
class Taxonomy {
 public:
  struct NodeSpec {
    std::string id;
    std::string parent;  // empty for the root
    std::vector<double> code;  // leaves only; empty means "default code"
    friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
  };

  Taxonomy() = default;
  /// Builds and validates the tree. Throws ValidationError on a malformed tree.
  explicit Taxonomy(std::vector<NodeSpec> nodes);

  /// Complete tree with the given branching factor and depth; leaves named
  /// "L0", "L1", ... and inner nodes "N0", "N1", ... in pre-order.
  static Taxonomy balanced(int branching, int depth);

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_leaves() const { return leaves_.size(); }
  std::size_t code_dim() const { return code_dim_; }
  std::size_t root() const { return root_; }

  const std::string& node_id(std::size_t node) const { return nodes_[node].id; }
  std::optional<std::size_t> parent(std::size_t node) const { return parent_[node]; }
  const std::vector<std::size_t>& children(std::size_t node) const { return children_[node]; }
  /// Node index of the leaf at pre-order position `leaf`.
  std::size_t leaf_node(int leaf) const { return leaves_.at(static_cast<std::size_t>(leaf)); }
  const std::string& leaf_id(int leaf) const { return node_id(leaf_node(leaf)); }
  std::optional<int> find_leaf(const std::string& id) const;
  bool has_leaf(int leaf) const { return leaf >= 0 && static_cast<std::size_t>(leaf) < leaves_.size(); }
  const Eigen::VectorXd& code(int leaf) const { return codes_.at(static_cast<std::size_t>(leaf)); }

  /// Longest downward path (in edges) from `node` to any leaf below it.
  int height(std::size_t node) const { return height_[node]; }
  std::size_t lowest_common_ancestor(std::size_t a, std::size_t b) const;
  /// height(LCA(a, b)) for two leaves, read from the precomputed table.
  int leaf_lca_height(int a, int b) const;

  /// True when the leaf codes were generated (one-hot) rather than supplied.
  bool has_default_codes() const { return default_codes_; }

  /// Nodes in the order they were supplied, codes filled in.
  const std::vector<NodeSpec>& specs() const { return nodes_; }

  friend bool operator==(const Taxonomy& a, const Taxonomy& b) { return a.nodes_ == b.nodes_; }

 private:
  std::vector<NodeSpec> nodes_;
  std::vector<std::optional<std::size_t>> parent_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<int> depth_;
  std::vector<int> height_;
  std::vector<std::size_t> leaves_;
  std::vector<Eigen::VectorXd> codes_;
  std::vector<int> lca_height_;  // num_leaves x num_leaves
  std::size_t root_ = 0;
  std::size_t code_dim_ = 0;
  bool default_codes_ = false;
};

struct SequenceSpace {
  std::vector<std::string> alphabet;
  int length = 1;

  int alphabet_size() const { return static_cast<int>(alphabet.size()); }
  std::optional<int> find_label(const std::string& name) const;
  friend bool operator==(const SequenceSpace&, const SequenceSpace&) = default;
};

/// The output space: a taxonomy (outputs are leaves) or a space of label sequences.
struct OutputSpace {
  std::variant<Taxonomy, SequenceSpace> space;

  bool is_taxonomy() const { return std::holds_alternative<Taxonomy>(space); }
  bool is_sequence() const { return std::holds_alternative<SequenceSpace>(space); }
  const Taxonomy& taxonomy() const;
  const SequenceSpace& sequence() const;

  /// |Y|, saturating at UINT64_MAX.
  std::uint64_t cardinality() const;
  /// Throws InvalidOutputError / DimensionError when `y` is not in this space.
  void check(const StructuredOutput& y) const;
  bool contains(const StructuredOutput& y) const;
  /// Human-readable rendering: leaf id, or space-separated label names.
  std::string format(const StructuredOutput& y) const;
  /// Inverse of format().
  StructuredOutput parse(const std::string& text) const;

  friend bool operator==(const OutputSpace&, const OutputSpace&) = default;
};

/// Checks the OutputSpace-level invariants (non-empty duplicate-free alphabet,
/// positive length). Taxonomy invariants are enforced at construction.
void validate_output_space(const OutputSpace& space);

}  // namespace locstruct
