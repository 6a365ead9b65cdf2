#include "locstruct/output.hpp"

#include "locstruct/error.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace locstruct {

Taxonomy::Taxonomy(std::vector<NodeSpec> nodes) : nodes_(std::move(nodes)) {
  const std::size_t n = nodes_.size();
  if (n == 0) throw ValidationError("taxonomy has no nodes");

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes_[i].id.empty()) throw ValidationError("taxonomy node " + std::to_string(i) + " has an empty id");
    if (!index.emplace(nodes_[i].id, i).second)
      throw ValidationError("duplicate taxonomy node id '" + nodes_[i].id + "'");
  }

  parent_.assign(n, std::nullopt);
  children_.assign(n, {});
  bool have_root = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = nodes_[i].parent;
    if (p.empty()) {
      if (have_root) throw ValidationError("taxonomy has more than one root ('" + nodes_[root_].id + "', '" + nodes_[i].id + "')");
      have_root = true;
      root_ = i;
      continue;
    }
    auto it = index.find(p);
    if (it == index.end()) throw ValidationError("taxonomy node '" + nodes_[i].id + "' has unknown parent '" + p + "'");
    parent_[i] = it->second;
    children_[it->second].push_back(i);
  }
  if (!have_root) throw ValidationError("taxonomy has no root");

  // Pre-order walk from the root; anything unvisited sits on a cycle.
  depth_.assign(n, 0);
  std::vector<std::size_t> order;
  std::vector<std::size_t> stack{root_};
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    order.push_back(v);
    if (children_[v].empty()) leaves_.push_back(v);
    for (auto c = children_[v].rbegin(); c != children_[v].rend(); ++c) {
      depth_[*c] = depth_[v] + 1;
      stack.push_back(*c);
    }
  }
  if (order.size() != n) throw ValidationError("taxonomy is not a single rooted tree (cycle or detached nodes)");

  height_.assign(n, 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (parent_[*it]) height_[*parent_[*it]] = std::max(height_[*parent_[*it]], height_[*it] + 1);

  std::size_t with_code = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (!nodes_[v].code.empty()) {
      if (!children_[v].empty()) throw ValidationError("inner taxonomy node '" + nodes_[v].id + "' carries an output code");
      ++with_code;
    }
  }
  if (with_code != 0 && with_code != leaves_.size())
    throw ValidationError("either every taxonomy leaf carries an output code or none does");
  if (with_code == 0) {
    default_codes_ = true;
    code_dim_ = leaves_.size();
    for (std::size_t l = 0; l < leaves_.size(); ++l) {
      nodes_[leaves_[l]].code.assign(code_dim_, 0.0);
      nodes_[leaves_[l]].code[l] = 1.0;
    }
  } else {
    code_dim_ = nodes_[leaves_.front()].code.size();
  }
  for (std::size_t leaf : leaves_) {
    const auto& c = nodes_[leaf].code;
    if (c.size() != code_dim_)
      throw ValidationError("leaf '" + nodes_[leaf].id + "' has code of dimension " + std::to_string(c.size()) +
                            ", expected " + std::to_string(code_dim_));
    codes_.push_back(Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())));
  }

  const std::size_t nl = leaves_.size();
  lca_height_.assign(nl * nl, 0);
  for (std::size_t a = 0; a < nl; ++a)
    for (std::size_t b = 0; b < nl; ++b)
      lca_height_[a * nl + b] = height_[lowest_common_ancestor(leaves_[a], leaves_[b])];
}

Taxonomy Taxonomy::balanced(int branching, int depth) {
  if (branching < 1 || depth < 0) throw ValidationError("balanced taxonomy needs branching >= 1 and depth >= 0");
  std::vector<NodeSpec> nodes;
  int inner = 0;
  int leaf = 0;
  auto build = [&](auto&& self, const std::string& parent, int level) -> void {
    if (level == depth) {
      nodes.push_back({"L" + std::to_string(leaf++), parent, {}});
      return;
    }
    std::string id = "N" + std::to_string(inner++);
    nodes.push_back({id, parent, {}});
    for (int b = 0; b < branching; ++b) self(self, id, level + 1);
  };
  build(build, "", 0);
  return Taxonomy(std::move(nodes));
}

std::optional<int> Taxonomy::find_leaf(const std::string& id) const {
  for (std::size_t l = 0; l < leaves_.size(); ++l)
    if (nodes_[leaves_[l]].id == id) return static_cast<int>(l);
  return std::nullopt;
}

std::size_t Taxonomy::lowest_common_ancestor(std::size_t a, std::size_t b) const {
  while (depth_[a] > depth_[b]) a = *parent_[a];
  while (depth_[b] > depth_[a]) b = *parent_[b];
  while (a != b) {
    a = *parent_[a];
    b = *parent_[b];
  }
  return a;
}

int Taxonomy::leaf_lca_height(int a, int b) const {
  if (!has_leaf(a)) throw InvalidOutputError("unknown taxonomy leaf " + std::to_string(a));
  if (!has_leaf(b)) throw InvalidOutputError("unknown taxonomy leaf " + std::to_string(b));
  return lca_height_[static_cast<std::size_t>(a) * leaves_.size() + static_cast<std::size_t>(b)];
}

std::optional<int> SequenceSpace::find_label(const std::string& name) const {
  auto it = std::find(alphabet.begin(), alphabet.end(), name);
  if (it == alphabet.end()) return std::nullopt;
  return static_cast<int>(it - alphabet.begin());
}

const Taxonomy& OutputSpace::taxonomy() const {
  if (!is_taxonomy()) throw ContractViolation("output space is not a taxonomy");
  return std::get<Taxonomy>(space);
}

const SequenceSpace& OutputSpace::sequence() const {
  if (!is_sequence()) throw ContractViolation("output space is not a sequence space");
  return std::get<SequenceSpace>(space);
}

std::uint64_t OutputSpace::cardinality() const {
  if (is_taxonomy()) return taxonomy().num_leaves();
  const auto& s = sequence();
  const std::uint64_t a = s.alphabet.size();
  std::uint64_t total = 1;
  for (int t = 0; t < s.length; ++t) {
    if (a != 0 && total > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    total *= a;
  }
  return total;
}

void OutputSpace::check(const StructuredOutput& y) const {
  if (is_taxonomy()) {
    const auto* leaf = std::get_if<TaxonomyLeaf>(&y);
    if (!leaf) throw InvalidOutputError("expected a taxonomy leaf, got a label sequence");
    if (!taxonomy().has_leaf(leaf->leaf)) throw InvalidOutputError("unknown taxonomy leaf " + std::to_string(leaf->leaf));
    return;
  }
  const auto* seq = std::get_if<LabelSequence>(&y);
  if (!seq) throw InvalidOutputError("expected a label sequence, got a taxonomy leaf");
  const auto& s = sequence();
  if (static_cast<int>(seq->labels.size()) != s.length)
    throw DimensionError("label sequence has length " + std::to_string(seq->labels.size()) + ", expected " +
                         std::to_string(s.length));
  for (int label : seq->labels)
    if (label < 0 || label >= s.alphabet_size()) throw InvalidOutputError("unknown label " + std::to_string(label));
}

bool OutputSpace::contains(const StructuredOutput& y) const {
  try {
    check(y);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::string OutputSpace::format(const StructuredOutput& y) const {
  check(y);
  if (is_taxonomy()) return taxonomy().leaf_id(std::get<TaxonomyLeaf>(y).leaf);
  const auto& s = sequence();
  std::string out;
  for (int label : std::get<LabelSequence>(y).labels) {
    if (!out.empty()) out += ' ';
    out += s.alphabet[static_cast<std::size_t>(label)];
  }
  return out;
}

StructuredOutput OutputSpace::parse(const std::string& text) const {
  if (is_taxonomy()) {
    auto leaf = taxonomy().find_leaf(text);
    if (!leaf) throw InvalidOutputError("unknown taxonomy leaf '" + text + "'");
    return TaxonomyLeaf{*leaf};
  }
  const auto& s = sequence();
  LabelSequence seq;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    auto label = s.find_label(tok);
    if (!label) throw InvalidOutputError("unknown label '" + tok + "'");
    seq.labels.push_back(*label);
  }
  StructuredOutput y = std::move(seq);
  check(y);
  return y;
}

void validate_output_space(const OutputSpace& space) {
  if (space.is_taxonomy()) {
    if (space.taxonomy().num_leaves() == 0) throw ValidationError("taxonomy has no leaves");
    return;
  }
  const auto& s = space.sequence();
  if (s.alphabet.empty()) throw ValidationError("sequence alphabet is empty");
  std::unordered_set<std::string> seen;
  for (const auto& a : s.alphabet)
    if (!seen.insert(a).second) throw ValidationError("duplicate label '" + a + "' in alphabet");
  if (s.length < 1) throw ValidationError("sequence length must be positive");
}

}  // namespace locstruct
