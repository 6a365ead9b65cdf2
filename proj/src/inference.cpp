#include "locstruct/inference.hpp"

#include "locstruct/error.hpp"
#include "locstruct/features.hpp"

#include <limits>
#include <map>
#include <optional>
#include <set>

namespace locstruct {

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::Auto: return "auto";
    case Backend::Exhaustive: return "exhaustive";
    case Backend::SequenceDP: return "dp";
  }
  return "auto";
}

Backend parse_backend(const std::string& name) {
  if (name == "auto") return Backend::Auto;
  if (name == "exhaustive") return Backend::Exhaustive;
  if (name == "dp") return Backend::SequenceDP;
  throw ValidationError("unknown backend '" + name + "' (expected auto, exhaustive or dp)");
}

Backend resolve_backend(Backend requested, const OutputSpace& space) {
  if (requested == Backend::Auto) return space.is_sequence() ? Backend::SequenceDP : Backend::Exhaustive;
  if (requested == Backend::SequenceDP && !space.is_sequence())
    throw ContractViolation("the sequence DP backend requires a sequence output space");
  return requested;
}

void for_each_output(const OutputSpace& space, std::uint64_t cap,
                     const std::function<void(const StructuredOutput&)>& visit) {
  const std::uint64_t size = space.cardinality();
  if (size > cap)
    throw CapacityError("output space has " +
                        (size == std::numeric_limits<std::uint64_t>::max() ? std::string("more than 2^64")
                                                                           : std::to_string(size)) +
                        " elements, exceeding the enumeration cap of " + std::to_string(cap));
  if (space.is_taxonomy()) {
    for (int l = 0; l < static_cast<int>(space.taxonomy().num_leaves()); ++l) visit(TaxonomyLeaf{l});
    return;
  }
  const auto& s = space.sequence();
  const int a_size = s.alphabet_size();
  if (a_size == 0) return;
  StructuredOutput y = LabelSequence{std::vector<int>(static_cast<std::size_t>(s.length), 0)};
  auto& labels = std::get<LabelSequence>(y).labels;
  while (true) {
    visit(y);
    int t = s.length - 1;
    while (t >= 0 && labels[static_cast<std::size_t>(t)] == a_size - 1) labels[static_cast<std::size_t>(t--)] = 0;
    if (t < 0) return;
    ++labels[static_cast<std::size_t>(t)];
  }
}

std::vector<StructuredOutput> enumerate_outputs(const OutputSpace& space, std::uint64_t cap) {
  std::vector<StructuredOutput> out;
  for_each_output(space, cap, [&](const StructuredOutput& y) { out.push_back(y); });
  return out;
}

namespace {

void check_problem(const Eigen::VectorXd& w, const Input& x, const OutputSpace& space) {
  const Eigen::Index rows = space.is_sequence() ? space.sequence().length : 1;
  if (x.rows() != rows)
    throw DimensionError("input has " + std::to_string(x.rows()) + " positions, expected " + std::to_string(rows));
  const auto m = feature_dimension(feature_spec(space, static_cast<int>(x.cols())));
  if (static_cast<std::size_t>(w.size()) != m)
    throw DimensionError("weight vector has dimension " + std::to_string(w.size()) + ", expected " + std::to_string(m));
}

// Max-sum lattice over label sequences: node(t, a) + edge(a, b) between
// consecutive positions. Decoding returns the lexicographically first maximiser.
class Lattice {
 public:
  Lattice(Eigen::MatrixXd node, Eigen::MatrixXd edge) : node_(std::move(node)), edge_(std::move(edge)) {
    const Eigen::Index length = node_.rows();
    const Eigen::Index a_size = node_.cols();
    suffix_ = node_;
    for (Eigen::Index t = length - 2; t >= 0; --t)
      for (Eigen::Index a = 0; a < a_size; ++a)
        suffix_(t, a) = node_(t, a) + (edge_.row(a) + suffix_.row(t + 1)).maxCoeff();
  }

  int length() const { return static_cast<int>(node_.rows()); }
  int alphabet() const { return static_cast<int>(node_.cols()); }
  double edge(int a, int b) const { return edge_(a, b); }

  // Best total over sequences starting with label `a` at position `t`, counted from t on.
  double suffix(int t, int a) const { return suffix_(t, a); }

  std::vector<int> best() const {
    std::vector<int> labels;
    int first = 0;
    for (int a = 1; a < alphabet(); ++a)
      if (suffix_(0, a) > suffix_(0, first)) first = a;
    labels.push_back(first);
    complete(labels);
    return labels;
  }

  // Extends a non-empty prefix to full length with the best lexicographically-first suffix.
  void complete(std::vector<int>& labels) const {
    while (static_cast<int>(labels.size()) < length()) {
      const auto t = static_cast<Eigen::Index>(labels.size());
      const int prev = labels.back();
      int pick = 0;
      double pick_value = edge_(prev, 0) + suffix_(t, 0);
      for (int b = 1; b < alphabet(); ++b) {
        const double v = edge_(prev, b) + suffix_(t, b);
        if (v > pick_value) {
          pick = b;
          pick_value = v;
        }
      }
      labels.push_back(pick);
    }
  }

  double path(const std::vector<int>& labels, std::size_t upto) const {
    double total = 0.0;
    for (std::size_t t = 0; t < upto; ++t) {
      total += node_(static_cast<Eigen::Index>(t), labels[t]);
      if (t > 0) total += edge_(labels[t - 1], labels[t]);
    }
    return total;
  }

 private:
  Eigen::MatrixXd node_;
  Eigen::MatrixXd edge_;
  Eigen::MatrixXd suffix_;
};

// Maximises path(y) + bonus(y), where bonus(y) = exceptions[y] for the listed
// sequences and `default_bonus` for every other sequence. Exact: the complement
// of the exception set is covered by the subtrees hanging off its prefix trie.
std::vector<int> best_with_exceptions(const Lattice& lat, double default_bonus,
                                      const std::map<std::vector<int>, double>& exceptions) {
  if (exceptions.empty()) return lat.best();
  std::optional<std::vector<int>> best;
  double best_value = 0.0;
  auto offer = [&](std::vector<int> seq, double value) {
    if (!best || value > best_value || (value == best_value && seq < *best)) {
      best = std::move(seq);
      best_value = value;
    }
  };
  for (const auto& [seq, bonus] : exceptions) offer(seq, lat.path(seq, seq.size()) + bonus);

  std::set<std::vector<int>> prefixes;
  for (const auto& [seq, bonus] : exceptions)
    for (std::size_t t = 0; t <= seq.size(); ++t) prefixes.emplace(seq.begin(), seq.begin() + static_cast<long>(t));

  for (const auto& prefix : prefixes) {
    const auto t = prefix.size();
    if (static_cast<int>(t) == lat.length()) continue;
    const double head = lat.path(prefix, t);
    for (int a = 0; a < lat.alphabet(); ++a) {
      std::vector<int> seq = prefix;
      seq.push_back(a);
      if (prefixes.count(seq)) continue;
      double value = head + lat.suffix(static_cast<int>(t), a) + default_bonus;
      if (t > 0) value += lat.edge(prefix.back(), a);
      lat.complete(seq);
      offer(std::move(seq), value);
    }
  }
  return *best;
}

Eigen::MatrixXd emission_scores(const Eigen::VectorXd& w, const Input& x, int a_size) {
  const auto d = static_cast<int>(x.cols());
  Eigen::MatrixXd e(x.rows(), a_size);
  for (int a = 0; a < a_size; ++a) e.col(a) = x * w.segment(seqlayout::emission(a, a_size, d), d);
  return e;
}

Eigen::MatrixXd transition_scores(const Eigen::VectorXd& w, int a_size) {
  Eigen::MatrixXd tr(a_size, a_size);
  for (int a = 0; a < a_size; ++a)
    for (int b = 0; b < a_size; ++b) tr(a, b) = w[seqlayout::transition(a, b, a_size)];
  return tr;
}

double augmented_value(double base, const Eigen::VectorXd& w, const Input& x, const StructuredOutput& y_cur,
                       const StructuredOutput& y, const LossSpec& loss_spec, const OutputSpace& space) {
  return (score(w, x, y, space) - base) + loss(loss_spec, y_cur, y, space);
}

}  // namespace

ScoredOutput predict_scored(const Eigen::VectorXd& w, const Input& x, const OutputSpace& space,
                            const InferenceConfig& cfg) {
  check_problem(w, x, space);
  if (resolve_backend(cfg.backend, space) == Backend::SequenceDP) {
    const int a_size = space.sequence().alphabet_size();
    Lattice lat(emission_scores(w, x, a_size), transition_scores(w, a_size));
    StructuredOutput y = LabelSequence{lat.best()};
    const double value = score(w, x, y, space);
    return {std::move(y), value};
  }
  std::optional<ScoredOutput> best;
  for_each_output(space, cfg.enumeration_cap, [&](const StructuredOutput& y) {
    const double v = score(w, x, y, space);
    if (!best || v > best->value) best = ScoredOutput{y, v};
  });
  if (!best) throw ContractViolation("output space is empty");
  return *best;
}

StructuredOutput predict(const Eigen::VectorXd& w, const Input& x, const OutputSpace& space,
                         const InferenceConfig& cfg) {
  return predict_scored(w, x, space, cfg).output;
}

AugmentedTarget loss_augmented_argmax(const Eigen::VectorXd& w, const Input& x, const StructuredOutput& y_cur,
                                      const LossSpec& loss_spec, const OutputSpace& space,
                                      const InferenceConfig& cfg) {
  check_problem(w, x, space);
  check_loss_compatible(loss_spec, space);
  space.check(y_cur);
  const double base = score(w, x, y_cur, space);

  if (resolve_backend(cfg.backend, space) == Backend::SequenceDP) {
    const int a_size = space.sequence().alphabet_size();
    const auto& cur = std::get<LabelSequence>(y_cur).labels;
    Eigen::MatrixXd node = emission_scores(w, x, a_size);
    std::vector<int> labels;
    if (const auto* h = std::get_if<HammingLoss>(&loss_spec)) {
      const double per_position = h->normalized ? 1.0 / static_cast<double>(cur.size()) : 1.0;
      for (Eigen::Index t = 0; t < node.rows(); ++t)
        for (int a = 0; a < a_size; ++a)
          if (a != cur[static_cast<std::size_t>(t)]) node(t, a) += per_position;
      labels = Lattice(std::move(node), transition_scores(w, a_size)).best();
    } else if (std::holds_alternative<SequenceZeroOneLoss>(loss_spec)) {
      Lattice lat(std::move(node), transition_scores(w, a_size));
      labels = best_with_exceptions(lat, 1.0, {{cur, 0.0}});
    } else {
      labels = Lattice(std::move(node), transition_scores(w, a_size)).best();
    }
    StructuredOutput z = LabelSequence{std::move(labels)};
    const double value = augmented_value(base, w, x, y_cur, z, loss_spec, space);
    // y_cur itself scores exactly 0; never report a rounding-negative bound.
    if (value < 0.0) return {y_cur, 0.0};
    return {std::move(z), value};
  }

  std::optional<AugmentedTarget> best;
  for_each_output(space, cfg.enumeration_cap, [&](const StructuredOutput& y) {
    const double v = augmented_value(base, w, x, y_cur, y, loss_spec, space);
    if (!best || v > best->bound_value) best = AugmentedTarget{y, v};
  });
  if (!best) throw ContractViolation("output space is empty");
  return *best;
}

double imputation_objective(std::span<const ImputationTerm> terms, int k, const Input& x, const StructuredOutput& y,
                            const LossSpec& loss_spec, const OutputSpace& space) {
  const Eigen::VectorXd phi = joint_feature(x, y, space);
  const double inv_k = 1.0 / static_cast<double>(k);
  double total = 0.0;
  for (const auto& term : terms) {
    const Eigen::VectorXd& w = term.weights.get();
    if (w.size() != phi.size())
      throw DimensionError("weight vector has dimension " + std::to_string(w.size()) + ", expected " +
                           std::to_string(phi.size()));
    total += inv_k * (loss(loss_spec, y, term.target.get(), space) - w.dot(phi));
  }
  return total;
}

ScoredOutput impute_scored(std::span<const ImputationTerm> terms, int k, const Input& x, const LossSpec& loss_spec,
                           const OutputSpace& space, const InferenceConfig& cfg) {
  if (terms.empty()) throw ContractViolation("imputation needs at least one covering neighbourhood");
  if (k < 1) throw ContractViolation("neighbourhood size k must be positive");
  check_loss_compatible(loss_spec, space);
  for (const auto& term : terms) {
    check_problem(term.weights.get(), x, space);
    space.check(term.target.get());
  }

  if (resolve_backend(cfg.backend, space) == Backend::SequenceDP) {
    const int a_size = space.sequence().alphabet_size();
    const double inv_k = 1.0 / static_cast<double>(k);
    Eigen::VectorXd mean_w = Eigen::VectorXd::Zero(terms.front().weights.get().size());
    for (const auto& term : terms) mean_w += term.weights.get();
    mean_w *= inv_k;

    // Minimising loss - score is maximising score - loss.
    Eigen::MatrixXd node = emission_scores(mean_w, x, a_size);
    std::vector<int> labels;
    if (const auto* h = std::get_if<HammingLoss>(&loss_spec)) {
      const double per_position = (h->normalized ? 1.0 / static_cast<double>(x.rows()) : 1.0) * inv_k;
      for (const auto& term : terms) {
        const auto& z = std::get<LabelSequence>(term.target.get()).labels;
        for (Eigen::Index t = 0; t < node.rows(); ++t)
          for (int a = 0; a < a_size; ++a)
            if (a != z[static_cast<std::size_t>(t)]) node(t, a) -= per_position;
      }
      labels = Lattice(std::move(node), transition_scores(mean_w, a_size)).best();
    } else if (std::holds_alternative<SequenceZeroOneLoss>(loss_spec)) {
      std::map<std::vector<int>, double> hits;
      for (const auto& term : terms) hits[std::get<LabelSequence>(term.target.get()).labels] += 1.0;
      const double total = static_cast<double>(terms.size());
      std::map<std::vector<int>, double> bonus;
      for (const auto& [seq, count] : hits) bonus[seq] = -inv_k * (total - count);
      Lattice lat(std::move(node), transition_scores(mean_w, a_size));
      labels = best_with_exceptions(lat, -inv_k * total, bonus);
    } else {
      labels = Lattice(std::move(node), transition_scores(mean_w, a_size)).best();
    }
    StructuredOutput y = LabelSequence{std::move(labels)};
    const double value = imputation_objective(terms, k, x, y, loss_spec, space);
    return {std::move(y), value};
  }

  std::optional<ScoredOutput> best;
  for_each_output(space, cfg.enumeration_cap, [&](const StructuredOutput& y) {
    const double v = imputation_objective(terms, k, x, y, loss_spec, space);
    if (!best || v < best->value) best = ScoredOutput{y, v};
  });
  if (!best) throw ContractViolation("output space is empty");
  return *best;
}

}  // namespace locstruct
