#pragma once

// Brute-force reference computations used only by the tests. Nothing here
// calls into the inference or feature code it is used to check.

#include "locstruct/dataset.hpp"
#include "locstruct/output.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using locstruct::Input;

inline std::vector<std::vector<int>> all_sequences(int alphabet, int length) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void()> rec = [&] {
    if (static_cast<int>(cur.size()) == length) {
      out.push_back(cur);
      return;
    }
    for (int a = 0; a < alphabet; ++a) {
      cur.push_back(a);
      rec();
      cur.pop_back();
    }
  };
  rec();
  return out;
}

// w' Phi(x, y) written out term by term from the block layout.
inline double sequence_score(const Eigen::VectorXd& w, const Input& x, const std::vector<int>& y, int alphabet) {
  const auto d = x.cols();
  double s = 0.0;
  for (std::size_t t = 0; t + 1 < y.size(); ++t) s += w[y[t] * alphabet + y[t + 1]];
  for (std::size_t t = 0; t < y.size(); ++t)
    for (Eigen::Index c = 0; c < d; ++c) s += w[alphabet * alphabet + y[t] * d + c] * x(static_cast<Eigen::Index>(t), c);
  return s;
}

inline double tensor_score(const Eigen::VectorXd& w, const Eigen::VectorXd& x, const Eigen::VectorXd& code) {
  double s = 0.0;
  for (Eigen::Index p = 0; p < x.size(); ++p)
    for (Eigen::Index q = 0; q < code.size(); ++q) s += w[p * code.size() + q] * x[p] * code[q];
  return s;
}

inline double hamming(const std::vector<int>& a, const std::vector<int>& b, bool normalized) {
  double m = 0;
  for (std::size_t t = 0; t < a.size(); ++t) m += a[t] != b[t];
  return normalized ? m / static_cast<double>(a.size()) : m;
}

// Explicit tree given as child -> parent names; LCA by intersecting ancestor
// chains, height by exhaustive search over descendants.
struct ExplicitTree {
  std::map<std::string, std::string> parent;  // root maps to ""

  std::vector<std::string> chain(const std::string& v) const {
    std::vector<std::string> out{v};
    while (!parent.at(out.back()).empty()) out.push_back(parent.at(out.back()));
    return out;
  }
  bool is_descendant(const std::string& v, const std::string& anc) const {
    auto c = chain(v);
    return std::find(c.begin(), c.end(), anc) != c.end();
  }
  int height(const std::string& v) const {
    int best = 0;
    for (const auto& [node, p] : parent)
      if (is_descendant(node, v)) best = std::max(best, static_cast<int>(chain(node).size() - chain(v).size()));
    return best;
  }
  std::string lca(const std::string& a, const std::string& b) const {
    for (const auto& v : chain(a))
      if (is_descendant(b, v)) return v;
    return "";
  }
  int lca_height(const std::string& a, const std::string& b) const { return height(lca(a, b)); }
};

inline ExplicitTree explicit_tree(const locstruct::Taxonomy& tax) {
  ExplicitTree t;
  for (const auto& n : tax.specs()) t.parent[n.id] = n.parent;
  return t;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

inline Input random_input(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Input x(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) x(r, c) = g(rng);
  return x;
}

inline std::vector<int> random_labels(std::mt19937_64& rng, int alphabet, int length) {
  std::uniform_int_distribution<int> pick(0, alphabet - 1);
  std::vector<int> y;
  for (int t = 0; t < length; ++t) y.push_back(pick(rng));
  return y;
}

inline locstruct::OutputSpace sequence_space(int alphabet, int length) {
  locstruct::SequenceSpace s;
  for (int a = 0; a < alphabet; ++a) s.alphabet.push_back(std::string(1, static_cast<char>('a' + a)));
  s.length = length;
  return locstruct::OutputSpace{s};
}

// Small irregular taxonomy: leaves at different depths.
inline locstruct::Taxonomy irregular_taxonomy() {
  return locstruct::Taxonomy({{"root", "", {}},
                              {"animal", "root", {}},
                              {"cat", "animal", {}},
                              {"bird", "animal", {}},
                              {"plant", "root", {}},
                              {"tree", "plant", {}},
                              {"oak", "tree", {}},
                              {"pine", "tree", {}},
                              {"rock", "root", {}}});
}

}  // namespace oracle
