#include "locstruct/error.hpp"
#include "locstruct/features.hpp"
#include "locstruct/inference.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace locstruct;

namespace {

enum class SeqLoss { Hamming, HammingCount, ZeroOne, Zero };

LossSpec spec_of(SeqLoss l) {
  switch (l) {
    case SeqLoss::Hamming: return HammingLoss{true};
    case SeqLoss::HammingCount: return HammingLoss{false};
    case SeqLoss::ZeroOne: return SequenceZeroOneLoss{};
    case SeqLoss::Zero: return ZeroLoss{};
  }
  return ZeroLoss{};
}

double oracle_loss(SeqLoss l, const std::vector<int>& a, const std::vector<int>& b) {
  switch (l) {
    case SeqLoss::Hamming: return oracle::hamming(a, b, true);
    case SeqLoss::HammingCount: return oracle::hamming(a, b, false);
    case SeqLoss::ZeroOne: return a == b ? 0.0 : 1.0;
    case SeqLoss::Zero: return 0.0;
  }
  return 0.0;
}

struct Best {
  std::vector<int> y;
  double value;
};

Best brute_augmented(const Eigen::VectorXd& w, const Input& x, const std::vector<int>& cur, SeqLoss l, int a) {
  const double base = oracle::sequence_score(w, x, cur, a);
  Best best{{}, -1e300};
  for (const auto& y : oracle::all_sequences(a, static_cast<int>(x.rows()))) {
    const double v = oracle::sequence_score(w, x, y, a) - base + oracle_loss(l, cur, y);
    if (v > best.value + 1e-12) best = {y, v};
  }
  return best;
}

Best brute_impute(const std::vector<Eigen::VectorXd>& ws, const std::vector<std::vector<int>>& zs, int k,
                  const Input& x, SeqLoss l, int a) {
  Best best{{}, 1e300};
  for (const auto& y : oracle::all_sequences(a, static_cast<int>(x.rows()))) {
    double v = 0.0;
    for (std::size_t i = 0; i < ws.size(); ++i) v += (oracle_loss(l, y, zs[i]) - oracle::sequence_score(ws[i], x, y, a)) / k;
    if (v < best.value - 1e-12) best = {y, v};
  }
  return best;
}

const std::vector<int>& labels(const StructuredOutput& y) { return std::get<LabelSequence>(y).labels; }

InferenceConfig exhaustive() { return {Backend::Exhaustive, kDefaultEnumerationCap}; }
InferenceConfig dp() { return {Backend::SequenceDP, kDefaultEnumerationCap}; }

}  // namespace

TEST_CASE("enumerate_outputs") {
  auto all = enumerate_outputs(oracle::sequence_space(2, 2));
  REQUIRE(all.size() == 4);
  CHECK(labels(all[0]) == std::vector<int>{0, 0});
  CHECK(labels(all[1]) == std::vector<int>{0, 1});
  CHECK(labels(all[2]) == std::vector<int>{1, 0});
  CHECK(labels(all[3]) == std::vector<int>{1, 1});

  auto leaves = enumerate_outputs(OutputSpace{Taxonomy::balanced(15, 1)});
  CHECK(leaves.size() == 15);
  CHECK(leaves.front() == StructuredOutput{TaxonomyLeaf{0}});

  auto big = oracle::sequence_space(9, 7);  // 4,782,969 sequences
  try {
    enumerate_outputs(big);
    FAIL("expected a capacity error");
  } catch (const CapacityError& e) {
    CHECK(std::string(e.what()).find("4782969") != std::string::npos);
  }
  CHECK(enumerate_outputs(oracle::sequence_space(3, 3), 27).size() == 27);
  CHECK_THROWS_AS(enumerate_outputs(oracle::sequence_space(3, 3), 26), CapacityError);
}

TEST_CASE("backend resolution") {
  OutputSpace tax{Taxonomy::balanced(2, 2)};
  CHECK(resolve_backend(Backend::Auto, tax) == Backend::Exhaustive);
  CHECK(resolve_backend(Backend::Auto, oracle::sequence_space(2, 2)) == Backend::SequenceDP);
  CHECK_THROWS_AS(resolve_backend(Backend::SequenceDP, tax), ContractViolation);
  CHECK_THROWS_AS(predict(Eigen::VectorXd::Zero(8), Input::Ones(1, 2), tax, dp()), ContractViolation);
  CHECK_THROWS_AS(predict(Eigen::VectorXd::Zero(7), Input::Ones(1, 2), tax), DimensionError);
  CHECK(parse_backend("dp") == Backend::SequenceDP);
  CHECK_THROWS_AS(parse_backend("beam"), ValidationError);
}

TEST_CASE("predict") {
  SUBCASE("zero weights pick the first output") {
    OutputSpace tax{oracle::irregular_taxonomy()};
    CHECK(predict(Eigen::VectorXd::Zero(5 * 3), Input::Ones(1, 3), tax) == StructuredOutput{TaxonomyLeaf{0}});
    auto seq = oracle::sequence_space(3, 4);
    for (auto cfg : {exhaustive(), dp()})
      CHECK(labels(predict(Eigen::VectorXd::Zero(9 + 6), Input::Ones(4, 2), seq, cfg)) == std::vector<int>{0, 0, 0, 0});
  }

  SUBCASE("w = Phi(x, leaf 3) selects leaf 3") {
    std::mt19937_64 rng(21);
    auto tax = Taxonomy::balanced(2, 3);
    OutputSpace space{tax};
    auto x = oracle::random_vector(rng, 4);
    Eigen::VectorXd w = joint_feature_tensor(x, TaxonomyLeaf{3}, tax);
    int best = -1;
    double best_score = -1e300;
    for (int l = 0; l < 8; ++l) {
      const double s = oracle::tensor_score(w, x, tax.code(l));
      if (s > best_score) {
        best = l;
        best_score = s;
      }
    }
    REQUIRE(best == 3);
    CHECK(predict(w, Input(x.transpose()), space) == StructuredOutput{TaxonomyLeaf{3}});
  }

  SUBCASE("DP matches brute force on A=2, L=3") {
    std::mt19937_64 rng(22);
    auto space = oracle::sequence_space(2, 3);
    for (int trial = 0; trial < 30; ++trial) {
      auto w = oracle::random_vector(rng, 4 + 2 * 2);
      auto x = oracle::random_input(rng, 3, 2);
      Best best{{}, -1e300};
      for (const auto& y : oracle::all_sequences(2, 3)) {
        const double v = oracle::sequence_score(w, x, y, 2);
        if (v > best.value) best = {y, v};
      }
      auto got = predict_scored(w, x, space, dp());
      CHECK(labels(got.output) == best.y);
      CHECK(got.value == doctest::Approx(best.value).epsilon(1e-12));
    }
  }

  SUBCASE("positive rescaling leaves the argmax unchanged") {
    std::mt19937_64 rng(23);
    OutputSpace tax{oracle::irregular_taxonomy()};
    auto seq = oracle::sequence_space(3, 4);
    for (int trial = 0; trial < 40; ++trial) {
      auto w1 = oracle::random_vector(rng, 5 * 3);
      auto x1 = oracle::random_input(rng, 1, 3);
      auto w2 = oracle::random_vector(rng, 9 + 3 * 2);
      auto x2 = oracle::random_input(rng, 4, 2);
      for (double alpha : {0.01, 0.5, 3.0, 1e4}) {
        CHECK(predict(alpha * w1, x1, tax) == predict(w1, x1, tax));
        CHECK(predict(alpha * w2, x2, seq) == predict(w2, x2, seq));
      }
    }
  }
}

TEST_CASE("loss_augmented_argmax") {
  SUBCASE("zero weights maximise the loss alone") {
    OutputSpace tax{oracle::irregular_taxonomy()};
    // From "oak" the farthest leaves meet it at the root: cat is first in pre-order.
    auto r = loss_augmented_argmax(Eigen::VectorXd::Zero(10), Input::Ones(1, 2), TaxonomyLeaf{2}, TreeAncestorLoss{}, tax);
    CHECK(r.z_star == StructuredOutput{TaxonomyLeaf{0}});
    CHECK(r.bound_value == 3.0);

    auto seq = oracle::sequence_space(3, 3);
    for (auto cfg : {exhaustive(), dp()}) {
      auto h = loss_augmented_argmax(Eigen::VectorXd::Zero(9 + 3), Input::Ones(3, 1), LabelSequence{{0, 2, 1}},
                                     HammingLoss{true}, seq, cfg);
      CHECK(labels(h.z_star) == std::vector<int>{1, 0, 0});
      CHECK(h.bound_value == doctest::Approx(1.0));
      auto z = loss_augmented_argmax(Eigen::VectorXd::Zero(9 + 3), Input::Ones(3, 1), LabelSequence{{0, 0, 0}},
                                     SequenceZeroOneLoss{}, seq, cfg);
      CHECK(labels(z.z_star) == std::vector<int>{0, 0, 1});
      CHECK(z.bound_value == 1.0);
    }
  }

  SUBCASE("a dominant current output is its own maximiser") {
    auto tax = Taxonomy::balanced(2, 2);
    OutputSpace space{tax};
    Eigen::VectorXd x(3);
    x << 1.0, -0.5, 0.25;
    // score(leaf 1) = 3 * |x|^2 = 3.9375, every other leaf scores 0, max tree loss is 2.
    Eigen::VectorXd w = 3.0 * joint_feature_tensor(x, TaxonomyLeaf{1}, tax);
    double best = -1e300;
    int arg = -1;
    for (int l = 0; l < 4; ++l) {
      const double v = oracle::tensor_score(w, x, tax.code(l)) - oracle::tensor_score(w, x, tax.code(1)) +
                       oracle::explicit_tree(tax).lca_height(tax.leaf_id(1), tax.leaf_id(l));
      if (v > best) {
        best = v;
        arg = l;
      }
    }
    REQUIRE(arg == 1);
    REQUIRE(best == 0.0);
    auto r = loss_augmented_argmax(w, Input(x.transpose()), TaxonomyLeaf{1}, TreeAncestorLoss{}, space);
    CHECK(r.z_star == StructuredOutput{TaxonomyLeaf{1}});
    CHECK(r.bound_value == 0.0);
  }

  SUBCASE("DP matches brute force on A=3, L=4 for every sequence loss") {
    std::mt19937_64 rng(24);
    auto space = oracle::sequence_space(3, 4);
    for (SeqLoss l : {SeqLoss::Hamming, SeqLoss::HammingCount, SeqLoss::ZeroOne, SeqLoss::Zero}) {
      for (int trial = 0; trial < 25; ++trial) {
        auto w = oracle::random_vector(rng, 9 + 3 * 2, trial % 2 ? 1.0 : 0.1);
        auto x = oracle::random_input(rng, 4, 2);
        auto cur = oracle::random_labels(rng, 3, 4);
        auto ref = brute_augmented(w, x, cur, l, 3);
        auto got = loss_augmented_argmax(w, x, LabelSequence{cur}, spec_of(l), space, dp());
        CHECK(labels(got.z_star) == ref.y);
        CHECK(got.bound_value == doctest::Approx(ref.value).epsilon(1e-12));
      }
    }
  }

  SUBCASE("contract errors") {
    auto seq = oracle::sequence_space(2, 2);
    CHECK_THROWS_AS(loss_augmented_argmax(Eigen::VectorXd::Zero(6), Input::Ones(2, 1), LabelSequence{{0, 1}},
                                          TreeAncestorLoss{}, seq),
                    ContractViolation);
    CHECK_THROWS_AS(loss_augmented_argmax(Eigen::VectorXd::Zero(6), Input::Ones(2, 1), LabelSequence{{0, 3}},
                                          HammingLoss{}, seq),
                    InvalidOutputError);
  }
}

TEST_CASE("bound validity and non-negativity") {
  std::mt19937_64 rng(25);
  OutputSpace tax{oracle::irregular_taxonomy()};
  auto seq = oracle::sequence_space(3, 5);
  for (int trial = 0; trial < 100; ++trial) {
    auto w = oracle::random_vector(rng, 5 * 4);
    auto x = oracle::random_input(rng, 1, 4);
    TaxonomyLeaf cur{trial % 5};
    auto r = loss_augmented_argmax(w, x, cur, TreeAncestorLoss{}, tax);
    CHECK(r.bound_value >= 0.0);
    CHECK(r.bound_value >= loss(TreeAncestorLoss{}, cur, predict(w, x, tax), tax));

    auto ws = oracle::random_vector(rng, 9 + 3 * 2);
    auto xs = oracle::random_input(rng, 5, 2);
    LabelSequence cs{oracle::random_labels(rng, 3, 5)};
    for (auto spec : {LossSpec{HammingLoss{true}}, LossSpec{SequenceZeroOneLoss{}}}) {
      auto rs = loss_augmented_argmax(ws, xs, cs, spec, seq);
      CHECK(rs.bound_value >= 0.0);
      CHECK(rs.bound_value >= loss(spec, cs, predict(ws, xs, seq), seq));
    }
  }
}

TEST_CASE("impute") {
  auto space = oracle::sequence_space(2, 3);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(4 + 2 * 2);

  SUBCASE("zero weights and Hamming loss return the single target") {
    StructuredOutput z = LabelSequence{{1, 0, 1}};
    std::vector<ImputationTerm> terms{{std::cref(zero), std::cref(z)}};
    for (auto cfg : {exhaustive(), dp()}) CHECK(impute_scored(terms, 3, Input::Ones(3, 2), HammingLoss{}, space, cfg).output == z);
  }

  SUBCASE("zero loss reduces to prediction") {
    std::mt19937_64 rng(26);
    auto w = oracle::random_vector(rng, 8);
    auto x = oracle::random_input(rng, 3, 2);
    StructuredOutput z = LabelSequence{{1, 1, 1}};
    std::vector<ImputationTerm> terms{{std::cref(w), std::cref(z)}};
    for (auto cfg : {exhaustive(), dp()}) CHECK(impute_scored(terms, 2, x, ZeroLoss{}, space, cfg).output == predict(w, x, space));
  }

  SUBCASE("two covering neighbourhoods: DP matches brute force") {
    std::mt19937_64 rng(27);
    for (SeqLoss l : {SeqLoss::Hamming, SeqLoss::HammingCount, SeqLoss::ZeroOne}) {
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<Eigen::VectorXd> ws{oracle::random_vector(rng, 8, 0.3), oracle::random_vector(rng, 8, 0.3)};
        std::vector<std::vector<int>> zs{oracle::random_labels(rng, 2, 3), oracle::random_labels(rng, 2, 3)};
        auto x = oracle::random_input(rng, 3, 2);
        std::vector<StructuredOutput> targets{LabelSequence{zs[0]}, LabelSequence{zs[1]}};
        std::vector<ImputationTerm> terms{{std::cref(ws[0]), std::cref(targets[0])},
                                          {std::cref(ws[1]), std::cref(targets[1])}};
        auto ref = brute_impute(ws, zs, 4, x, l, 2);
        auto got = impute_scored(terms, 4, x, spec_of(l), space, dp());
        CHECK(labels(got.output) == ref.y);
        CHECK(got.value == doctest::Approx(ref.value).epsilon(1e-12));
      }
    }
  }

  SUBCASE("empty covering set is a contract violation") {
    std::vector<ImputationTerm> none;
    CHECK_THROWS_AS(impute_scored(none, 2, Input::Ones(3, 2), HammingLoss{}, space), ContractViolation);
  }
}
