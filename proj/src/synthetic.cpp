#include "locstruct/synthetic.hpp"

#include "locstruct/error.hpp"
#include "locstruct/features.hpp"
#include "locstruct/inference.hpp"

#include <random>

namespace locstruct {

namespace {

Eigen::VectorXd gaussian_vector(std::mt19937_64& rng, Eigen::Index size) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = normal(rng);
  return v;
}

StructuredOutput uniform_output(std::mt19937_64& rng, const OutputSpace& space) {
  if (space.is_taxonomy()) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(space.taxonomy().num_leaves()) - 1);
    return TaxonomyLeaf{pick(rng)};
  }
  const auto& s = space.sequence();
  std::uniform_int_distribution<int> pick(0, s.alphabet_size() - 1);
  LabelSequence y;
  for (int t = 0; t < s.length; ++t) y.labels.push_back(pick(rng));
  return y;
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.clusters < 1) throw ValidationError("synthetic spec needs at least one cluster");
  if (spec.points_per_cluster < 1) throw ValidationError("synthetic spec needs at least one point per cluster");
  if (spec.input_dim < 1) throw ValidationError("synthetic spec needs input_dim >= 1");
  if (!(spec.label_noise >= 0.0 && spec.label_noise <= 1.0)) throw ValidationError("label_noise must lie in [0, 1]");
  if (!(spec.spread >= 0.0) || !(spec.separation >= 0.0))
    throw ValidationError("spread and separation must be non-negative");
  validate_output_space(spec.output_space);

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto m = static_cast<Eigen::Index>(feature_dimension(feature_spec(spec.output_space, spec.input_dim)));
  const int positions = spec.output_space.is_sequence() ? spec.output_space.sequence().length : 1;

  std::vector<Eigen::VectorXd> centers;
  std::vector<Eigen::VectorXd> rules;
  const Eigen::VectorXd base_rule = gaussian_vector(rng, m);
  for (int c = 0; c < spec.clusters; ++c) {
    Eigen::VectorXd dir = gaussian_vector(rng, spec.input_dim);
    const double norm = dir.norm();
    centers.push_back(norm > 0 ? Eigen::VectorXd(dir * (spec.separation / norm)) : dir);
    if (spec.opposed_rules)
      rules.push_back(c % 2 == 0 ? base_rule : Eigen::VectorXd(-base_rule));
    else
      rules.push_back(c == 0 ? base_rule : gaussian_vector(rng, m));
  }

  Dataset ds;
  ds.output_space = spec.output_space;
  for (int c = 0; c < spec.clusters; ++c) {
    for (int p = 0; p < spec.points_per_cluster; ++p) {
      Input x(positions, spec.input_dim);
      for (int t = 0; t < positions; ++t)
        x.row(t) = (centers[static_cast<std::size_t>(c)] + spec.spread * gaussian_vector(rng, spec.input_dim)).transpose();
      StructuredOutput y = predict(rules[static_cast<std::size_t>(c)], x, spec.output_space);
      if (spec.label_noise > 0.0 && unit(rng) < spec.label_noise) y = uniform_output(rng, spec.output_space);
      ds.points.push_back({std::move(x), std::move(y)});
    }
  }
  ds.labeled_count = ds.points.size();
  return ds;
}

std::vector<int> synthetic_cluster_ids(const SyntheticSpec& spec) {
  std::vector<int> ids;
  for (int c = 0; c < spec.clusters; ++c) ids.insert(ids.end(), static_cast<std::size_t>(spec.points_per_cluster), c);
  return ids;
}

}  // namespace locstruct
