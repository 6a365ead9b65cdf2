#pragma once

#include "locstruct/dataset.hpp"
#include "locstruct/output.hpp"

#include <cstdint>

namespace locstruct {

/// Gaussian clusters whose outputs follow a cluster-specific linear rule
/// argmax_y w_c' Phi(x, y). With `opposed_rules`, odd clusters use -w_0 and
/// even clusters w_0; otherwise each cluster draws its own rule.
struct SyntheticSpec {
  int clusters = 2;
  int points_per_cluster = 100;
  int input_dim = 5;
  OutputSpace output_space{Taxonomy::balanced(2, 3)};
  double label_noise = 0.0;  // probability of replacing an output by a uniform draw
  double separation = 4.0;   // distance of each cluster centre from the origin
  double spread = 1.0;       // per-coordinate standard deviation around the centre
  bool opposed_rules = true;
  std::uint64_t seed = 0;
};

/// Every generated point is labeled; points are grouped cluster by cluster.
Dataset generate_synthetic(const SyntheticSpec& spec);

/// Cluster index of each point produced by generate_synthetic(spec).
std::vector<int> synthetic_cluster_ids(const SyntheticSpec& spec);

}  // namespace locstruct
