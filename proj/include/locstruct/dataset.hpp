#pragma once

#include "locstruct/output.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace locstruct {

/// Input of one data point. Each row is one position: a single row for
/// taxonomy spaces, `length` rows for sequence spaces. Columns are d_x.
using Input = Eigen::MatrixXd;

struct DataPoint {
  Input input;
  std::optional<StructuredOutput> truth;  // present iff the point is labeled
};

/// Points [0, labeled_count) are labeled, the rest unlabeled.
struct Dataset {
  std::vector<DataPoint> points;
  std::size_t labeled_count = 0;
  OutputSpace output_space;

  std::size_t size() const { return points.size(); }
  std::size_t unlabeled_count() const { return points.size() - labeled_count; }
  /// Column count of the first input (0 for an empty dataset).
  int input_dim() const { return points.empty() ? 0 : static_cast<int>(points.front().input.cols()); }
};

/// Every invariant violation in `ds`; empty when the dataset is well formed.
std::vector<std::string> validate_dataset(const Dataset& ds);

/// Throws ValidationError listing all violations when validate_dataset is non-empty.
void require_valid(const Dataset& ds);

struct Hyperparameters {
  int k = 0;  // 0 selects default_k(n)
  double C = 1.0;
  double eta = 0.01;
  double eta_decay = 1.0;
  int iterations = 50;
  bool early_stop = false;
  double early_stop_tolerance = 1e-8;
};

/// max(2, n / 10), clipped to n.
int default_k(std::size_t n);

/// Neighbourhood size actually used for a dataset of `n` points.
int effective_k(const Hyperparameters& hp, std::size_t n);

/// Throws ValidationError when a field is out of range for `n` training points.
void validate_hyperparameters(const Hyperparameters& hp, std::size_t n);

}  // namespace locstruct
