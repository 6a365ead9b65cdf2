#include "locstruct/dataset.hpp"

#include "locstruct/error.hpp"

#include <algorithm>
#include <cmath>

namespace locstruct {

std::vector<std::string> validate_dataset(const Dataset& ds) {
  std::vector<std::string> report;
  try {
    validate_output_space(ds.output_space);
  } catch (const Error& e) {
    report.emplace_back(std::string("output space: ") + e.what());
    return report;
  }
  if (ds.points.empty()) report.emplace_back("dataset has no points");
  if (ds.labeled_count == 0) report.emplace_back("no labeled points");
  if (ds.labeled_count > ds.points.size())
    report.emplace_back("labeled_count " + std::to_string(ds.labeled_count) + " exceeds point count " +
                        std::to_string(ds.points.size()));

  const Eigen::Index rows = ds.output_space.is_sequence() ? ds.output_space.sequence().length : 1;
  const Eigen::Index dim = ds.points.empty() ? 0 : ds.points.front().input.cols();
  if (!ds.points.empty() && dim == 0) report.emplace_back("input dimension is zero");

  for (std::size_t i = 0; i < ds.points.size(); ++i) {
    const auto& p = ds.points[i];
    const std::string at = "point " + std::to_string(i) + ": ";
    if (p.input.rows() != rows)
      report.push_back(at + "input has " + std::to_string(p.input.rows()) + " positions, expected " + std::to_string(rows));
    if (p.input.cols() != dim)
      report.push_back(at + "input dimension " + std::to_string(p.input.cols()) + " differs from " + std::to_string(dim));
    if (!p.input.allFinite()) report.push_back(at + "input has non-finite entries");
    const bool should_be_labeled = i < ds.labeled_count;
    if (should_be_labeled && !p.truth) report.push_back(at + "labeled point is missing its truth output");
    if (!should_be_labeled && p.truth) report.push_back(at + "unlabeled point carries a truth output");
    if (p.truth) {
      try {
        ds.output_space.check(*p.truth);
      } catch (const Error& e) {
        report.push_back(at + e.what());
      }
    }
  }
  return report;
}

void require_valid(const Dataset& ds) {
  auto report = validate_dataset(ds);
  if (report.empty()) return;
  std::string msg = "invalid dataset:";
  for (const auto& r : report) msg += "\n  " + r;
  throw ValidationError(msg);
}

int default_k(std::size_t n) {
  const auto k = std::max<std::size_t>(2, n / 10);
  return static_cast<int>(std::min(k, n));
}

int effective_k(const Hyperparameters& hp, std::size_t n) { return hp.k > 0 ? hp.k : default_k(n); }

void validate_hyperparameters(const Hyperparameters& hp, std::size_t n) {
  const int k = effective_k(hp, n);
  if (hp.k < 0) throw ValidationError("k must be non-negative (0 selects the default)");
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw ValidationError("k = " + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");
  if (!std::isfinite(hp.C) || hp.C < 0) throw ValidationError("C must be finite and >= 0");
  if (!std::isfinite(hp.eta) || hp.eta <= 0) throw ValidationError("eta must be finite and > 0");
  if (!std::isfinite(hp.eta_decay) || hp.eta_decay <= 0 || hp.eta_decay > 1)
    throw ValidationError("eta_decay must lie in (0, 1]");
  if (hp.iterations < 1) throw ValidationError("iterations must be >= 1");
  if (!std::isfinite(hp.early_stop_tolerance) || hp.early_stop_tolerance < 0)
    throw ValidationError("early_stop_tolerance must be finite and >= 0");
}

}  // namespace locstruct
