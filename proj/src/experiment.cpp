#include "locstruct/experiment.hpp"

#include "locstruct/error.hpp"
#include "locstruct/io.hpp"
#include "locstruct/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

namespace locstruct {

namespace {

ResultsRecord run_protocol(const ExperimentConfig& cfg, const Dataset& data, bool global) {
  validate_config(cfg);
  require_valid(data);
  if (data.labeled_count != data.size())
    throw ValidationError("experiment datasets must be fully labeled (" + std::to_string(data.unlabeled_count()) +
                          " points lack a truth output)");
  if (static_cast<std::size_t>(cfg.folds) > data.size())
    throw ValidationError("cannot split " + std::to_string(data.size()) + " points into " + std::to_string(cfg.folds) +
                          " folds");

  const LossSpec loss_spec = cfg.loss.value_or(default_loss(data.output_space));
  check_loss_compatible(loss_spec, data.output_space);
  const InferenceConfig inference{cfg.backend, kDefaultEnumerationCap};

  ResultsRecord rec;
  rec.method = global ? "global" : "local";
  rec.loss = loss_name(loss_spec);
  rec.config = cfg;
  rec.config.baseline = global;

  const auto start = std::chrono::steady_clock::now();
  const auto folds = make_folds(data.size(), cfg.folds, cfg.seed);
  for (int f = 0; f < cfg.folds; ++f) {
    const auto& test = folds[static_cast<std::size_t>(f)];
    std::vector<char> in_test(data.size(), 0);
    for (std::size_t i : test) in_test[i] = 1;
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < data.size(); ++i)
      if (!in_test[i]) train.push_back(i);

    std::seed_seq fold_seed{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                            static_cast<std::uint32_t>(f + 1)};
    std::mt19937_64 rng(fold_seed);
    std::shuffle(train.begin(), train.end(), rng);
    const std::size_t labeled = labeled_count_for(train.size(), cfg.labeled_fraction);

    Dataset split;
    split.output_space = data.output_space;
    split.labeled_count = labeled;
    const std::size_t used = global ? labeled : train.size();
    for (std::size_t r = 0; r < used; ++r) {
      DataPoint p = data.points[train[r]];
      if (r >= labeled) p.truth.reset();
      split.points.push_back(std::move(p));
    }

    Hyperparameters hp = cfg.hp;
    if (global) hp.k = static_cast<int>(labeled);

    double total = 0.0;
    try {
      TrainReport report = fit(split, hp, loss_spec, inference);
      for (std::size_t i : test) {
        const auto& x = data.points[i].input;
        StructuredOutput pred = global ? predict(report.model.weights.front(), x, data.output_space, inference)
                                       : report.model.predict(x);
        total += loss(loss_spec, *data.points[i].truth, pred, data.output_space);
      }
    } catch (const ValidationError& e) {
      throw ValidationError("fold " + std::to_string(f) + ": " + e.what());
    } catch (const NumericError& e) {
      throw NumericError("fold " + std::to_string(f) + ": " + e.what());
    }
    rec.folds.push_back({f, train.size(), labeled, test.size(), total / static_cast<double>(test.size())});
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const double count = static_cast<double>(rec.folds.size());
  double sum = 0.0;
  for (const auto& fr : rec.folds) sum += fr.average_loss;
  rec.mean_loss = sum / count;
  double sq = 0.0;
  for (const auto& fr : rec.folds) sq += (fr.average_loss - rec.mean_loss) * (fr.average_loss - rec.mean_loss);
  rec.std_loss = count > 1 ? std::sqrt(sq / (count - 1)) : 0.0;
  rec.standard_error = rec.std_loss / std::sqrt(count);
  return rec;
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.folds < 2) throw ValidationError("folds must be >= 2");
  if (!(cfg.labeled_fraction > 0.0 && cfg.labeled_fraction <= 1.0))
    throw ValidationError("labeled_fraction must lie in (0, 1]");
  if (!cfg.synthetic && cfg.dataset_path.empty()) throw ValidationError("config names neither a dataset nor a generator");
  if (cfg.hp.iterations < 1) throw ValidationError("iterations must be >= 1");
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, int folds, std::uint64_t seed) {
  if (folds < 1 || static_cast<std::size_t>(folds) > n)
    throw ValidationError("cannot split " + std::to_string(n) + " points into " + std::to_string(folds) + " folds");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  const std::size_t base = n / static_cast<std::size_t>(folds);
  const std::size_t extra = n % static_cast<std::size_t>(folds);
  std::vector<std::vector<std::size_t>> out;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < static_cast<std::size_t>(folds); ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    std::vector<std::size_t> part(perm.begin() + static_cast<long>(pos), perm.begin() + static_cast<long>(pos + size));
    std::sort(part.begin(), part.end());
    out.push_back(std::move(part));
    pos += size;
  }
  return out;
}

std::size_t labeled_count_for(std::size_t n_train, double fraction) {
  const auto l = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n_train)));
  return std::clamp<std::size_t>(l, 1, n_train);
}

Dataset experiment_dataset(const ExperimentConfig& cfg) {
  if (cfg.synthetic) return generate_synthetic(*cfg.synthetic);
  return load_dataset(cfg.dataset_path);
}

ResultsRecord run_experiment(const ExperimentConfig& cfg) { return run_experiment(cfg, experiment_dataset(cfg)); }

ResultsRecord run_experiment(const ExperimentConfig& cfg, const Dataset& data) {
  return run_protocol(cfg, data, cfg.baseline);
}

ResultsRecord run_baseline_global(const ExperimentConfig& cfg) {
  return run_baseline_global(cfg, experiment_dataset(cfg));
}

ResultsRecord run_baseline_global(const ExperimentConfig& cfg, const Dataset& data) {
  return run_protocol(cfg, data, true);
}

}  // namespace locstruct
