#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "simscope/objectives.hpp"
#include "simscope/snapshot.hpp"

namespace simscope {

struct AdamSettings {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias-corrected moments over a flat parameter vector.
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t size, AdamSettings settings);
  void step(Vector& params, const Vector& grad);
  std::int64_t iterations() const { return t_; }

 private:
  AdamSettings settings_;
  Vector m_;
  Vector v_;
  std::int64_t t_ = 0;
};

struct TrainOptions {
  AdamSettings adam;
  Eigen::Index batch_size = 64;
  std::int64_t steps = 0;
  std::uint64_t seed = 0;
  /// Steps at which the evaluation batch is traced; empty selects
  /// default_snapshot_steps(steps).
  std::vector<std::int64_t> snapshot_steps;
  /// Keep every snapshot trace in TrainResult::snapshots.
  bool keep_traces = false;
  /// When set, snapshots are dumped here as SSAD files plus manifest.json.
  std::optional<std::filesystem::path> output_dir;
  DumpDtype dump_dtype = DumpDtype::kFloat64;
};

/// {0, 1%, 5%, 10%, 25%, 50%, 100%} of `total_steps`, deduplicated.
std::vector<std::int64_t> default_snapshot_steps(std::int64_t total_steps);

struct Snapshot {
  std::int64_t step = 0;
  ForwardTrace trace;
  LossBreakdown eval_loss;
};

struct TrainResult {
  ModelParams params;
  SnapshotManifest manifest;
  std::vector<Snapshot> snapshots;  // empty unless keep_traces
  std::vector<double> loss_history;  // training-batch loss per step
};

/// Deterministic given (params, data, cfg, options). Minibatches come from
/// seeded epoch permutations of `train_rows`; sampling noise is keyed by
/// (seed, step, example row). Snapshot traces draw from a stream derived
/// from kEvalStream and the objective configuration: every snapshot of a run
/// sees the same draw, while differently configured runs do not share noise.
/// A non-finite loss aborts with kNumerical, reporting the step and loss
/// breakdown.
TrainResult train(ModelParams params, const Matrix& train_rows,
                  const Matrix& eval_batch, ObjectiveConfig cfg,
                  const TrainOptions& options);

}  // namespace simscope
