#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "simscope/collapse.hpp"
#include "simscope/toy_data.hpp"
#include "simscope/training.hpp"

namespace simscope {

enum class EvalSplit { kTrain, kTest };

/// Everything needed to reproduce one toy training run. The data fields
/// (factor grid, split and evaluation batch) are keyed by `data_seed`, which
/// runs of one experiment share so that their snapshots are comparable.
struct ToyRunConfig {
  ObjectiveConfig objective;
  Architecture architecture;
  std::vector<std::int64_t> factor_sizes = kDefaultFactorSizes;
  Eigen::Index image_size = kDefaultImageSize;
  std::uint64_t data_seed = 0;
  double train_fraction = 0.9;
  EvalSplit eval_split = EvalSplit::kTrain;
  /// 0 selects min(5000, size of the evaluation split).
  Eigen::Index eval_size = 0;
  TrainOptions train;  // seed, steps, optimizer, snapshot schedule, output
};

struct ToyData {
  FactorDataset dataset;
  TrainTestSplit split;
  Matrix train_rows;
  Matrix eval_batch;
};

ToyData prepare_toy_data(const ToyRunConfig& config);

/// Initializes parameters from `config.train.seed` and trains on the train
/// split of the toy dataset.
TrainResult run_toy_training(const ToyRunConfig& config);

/// Writes every dataset image as one "input" activation matrix.
void export_dataset(const std::filesystem::path& path, const FactorDataset& ds);

/// Diagnoses the final snapshot of `run_dir`: per-dimension KL from its
/// mean and logvar dumps, CKA probes from its input, mean and sampled dumps,
/// and its evaluation reconstruction loss against the final snapshot of
/// `baseline_dir`. Both runs must share one evaluation batch.
LatentDiagnosis diagnose_run(const std::filesystem::path& run_dir,
                             const std::filesystem::path& baseline_dir,
                             const DiagnosisThresholds& thresholds = {});

}  // namespace simscope
