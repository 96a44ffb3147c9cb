#include "simscope/pipeline.hpp"

#include <algorithm>
#include <string>

#include "simscope/activation_io.hpp"
#include "simscope/error.hpp"
#include "simscope/snapshot.hpp"

namespace simscope {
namespace {

const ActivationMatrix& find_layer(const std::vector<ActivationMatrix>& layers,
                                   const std::string& name,
                                   const std::filesystem::path& run_dir) {
  auto it = std::find_if(layers.begin(), layers.end(),
                         [&](const ActivationMatrix& m) { return m.layer_name() == name; });
  if (it == layers.end()) {
    throw Error(ErrorKind::kConsistency,
                run_dir.string() + ": final snapshot has no '" + name + "' layer");
  }
  return *it;
}

}  // namespace

ToyData prepare_toy_data(const ToyRunConfig& config) {
  ToyData data;
  data.dataset =
      generate_factor_dataset(config.factor_sizes, config.image_size, config.data_seed);
  data.split = split_train_test(data.dataset, config.train_fraction, config.data_seed);
  if (data.split.train.empty()) {
    throw Error(ErrorKind::kConfig, "train split is empty");
  }
  data.train_rows = select_rows(data.dataset.images, data.split.train);

  const auto& pool =
      config.eval_split == EvalSplit::kTrain ? data.split.train : data.split.test;
  if (pool.empty()) {
    throw Error(ErrorKind::kConfig, "evaluation split is empty");
  }
  Eigen::Index k = config.eval_size;
  if (k == 0) k = std::min<Eigen::Index>(5000, static_cast<Eigen::Index>(pool.size()));
  data.eval_batch = eval_batch(data.dataset, pool, k, config.data_seed);
  return data;
}

TrainResult run_toy_training(const ToyRunConfig& config) {
  ToyData data = prepare_toy_data(config);
  Architecture arch = config.architecture;
  arch.input_dim = data.train_rows.cols();
  ModelParams params = initialize_params(arch, config.train.seed);
  return train(std::move(params), data.train_rows, data.eval_batch, config.objective,
               config.train);
}

void export_dataset(const std::filesystem::path& path, const FactorDataset& ds) {
  save_activation(path, ActivationMatrix(ds.images, "input"));
}

LatentDiagnosis diagnose_run(const std::filesystem::path& run_dir,
                             const std::filesystem::path& baseline_dir,
                             const DiagnosisThresholds& thresholds) {
  const SnapshotManifest run = read_manifest(run_dir);
  const SnapshotManifest baseline = read_manifest(baseline_dir);
  if (run.eval_fingerprint != baseline.eval_fingerprint) {
    throw Error(ErrorKind::kConsistency,
                "evaluation batch fingerprint differs: " + run_dir.string() + " has " +
                    run.eval_fingerprint + ", " + baseline_dir.string() + " has " +
                    baseline.eval_fingerprint);
  }
  const SnapshotEntry& last = run.final_snapshot();
  const auto layers = load_snapshot(run_dir, run, last.step);

  LatentStats stats{find_layer(layers, "mean", run_dir).data(),
                    find_layer(layers, "logvar", run_dir).data()};
  const Vector per_dim_kl = kl_gaussian_per_dim(stats);
  const LatentProbes probes =
      latent_similarity_probe(find_layer(layers, "input", run_dir),
                              find_layer(layers, "mean", run_dir),
                              find_layer(layers, "sampled", run_dir));

  Baselines baselines;
  baselines.reconstruction = baseline.final_snapshot().eval_reconstruction;
  return diagnose(per_dim_kl, probes, last.eval_reconstruction, baselines, thresholds);
}

}  // namespace simscope
