// simscope: train toy VAEs, dump their activations and compare layers.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "simscope/activation_io.hpp"
#include "simscope/error.hpp"
#include "simscope/experiment.hpp"
#include "simscope/pipeline.hpp"
#include "simscope/results.hpp"
#include "simscope/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace simscope;

void write_output(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file_atomic(path, contents);
}

void report(const json& summary) { std::cout << summary.dump() << '\n'; }

struct SynthArgs {
  Eigen::Index p = 50;
  std::vector<Eigen::Index> n_sweep = kDefaultNSweep;
  std::uint64_t seed = 0;
  fs::path out;
};

void run_synth(const SynthArgs& a) {
  const ResultFormat format = format_for_path(a.out);
  const auto rows = synthetic_benchmark(a.p, a.n_sweep, a.seed);
  write_output(a.out, format == ResultFormat::kCsv ? synthetic_to_csv(rows)
                                                   : synthetic_to_json(rows, a.p, a.seed));
  report({{"status", "ok"}, {"command", "synth-bench"}, {"out", a.out.string()},
          {"rows", rows.size()}});
}

struct TrainArgs {
  std::string objective;
  std::optional<double> reg;
  std::optional<double> gamma, c_max, lambda_od, lambda_d;
  std::optional<std::int64_t> iteration_threshold;
  std::uint64_t seed = 0;
  std::int64_t steps = 5000;
  fs::path out;
  Eigen::Index latent_dim = 10;
  double lr = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  Eigen::Index batch_size = 64;
  std::vector<std::int64_t> snapshot_steps;
  std::string dtype = "f64";
  std::vector<std::int64_t> factor_sizes = kDefaultFactorSizes;
  Eigen::Index image_size = kDefaultImageSize;
  std::uint64_t data_seed = 0;
  double train_fraction = 0.9;
  std::string eval_split = "train";
  Eigen::Index eval_size = 0;
};

void run_train(const TrainArgs& a) {
  ToyRunConfig cfg;
  cfg.objective.kind = parse_objective(a.objective);
  if (a.reg) cfg.objective.set_regularisation(*a.reg);
  if (a.gamma) cfg.objective.gamma = *a.gamma;
  if (a.c_max) cfg.objective.c_max = *a.c_max;
  if (a.iteration_threshold) cfg.objective.iteration_threshold = *a.iteration_threshold;
  if (a.lambda_od) cfg.objective.lambda_od = *a.lambda_od;
  if (a.lambda_d) cfg.objective.lambda_d = *a.lambda_d;
  validate(cfg.objective);

  cfg.architecture.latent_dim = a.latent_dim;
  cfg.factor_sizes = a.factor_sizes;
  cfg.image_size = a.image_size;
  cfg.data_seed = a.data_seed;
  cfg.train_fraction = a.train_fraction;
  if (a.eval_split == "train") {
    cfg.eval_split = EvalSplit::kTrain;
  } else if (a.eval_split == "test") {
    cfg.eval_split = EvalSplit::kTest;
  } else {
    throw Error(ErrorKind::kConfig, "unknown eval split '" + a.eval_split + "'");
  }
  cfg.eval_size = a.eval_size;

  cfg.train.adam = {a.lr, a.adam_beta1, a.adam_beta2, a.adam_epsilon};
  cfg.train.batch_size = a.batch_size;
  cfg.train.steps = a.steps;
  cfg.train.seed = a.seed;
  cfg.train.snapshot_steps = a.snapshot_steps;
  cfg.train.output_dir = a.out;
  if (a.dtype == "f32") {
    cfg.train.dump_dtype = DumpDtype::kFloat32;
  } else if (a.dtype != "f64") {
    throw Error(ErrorKind::kConfig, "unknown dump dtype '" + a.dtype + "'");
  }

  const TrainResult result = run_toy_training(cfg);
  const SnapshotEntry& last = result.manifest.final_snapshot();
  report({{"status", "ok"},
          {"command", "train"},
          {"out", a.out.string()},
          {"snapshots", result.manifest.snapshots.size()},
          {"final_step", last.step},
          {"eval_reconstruction", last.eval_reconstruction},
          {"eval_kl", last.eval_kl}});
}

struct CompareArgs {
  std::string mode;
  std::string metric = "cka";
  std::vector<fs::path> left;
  std::vector<fs::path> right;
  std::optional<std::int64_t> left_step;
  std::optional<std::int64_t> right_step;
  unsigned threads = 1;
  fs::path out;
};

void run_compare(const CompareArgs& a) {
  ExperimentPlan plan;
  plan.mode = parse_mode(a.mode);
  plan.metric = parse_metric(a.metric);
  plan.grid.threads = a.threads;
  if (a.left.size() != a.right.size()) {
    throw Error(ErrorKind::kConfig,
                "--left and --right must list the same number of runs (got " +
                    std::to_string(a.left.size()) + " and " +
                    std::to_string(a.right.size()) + ")");
  }
  const ResultFormat format = format_for_path(a.out);

  Comparison comparison;
  comparison.name = std::string(to_string(plan.mode));
  for (std::size_t i = 0; i < a.left.size(); ++i) {
    comparison.seeds.push_back({{a.left[i], a.left_step}, {a.right[i], a.right_step}});
  }
  plan.comparisons.push_back(std::move(comparison));

  const auto results = run_experiment_matrix(plan);
  write_output(a.out, format == ResultFormat::kCsv
                          ? comparisons_to_csv(results)
                          : comparisons_to_json(results, plan.mode, plan.metric));
  report({{"status", "ok"}, {"command", "compare"}, {"out", a.out.string()},
          {"seeds_averaged", results.front().grid.seeds_averaged}});
}

struct DiagnoseArgs {
  fs::path run;
  fs::path baseline;
  fs::path out;
  DiagnosisThresholds thresholds;
};

void run_diagnose(const DiagnoseArgs& a) {
  if (format_for_path(a.out) != ResultFormat::kJson) {
    throw Error(ErrorKind::kConfig, "diagnose writes JSON; --out must end in .json");
  }
  const LatentDiagnosis d = diagnose_run(a.run, a.baseline, a.thresholds);
  write_output(a.out, diagnosis_to_json(d, a.thresholds,
                                        {{"run", a.run.string()},
                                         {"baseline", a.baseline.string()}}));
  report({{"status", "ok"}, {"command", "diagnose"}, {"out", a.out.string()},
          {"verdict", std::string(to_string(d.verdict))}});
}

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layer-wise representational similarity for toy VAEs"};
  app.set_config("--config", "", "INI file; options go under a [subcommand] section");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth-bench", "Synthetic shared-feature benchmark");
  synth_cmd->add_option("--p", synth.p, "Features per matrix")->capture_default_str();
  synth_cmd->add_option("--n-sweep", synth.n_sweep, "Example counts")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output .csv or .json")->required();

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a VAE and dump snapshot activations");
  train_cmd->add_option("--objective", tr.objective)
      ->required()
      ->check(CLI::IsMember({"beta_vae", "annealed_vae", "beta_tc_vae", "dip_vae_ii"}));
  train_cmd->add_option("--reg", tr.reg,
                        "Regularisation strength: beta, C_max or lambda_od = lambda_d");
  train_cmd->add_option("--seed", tr.seed)->capture_default_str();
  train_cmd->add_option("--steps", tr.steps)->capture_default_str();
  train_cmd->add_option("--out", tr.out, "Run directory")->required();
  train_cmd->add_option("--latent-dim", tr.latent_dim)->capture_default_str();
  train_cmd->add_option("--gamma", tr.gamma);
  train_cmd->add_option("--c-max", tr.c_max);
  train_cmd->add_option("--iteration-threshold", tr.iteration_threshold);
  train_cmd->add_option("--lambda-od", tr.lambda_od);
  train_cmd->add_option("--lambda-d", tr.lambda_d);
  train_cmd->add_option("--lr", tr.lr)->capture_default_str();
  train_cmd->add_option("--adam-beta1", tr.adam_beta1)->capture_default_str();
  train_cmd->add_option("--adam-beta2", tr.adam_beta2)->capture_default_str();
  train_cmd->add_option("--adam-epsilon", tr.adam_epsilon)->capture_default_str();
  train_cmd->add_option("--batch-size", tr.batch_size)->capture_default_str();
  train_cmd->add_option("--snapshot-steps", tr.snapshot_steps,
                        "Default: 0, 1, 5, 10, 25, 50, 100 percent of --steps");
  train_cmd->add_option("--dtype", tr.dtype)
      ->check(CLI::IsMember({"f32", "f64"}))
      ->capture_default_str();
  train_cmd->add_option("--factor-sizes", tr.factor_sizes)->capture_default_str();
  train_cmd->add_option("--image-size", tr.image_size)->capture_default_str();
  train_cmd->add_option("--data-seed", tr.data_seed, "Split and evaluation batch seed")
      ->capture_default_str();
  train_cmd->add_option("--train-fraction", tr.train_fraction)->capture_default_str();
  train_cmd->add_option("--eval-split", tr.eval_split)
      ->check(CLI::IsMember({"train", "test"}))
      ->capture_default_str();
  train_cmd->add_option("--eval-size", tr.eval_size, "0: min(5000, split size)")
      ->capture_default_str();

  CompareArgs cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Layer-by-layer similarity grid");
  compare_cmd->add_option("--mode", cmp.mode)
      ->required()
      ->check(CLI::IsMember({"epochs", "regularisation", "regularization", "objectives"}));
  compare_cmd->add_option("--metric", cmp.metric)
      ->check(CLI::IsMember({"cka", "procrustes", "conservative"}))
      ->capture_default_str();
  compare_cmd->add_option("--left", cmp.left, "Run directories, one per seed")->required();
  compare_cmd->add_option("--right", cmp.right, "Run directories, one per seed")->required();
  compare_cmd->add_option("--left-step", cmp.left_step, "Default: final snapshot");
  compare_cmd->add_option("--right-step", cmp.right_step, "Default: final snapshot");
  compare_cmd->add_option("--threads", cmp.threads)
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();
  compare_cmd->add_option("--out", cmp.out, "Output .csv or .json")->required();

  DiagnoseArgs dg;
  auto* diagnose_cmd = app.add_subcommand("diagnose", "Posterior-collapse diagnosis");
  diagnose_cmd->add_option("--run", dg.run)->required();
  diagnose_cmd->add_option("--baseline", dg.baseline)->required();
  diagnose_cmd->add_option("--out", dg.out, "Output .json")->required();
  diagnose_cmd->add_option("--passive-kl", dg.thresholds.passive_kl)->capture_default_str();
  diagnose_cmd->add_option("--mean-sampled-cka", dg.thresholds.mean_sampled_cka)
      ->capture_default_str();
  diagnose_cmd->add_option("--recon-factor", dg.thresholds.recon_factor)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    if (*synth_cmd) run_synth(synth);
    if (*train_cmd) run_train(tr);
    if (*compare_cmd) run_compare(cmp);
    if (*diagnose_cmd) run_diagnose(dg);
  } catch (const Error& e) {
    return fail(std::string(to_string(e.kind())), e.what(), 1);
  } catch (const fs::filesystem_error& e) {
    return fail("io", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}
