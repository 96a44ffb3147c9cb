#include "simscope/experiment.hpp"

#include <map>

#include "simscope/error.hpp"

namespace simscope {
namespace {

struct LoadedRun {
  SnapshotManifest manifest;
  std::int64_t step = 0;
  std::vector<ActivationMatrix> layers;
  std::string label;
};

LoadedRun load_run(const RunRef& ref) {
  LoadedRun run;
  run.manifest = read_manifest(ref.dir);
  run.step = ref.step ? *ref.step : run.manifest.final_snapshot().step;
  run.layers = load_snapshot(ref.dir, run.manifest, run.step);
  run.label = ref.dir.string() + "@" + std::to_string(run.step);
  return run;
}

void check_mode(ExperimentMode mode, const LoadedRun& left, const LoadedRun& right) {
  const auto& l = left.manifest;
  const auto& r = right.manifest;
  const std::string where = " (" + left.label + " vs " + right.label + ")";
  switch (mode) {
    case ExperimentMode::kEpochs:
      if (l.objective.kind != r.objective.kind ||
          l.objective.regularisation() != r.objective.regularisation() ||
          l.seed != r.seed) {
        throw Error(ErrorKind::kConfig,
                    "epochs mode compares one run with itself" + where);
      }
      break;
    case ExperimentMode::kRegularisation:
      if (l.objective.kind != r.objective.kind) {
        throw Error(ErrorKind::kConfig,
                    "regularisation mode needs a single learning objective" + where);
      }
      break;
    case ExperimentMode::kObjectives:
      if (l.objective.kind == r.objective.kind) {
        throw Error(ErrorKind::kConfig,
                    "objectives mode needs two different learning objectives" + where);
      }
      break;
    case ExperimentMode::kSynth:
      throw Error(ErrorKind::kConfig,
                  "synth mode runs the synthetic benchmark, not run comparisons");
  }
}

}  // namespace

std::string_view to_string(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::kEpochs: return "epochs";
    case ExperimentMode::kRegularisation: return "regularisation";
    case ExperimentMode::kObjectives: return "objectives";
    case ExperimentMode::kSynth: return "synth";
  }
  return "unknown";
}

ExperimentMode parse_mode(std::string_view text) {
  if (text == "epochs") return ExperimentMode::kEpochs;
  if (text == "regularisation" || text == "regularization") {
    return ExperimentMode::kRegularisation;
  }
  if (text == "objectives") return ExperimentMode::kObjectives;
  if (text == "synth") return ExperimentMode::kSynth;
  throw Error(ErrorKind::kConfig, "unknown experiment mode '" + std::string(text) + "'");
}

std::vector<ComparisonResult> run_experiment_matrix(const ExperimentPlan& plan) {
  if (plan.mode == ExperimentMode::kSynth) {
    throw Error(ErrorKind::kConfig,
                "synth mode runs the synthetic benchmark, not run comparisons");
  }
  if (plan.comparisons.empty()) {
    throw Error(ErrorKind::kConfig, "experiment plan has no comparisons");
  }

  // Load everything first so a fingerprint mismatch is reported before any
  // similarity work happens.
  std::map<std::string, LoadedRun> cache;
  auto fetch = [&](const RunRef& ref) -> const LoadedRun& {
    const std::string key =
        ref.dir.string() + "#" + (ref.step ? std::to_string(*ref.step) : "final");
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, load_run(ref)).first;
    return it->second;
  };
  std::optional<std::string> fingerprint;
  std::string fingerprint_source;
  for (const auto& comparison : plan.comparisons) {
    if (comparison.seeds.empty()) {
      throw Error(ErrorKind::kConfig, "comparison '" + comparison.name + "' has no runs");
    }
    for (const auto& pair : comparison.seeds) {
      for (const RunRef* ref : {&pair.left, &pair.right}) {
        const LoadedRun& run = fetch(*ref);
        if (!fingerprint) {
          fingerprint = run.manifest.eval_fingerprint;
          fingerprint_source = run.label;
        } else if (*fingerprint != run.manifest.eval_fingerprint) {
          throw Error(ErrorKind::kConsistency,
                      "evaluation batch of " + run.label + " differs from " +
                          fingerprint_source + "; refusing to compare");
        }
      }
      check_mode(plan.mode, fetch(pair.left), fetch(pair.right));
    }
  }

  std::vector<ComparisonResult> results;
  for (const auto& comparison : plan.comparisons) {
    ComparisonResult result;
    result.name = comparison.name;
    for (const auto& pair : comparison.seeds) {
      const LoadedRun& left = fetch(pair.left);
      const LoadedRun& right = fetch(pair.right);
      result.per_seed.push_back(
          pairwise_grid(left.layers, right.layers, plan.metric, plan.grid));
      result.left_runs.push_back(left.label);
      result.right_runs.push_back(right.label);
    }
    result.grid = average_grids(result.per_seed);
    results.push_back(std::move(result));
  }
  return results;
}

}  // namespace simscope
