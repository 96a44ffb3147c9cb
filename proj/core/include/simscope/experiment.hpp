#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simscope/similarity.hpp"
#include "simscope/snapshot.hpp"

namespace simscope {

/// kEpochs: one run at two snapshots. kRegularisation: one objective at two
/// strengths. kObjectives: two objectives. kSynth: the synthetic matrix
/// benchmark (see synthetic.hpp), which involves no training runs.
enum class ExperimentMode { kEpochs, kRegularisation, kObjectives, kSynth };

std::string_view to_string(ExperimentMode mode);
/// "epochs", "regularisation" (or "regularization"), "objectives", "synth".
ExperimentMode parse_mode(std::string_view text);

struct RunRef {
  std::filesystem::path dir;
  /// Snapshot step; the run's final snapshot when unset.
  std::optional<std::int64_t> step;
};

/// One seed's worth of comparison: left run layers x right run layers.
struct RunPair {
  RunRef left;
  RunRef right;
};

struct Comparison {
  std::string name;
  std::vector<RunPair> seeds;  // grids are averaged over these
};

struct ExperimentPlan {
  ExperimentMode mode = ExperimentMode::kEpochs;
  Metric metric = Metric::kCka;
  std::vector<Comparison> comparisons;
  GridOptions grid;
};

struct ComparisonResult {
  std::string name;
  SimilarityGrid grid;                  // seed average
  std::vector<SimilarityGrid> per_seed;
  std::vector<std::string> left_runs;   // "dir@step" per seed
  std::vector<std::string> right_runs;
};

/// Loads every referenced snapshot, checks that all manifests share one
/// evaluation-batch fingerprint (kConsistency otherwise) and that each pair
/// fits the mode (kConfig otherwise), then builds seed-averaged grids.
std::vector<ComparisonResult> run_experiment_matrix(const ExperimentPlan& plan);

}  // namespace simscope
