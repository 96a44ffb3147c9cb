#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "simscope/collapse.hpp"
#include "simscope/experiment.hpp"
#include "simscope/synthetic.hpp"

namespace simscope {

enum class ResultFormat { kCsv, kJson };

/// ".csv" -> kCsv, ".json" -> kJson, anything else is a config error.
ResultFormat format_for_path(const std::filesystem::path& path);

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Shortest decimal form is not used: values are printed with 17
/// significant digits so re-parsing yields the identical double.
std::string format_double(double value);

/// Header `left_layer,right_layer,metric,score,n_examples,seeds_averaged`,
/// one row per cell in row-major order.
std::string grid_to_csv(const SimilarityGrid& grid, bool header = true);

std::string grid_to_json(const SimilarityGrid& grid, const Metadata& metadata = {});
SimilarityGrid grid_from_json(const std::string& text);

std::string comparisons_to_csv(const std::vector<ComparisonResult>& results);
std::string comparisons_to_json(const std::vector<ComparisonResult>& results,
                                ExperimentMode mode, Metric metric);

/// Header `n,pair,shared_fraction,cka,procrustes`.
std::string synthetic_to_csv(const std::vector<SyntheticRow>& rows);
std::string synthetic_to_json(const std::vector<SyntheticRow>& rows,
                              Eigen::Index p, std::uint64_t seed);

std::string diagnosis_to_json(const LatentDiagnosis& diagnosis,
                              const DiagnosisThresholds& thresholds,
                              const Metadata& metadata = {});

}  // namespace simscope
