#include "simscope/results.hpp"

#include <charconv>
#include <sstream>

#include <nlohmann/json.hpp>

#include "simscope/error.hpp"

namespace simscope {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ordered_json matrix_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols) {
  if (j.size() != rows) throw Error(ErrorKind::kFormat, "grid JSON: row count mismatch");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw Error(ErrorKind::kFormat, "grid JSON: column count mismatch");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

ordered_json grid_json(const SimilarityGrid& grid) {
  ordered_json j;
  j["metric"] = std::string(to_string(grid.metric));
  j["rows"] = grid.rows;
  j["cols"] = grid.cols;
  j["n_examples"] = grid.n_examples;
  j["seeds_averaged"] = grid.seeds_averaged;
  j["scores"] = matrix_json(grid.scores);
  if (grid.cka) j["cka"] = matrix_json(*grid.cka);
  if (grid.procrustes) j["procrustes"] = matrix_json(*grid.procrustes);
  if (grid.disagreement) {
    ordered_json flags = ordered_json::array();
    for (Eigen::Index r = 0; r < grid.disagreement->rows(); ++r) {
      for (Eigen::Index c = 0; c < grid.disagreement->cols(); ++c) {
        if ((*grid.disagreement)(r, c)) {
          flags.push_back({{"left", grid.rows[static_cast<std::size_t>(r)]},
                           {"right", grid.cols[static_cast<std::size_t>(c)]}});
        }
      }
    }
    j["disagreement"] = std::move(flags);
  }
  return j;
}

}  // namespace

ResultFormat format_for_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return ResultFormat::kCsv;
  if (ext == ".json") return ResultFormat::kJson;
  throw Error(ErrorKind::kConfig,
              "output path " + path.string() + " must end in .csv or .json");
}

std::string format_double(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, 17);
  if (ec != std::errc()) throw Error(ErrorKind::kNumerical, "cannot format value");
  return std::string(buf, end);
}

std::string grid_to_csv(const SimilarityGrid& grid, bool header) {
  std::ostringstream out;
  if (header) out << "left_layer,right_layer,metric,score,n_examples,seeds_averaged\n";
  for (Eigen::Index r = 0; r < grid.scores.rows(); ++r) {
    for (Eigen::Index c = 0; c < grid.scores.cols(); ++c) {
      out << csv_field(grid.rows[static_cast<std::size_t>(r)]) << ','
          << csv_field(grid.cols[static_cast<std::size_t>(c)]) << ','
          << to_string(grid.metric) << ',' << format_double(grid.scores(r, c))
          << ',' << grid.n_examples << ',' << grid.seeds_averaged << '\n';
    }
  }
  return out.str();
}

std::string grid_to_json(const SimilarityGrid& grid, const Metadata& metadata) {
  ordered_json j;
  ordered_json meta = ordered_json::object();
  for (const auto& [k, v] : metadata) meta[k] = v;
  j["metadata"] = std::move(meta);
  j["grid"] = grid_json(grid);
  return j.dump(2) + "\n";
}

SimilarityGrid grid_from_json(const std::string& text) {
  try {
    const json root = json::parse(text);
    const json& j = root.contains("grid") ? root.at("grid") : root;
    SimilarityGrid grid;
    grid.metric = parse_metric(j.at("metric").get<std::string>());
    grid.rows = j.at("rows").get<std::vector<std::string>>();
    grid.cols = j.at("cols").get<std::vector<std::string>>();
    grid.n_examples = j.at("n_examples").get<Eigen::Index>();
    grid.seeds_averaged = j.at("seeds_averaged").get<std::size_t>();
    grid.scores = matrix_from_json(j.at("scores"), grid.rows.size(), grid.cols.size());
    if (j.contains("cka")) {
      grid.cka = matrix_from_json(j.at("cka"), grid.rows.size(), grid.cols.size());
      grid.procrustes =
          matrix_from_json(j.at("procrustes"), grid.rows.size(), grid.cols.size());
      grid.disagreement =
          ((*grid.cka - *grid.procrustes).cwiseAbs().array() > kDisagreementThreshold)
              .matrix();
    }
    return grid;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("grid JSON: ") + e.what());
  }
}

std::string comparisons_to_csv(const std::vector<ComparisonResult>& results) {
  std::string out;
  bool header = true;
  for (const auto& r : results) {
    out += grid_to_csv(r.grid, header);
    header = false;
  }
  return out;
}

std::string comparisons_to_json(const std::vector<ComparisonResult>& results,
                                ExperimentMode mode, Metric metric) {
  ordered_json j;
  j["mode"] = std::string(to_string(mode));
  j["metric"] = std::string(to_string(metric));
  ordered_json list = ordered_json::array();
  for (const auto& r : results) {
    ordered_json item;
    item["name"] = r.name;
    item["left_runs"] = r.left_runs;
    item["right_runs"] = r.right_runs;
    item["grid"] = grid_json(r.grid);
    list.push_back(std::move(item));
  }
  j["comparisons"] = std::move(list);
  return j.dump(2) + "\n";
}

std::string synthetic_to_csv(const std::vector<SyntheticRow>& rows) {
  std::ostringstream out;
  out << "n,pair,shared_fraction,cka,procrustes\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.pair << ',' << format_double(r.shared_fraction) << ','
        << format_double(r.cka) << ',' << format_double(r.procrustes) << '\n';
  }
  return out.str();
}

std::string synthetic_to_json(const std::vector<SyntheticRow>& rows,
                              Eigen::Index p, std::uint64_t seed) {
  ordered_json j;
  j["p"] = p;
  j["seed"] = seed;
  ordered_json list = ordered_json::array();
  for (const auto& r : rows) {
    list.push_back({{"n", r.n},
                    {"pair", r.pair},
                    {"shared_fraction", r.shared_fraction},
                    {"cka", r.cka},
                    {"procrustes", r.procrustes}});
  }
  j["rows"] = std::move(list);
  return j.dump(2) + "\n";
}

std::string diagnosis_to_json(const LatentDiagnosis& d,
                              const DiagnosisThresholds& thresholds,
                              const Metadata& metadata) {
  ordered_json j;
  ordered_json meta = ordered_json::object();
  for (const auto& [k, v] : metadata) meta[k] = v;
  j["metadata"] = std::move(meta);
  j["verdict"] = std::string(to_string(d.verdict));
  j["per_dim_kl"] = std::vector<double>(d.per_dim_kl.begin(), d.per_dim_kl.end());
  j["passive_mask"] = d.passive_mask;
  j["passive_count"] = d.passive_count();
  j["cka_mean_sampled"] = d.cka_mean_sampled.value;
  j["cka_input_sampled"] = d.cka_input_sampled.value;
  j["n_examples"] = d.cka_mean_sampled.n_examples;
  j["reconstruction"] = d.reconstruction;
  j["baseline_reconstruction"] = d.baseline_reconstruction;
  j["thresholds"] = {{"passive_kl", thresholds.passive_kl},
                     {"mean_sampled_cka", thresholds.mean_sampled_cka},
                     {"recon_factor", thresholds.recon_factor}};
  return j.dump(2) + "\n";
}

}  // namespace simscope
