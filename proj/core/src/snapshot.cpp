#include "simscope/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "simscope/error.hpp"

namespace simscope {
namespace {

using nlohmann::json;

std::string dump_file_name(std::int64_t step, std::size_t index,
                           const std::string& layer) {
  char prefix[48];
  std::snprintf(prefix, sizeof(prefix), "step_%09lld_%02zu_",
                static_cast<long long>(step), index);
  return prefix + layer + ".ssad";
}

json objective_to_json(const ObjectiveConfig& cfg) {
  return json{{"kind", std::string(to_string(cfg.kind))},
              {"beta", cfg.beta},
              {"gamma", cfg.gamma},
              {"c_max", cfg.c_max},
              {"iteration_threshold", cfg.iteration_threshold},
              {"lambda_od", cfg.lambda_od},
              {"lambda_d", cfg.lambda_d},
              {"dataset_size", cfg.dataset_size}};
}

ObjectiveConfig objective_from_json(const json& j) {
  ObjectiveConfig cfg;
  cfg.kind = parse_objective(j.at("kind").get<std::string>());
  cfg.beta = j.at("beta").get<double>();
  cfg.gamma = j.at("gamma").get<double>();
  cfg.c_max = j.at("c_max").get<double>();
  cfg.iteration_threshold = j.at("iteration_threshold").get<std::int64_t>();
  cfg.lambda_od = j.at("lambda_od").get<double>();
  cfg.lambda_d = j.at("lambda_d").get<double>();
  cfg.dataset_size = j.at("dataset_size").get<std::int64_t>();
  return cfg;
}

}  // namespace

const SnapshotEntry& SnapshotManifest::at_step(std::int64_t step) const {
  for (const auto& s : snapshots) {
    if (s.step == step) return s;
  }
  throw Error(ErrorKind::kConfig,
              "no snapshot at step " + std::to_string(step) + " in manifest");
}

const SnapshotEntry& SnapshotManifest::final_snapshot() const {
  if (snapshots.empty()) throw Error(ErrorKind::kConsistency, "manifest has no snapshots");
  return snapshots.back();
}

std::string matrix_fingerprint(const Matrix& m) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  auto feed = [&](std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      hash ^= (word >> (8 * i)) & 0xFF;
      hash *= 0x100000001b3ull;
    }
  };
  feed(static_cast<std::uint64_t>(m.rows()));
  feed(static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      feed(std::bit_cast<std::uint64_t>(m(r, c)));
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

std::string manifest_to_json(const SnapshotManifest& manifest) {
  json snaps = json::array();
  for (const auto& s : manifest.snapshots) {
    json shapes = json::array();
    for (const auto& [n, p] : s.shapes) shapes.push_back({n, p});
    snaps.push_back({{"step", s.step},
                     {"files", s.files},
                     {"shapes", shapes},
                     {"eval_reconstruction", s.eval_reconstruction},
                     {"eval_kl", s.eval_kl}});
  }
  json j{{"format", "simscope-manifest"},
         {"version", 1},
         {"objective", objective_to_json(manifest.objective)},
         {"regularisation", manifest.objective.regularisation()},
         {"seed", manifest.seed},
         {"total_steps", manifest.total_steps},
         {"latent_dim", manifest.latent_dim},
         {"eval_fingerprint", manifest.eval_fingerprint},
         {"layers", manifest.layer_names},
         {"snapshots", snaps}};
  return j.dump(2) + "\n";
}

SnapshotManifest manifest_from_json(const std::string& text,
                                    const std::string& source) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "simscope-manifest") {
      throw Error(ErrorKind::kFormat, source + ": not a simscope manifest");
    }
    SnapshotManifest m;
    m.objective = objective_from_json(j.at("objective"));
    m.seed = j.at("seed").get<std::uint64_t>();
    m.total_steps = j.at("total_steps").get<std::int64_t>();
    m.latent_dim = j.at("latent_dim").get<std::int64_t>();
    m.eval_fingerprint = j.at("eval_fingerprint").get<std::string>();
    m.layer_names = j.at("layers").get<std::vector<std::string>>();
    for (const auto& s : j.at("snapshots")) {
      SnapshotEntry e;
      e.step = s.at("step").get<std::int64_t>();
      e.files = s.at("files").get<std::vector<std::string>>();
      for (const auto& shape : s.at("shapes")) {
        e.shapes.emplace_back(shape.at(0).get<std::int64_t>(),
                              shape.at(1).get<std::int64_t>());
      }
      e.eval_reconstruction = s.at("eval_reconstruction").get<double>();
      e.eval_kl = s.at("eval_kl").get<double>();
      if (e.files.size() != m.layer_names.size() ||
          e.shapes.size() != m.layer_names.size()) {
        throw Error(ErrorKind::kFormat,
                    source + ": snapshot layer count differs from layer list");
      }
      m.snapshots.push_back(std::move(e));
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormat, source + ": " + e.what());
  }
}

SnapshotManifest read_manifest(const std::filesystem::path& run_dir) {
  const auto path = run_dir / kManifestFile;
  return manifest_from_json(read_file(path), path.string());
}

void write_manifest(const std::filesystem::path& run_dir,
                    const SnapshotManifest& manifest) {
  write_file_atomic(run_dir / kManifestFile, manifest_to_json(manifest));
}

std::vector<ActivationMatrix> load_snapshot(const std::filesystem::path& run_dir,
                                            const SnapshotManifest& manifest,
                                            std::int64_t step) {
  const SnapshotEntry& entry = manifest.at_step(step);
  std::vector<ActivationMatrix> layers;
  layers.reserve(entry.files.size());
  for (std::size_t i = 0; i < entry.files.size(); ++i) {
    const auto path = run_dir / entry.files[i];
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorKind::kConsistency, "manifest references missing dump " +
                                               path.string());
    }
    ActivationMatrix m = load_activation(path);
    if (m.n() != entry.shapes[i].first || m.p() != entry.shapes[i].second ||
        m.layer_name() != manifest.layer_names[i]) {
      throw Error(ErrorKind::kConsistency,
                  path.string() + ": shape or layer name differs from manifest");
    }
    layers.push_back(std::move(m));
  }
  return layers;
}

void verify_manifest(const std::filesystem::path& run_dir,
                     const SnapshotManifest& manifest) {
  for (const auto& s : manifest.snapshots) load_snapshot(run_dir, manifest, s.step);
}

SnapshotWriter::SnapshotWriter(std::filesystem::path run_dir,
                               SnapshotManifest header, DumpDtype dtype)
    : run_dir_(std::move(run_dir)), manifest_(std::move(header)), dtype_(dtype) {
  std::error_code ec;
  std::filesystem::create_directories(run_dir_, ec);
  if (ec) {
    throw Error(ErrorKind::kIo,
                "cannot create " + run_dir_.string() + ": " + ec.message());
  }
  if (std::filesystem::exists(run_dir_ / kManifestFile)) {
    SnapshotManifest existing = read_manifest(run_dir_);
    if (existing.eval_fingerprint != manifest_.eval_fingerprint) {
      throw Error(ErrorKind::kConsistency,
                  (run_dir_ / kManifestFile).string() +
                      ": evaluation batch fingerprint " + existing.eval_fingerprint +
                      " differs from " + manifest_.eval_fingerprint);
    }
    if (existing.layer_names == manifest_.layer_names) {
      manifest_.snapshots = std::move(existing.snapshots);
    }
  }
  write_manifest(run_dir_, manifest_);
}

const SnapshotEntry& SnapshotWriter::write(
    std::int64_t step, const std::vector<ActivationMatrix>& layers,
    double eval_reconstruction, double eval_kl) {
  if (layers.size() != manifest_.layer_names.size()) {
    throw Error(ErrorKind::kContract, "snapshot layer count differs from manifest");
  }
  SnapshotEntry entry;
  entry.step = step;
  entry.eval_reconstruction = eval_reconstruction;
  entry.eval_kl = eval_kl;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].layer_name() != manifest_.layer_names[i]) {
      throw Error(ErrorKind::kContract, "snapshot layer order differs from manifest");
    }
    const std::string file = dump_file_name(step, i, layers[i].layer_name());
    save_activation(run_dir_ / file, layers[i], dtype_);
    entry.files.push_back(file);
    entry.shapes.emplace_back(layers[i].n(), layers[i].p());
  }
  auto& snaps = manifest_.snapshots;
  std::erase_if(snaps, [&](const SnapshotEntry& s) { return s.step == step; });
  auto pos = std::lower_bound(
      snaps.begin(), snaps.end(), step,
      [](const SnapshotEntry& s, std::int64_t v) { return s.step < v; });
  auto it = snaps.insert(pos, std::move(entry));
  const std::size_t index = static_cast<std::size_t>(it - snaps.begin());
  write_manifest(run_dir_, manifest_);
  return manifest_.snapshots[index];
}

}  // namespace simscope
