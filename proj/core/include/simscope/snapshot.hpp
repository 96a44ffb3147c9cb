#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "simscope/activation_io.hpp"
#include "simscope/objectives.hpp"

namespace simscope {

struct SnapshotEntry {
  std::int64_t step = 0;
  std::vector<std::string> files;  // relative to the run directory
  std::vector<std::pair<std::int64_t, std::int64_t>> shapes;
  double eval_reconstruction = 0.0;
  double eval_kl = 0.0;
};

/// Index of one training run's activation dumps (manifest.json).
struct SnapshotManifest {
  ObjectiveConfig objective;
  std::uint64_t seed = 0;
  std::int64_t total_steps = 0;
  std::int64_t latent_dim = 0;
  std::string eval_fingerprint;
  std::vector<std::string> layer_names;
  std::vector<SnapshotEntry> snapshots;  // ascending by step

  const SnapshotEntry& at_step(std::int64_t step) const;
  const SnapshotEntry& final_snapshot() const;
};

inline constexpr const char* kManifestFile = "manifest.json";

/// FNV-1a over the little-endian bytes of the matrix, row-major, prefixed
/// by its shape. Hex string.
std::string matrix_fingerprint(const Matrix& m);

std::string manifest_to_json(const SnapshotManifest& manifest);
SnapshotManifest manifest_from_json(const std::string& text,
                                    const std::string& source = "manifest");

SnapshotManifest read_manifest(const std::filesystem::path& run_dir);
void write_manifest(const std::filesystem::path& run_dir,
                    const SnapshotManifest& manifest);

/// Loads every layer of one snapshot and checks it against the manifest
/// (file exists, parses, recorded shape and layer name).
std::vector<ActivationMatrix> load_snapshot(const std::filesystem::path& run_dir,
                                            const SnapshotManifest& manifest,
                                            std::int64_t step);

/// Verifies every snapshot referenced by the manifest.
void verify_manifest(const std::filesystem::path& run_dir,
                     const SnapshotManifest& manifest);

/// Writes snapshot dumps into a run directory and keeps manifest.json in
/// sync after each snapshot.
class SnapshotWriter {
 public:
  /// If `run_dir` already holds a manifest, its evaluation-batch
  /// fingerprint must match `header.eval_fingerprint` (kConsistency);
  /// existing entries are kept unless rewritten at the same step.
  SnapshotWriter(std::filesystem::path run_dir, SnapshotManifest header,
                 DumpDtype dtype = DumpDtype::kFloat64);

  /// Dumps `layers` (ForwardTrace order) as snapshot `step`.
  const SnapshotEntry& write(std::int64_t step,
                             const std::vector<ActivationMatrix>& layers,
                             double eval_reconstruction, double eval_kl);

  const SnapshotManifest& manifest() const { return manifest_; }

 private:
  std::filesystem::path run_dir_;
  SnapshotManifest manifest_;
  DumpDtype dtype_;
};

}  // namespace simscope
