#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simscope/matrix.hpp"

namespace simscope {

enum class Metric { kCka, kProcrustes, kConservative };

std::string_view to_string(Metric metric);
/// Accepts "cka", "procrustes", "conservative" (case-insensitive).
Metric parse_metric(std::string_view text);

/// Raw scores may leave [0, 1] by rounding; anything beyond this slack is
/// reported as a numerical error instead of being clamped.
inline constexpr double kClampSlack = 1e-6;

/// Cells where CKA and Procrustes similarity differ by more than this are
/// flagged in conservative grids.
inline constexpr double kDisagreementThreshold = 0.15;

struct SimilarityScore {
  double value = 0.0;
  Metric metric = Metric::kCka;
  Eigen::Index n_examples = 0;
};

struct ProcrustesDistance {
  double value = 0.0;
};

/// ||Y^T X||_F^2 / (||X^T X||_F ||Y^T Y||_F) over column-centered inputs.
/// Inputs without the centered flag are centered internally.
SimilarityScore linear_cka(const ActivationMatrix& x, const ActivationMatrix& y);

/// 2 - 2 ||Ydot^T Xdot||_* for inputs that went through
/// procrustes_normalize(). Throws kContract for un-normalized inputs.
ProcrustesDistance procrustes_distance(const ActivationMatrix& x_dot,
                                       const ActivationMatrix& y_dot);

/// 1 - P_d / 2 after normalizing both inputs.
SimilarityScore procrustes_similarity(const ActivationMatrix& x,
                                      const ActivationMatrix& y);

/// min(CKA, Procrustes similarity).
SimilarityScore conservative_score(const ActivationMatrix& x,
                                   const ActivationMatrix& y);

SimilarityScore score(const ActivationMatrix& x, const ActivationMatrix& y,
                      Metric metric);

/// Layers-by-layers score table. `cka` / `procrustes` / `disagreement` are
/// populated for conservative grids only: both constituents are kept, and a
/// cell is flagged when they differ by more than kDisagreementThreshold.
struct SimilarityGrid {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  Matrix scores;
  Metric metric = Metric::kCka;
  Eigen::Index n_examples = 0;
  std::size_t seeds_averaged = 1;

  std::optional<Matrix> cka;
  std::optional<Matrix> procrustes;
  std::optional<Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>>
      disagreement;
};

struct GridOptions {
  /// Worker threads for cell evaluation; results do not depend on it.
  unsigned threads = 1;
};

SimilarityGrid pairwise_grid(const std::vector<ActivationMatrix>& layers_a,
                             const std::vector<ActivationMatrix>& layers_b,
                             Metric metric, const GridOptions& options = {});

/// Elementwise mean over seeds. Requires identical layer lists and metric.
SimilarityGrid average_grids(const std::vector<SimilarityGrid>& grids);

}  // namespace simscope
