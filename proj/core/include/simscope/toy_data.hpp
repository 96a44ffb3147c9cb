#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "simscope/matrix.hpp"

namespace simscope {

using IndexMatrix =
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Binary sprite images enumerated over a full factor grid.
///
/// Factors are, in order: shape, scale, x, y. Fewer than four factor sizes
/// fix the missing trailing factors at 0. Rendering rule for a factor row
/// (shape, scale, x, y) on an S x S canvas:
///   * the sprite occupies a box of side b = 2 + scale whose top-left pixel
///     is at row y, column x;
///   * within the box, pixel (r, c) is lit when
///       shape 0 (square):   always
///       shape 1 (triangle): c <= r
///       shape 2 (plus):     r == b / 2 or c == b / 2   (integer division)
///   * images are flattened row-major to S*S values in {0, 1}.
/// Rows enumerate factor combinations with the last factor varying fastest.
struct FactorDataset {
  Matrix images;        // count x (S*S)
  IndexMatrix factors;  // count x F
  std::vector<std::int64_t> factor_sizes;
  Eigen::Index image_size = 0;
  std::uint64_t seed = 0;

  Eigen::Index size() const { return images.rows(); }
};

inline constexpr std::int64_t kMaxFactorCombinations = 100000;

/// Default desk-scale grid: 3 shapes x 4 scales x 4 x-positions x 4
/// y-positions on 8x8 images.
inline const std::vector<std::int64_t> kDefaultFactorSizes{3, 4, 4, 4};
inline constexpr Eigen::Index kDefaultImageSize = 8;

FactorDataset generate_factor_dataset(std::vector<std::int64_t> factor_sizes,
                                      Eigen::Index image_size,
                                      std::uint64_t seed);

/// Renders one factor row following the rule documented on FactorDataset.
Vector render_factors(std::span<const std::int64_t> factors,
                      Eigen::Index image_size);

struct TrainTestSplit {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
};

/// Seeded shuffle, then the first floor(fraction * size) indices train.
TrainTestSplit split_train_test(const FactorDataset& ds, double fraction,
                                std::uint64_t seed);

/// k distinct indices drawn without replacement from `pool`.
std::vector<Eigen::Index> eval_batch_indices(std::span<const Eigen::Index> pool,
                                             Eigen::Index k, std::uint64_t seed);

/// k images sampled without replacement from the whole dataset.
Matrix eval_batch(const FactorDataset& ds, Eigen::Index k, std::uint64_t seed);

/// k images sampled without replacement from the rows listed in `pool`.
Matrix eval_batch(const FactorDataset& ds, std::span<const Eigen::Index> pool,
                  Eigen::Index k, std::uint64_t seed);

}  // namespace simscope
