#include "simscope/toy_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "simscope/error.hpp"

namespace simscope {
namespace {

constexpr std::size_t kFactorCount = 4;
constexpr std::int64_t kShapeCount = 3;
constexpr std::int64_t kMinBox = 2;

void check_fits(std::span<const std::int64_t> sizes, Eigen::Index image_size) {
  auto size_of = [&](std::size_t i) -> std::int64_t {
    return i < sizes.size() ? sizes[i] : 1;
  };
  if (size_of(0) > kShapeCount) {
    throw Error(ErrorKind::kConfig, "toy data: at most 3 shapes are supported");
  }
  const std::int64_t largest_box = kMinBox + size_of(1) - 1;
  for (std::size_t axis : {2u, 3u}) {
    if (largest_box + size_of(axis) - 1 > image_size) {
      throw Error(ErrorKind::kConfig,
                  "toy data: sprites do not fit on a " +
                      std::to_string(image_size) + "x" +
                      std::to_string(image_size) + " canvas");
    }
  }
}

}  // namespace

Vector render_factors(std::span<const std::int64_t> factors,
                      Eigen::Index image_size) {
  auto factor = [&](std::size_t i) -> std::int64_t {
    return i < factors.size() ? factors[i] : 0;
  };
  const std::int64_t shape = factor(0);
  const std::int64_t box = kMinBox + factor(1);
  const std::int64_t left = factor(2);
  const std::int64_t top = factor(3);
  if (top + box > image_size || left + box > image_size) {
    throw Error(ErrorKind::kConfig, "render_factors: sprite leaves the canvas");
  }
  Vector image = Vector::Zero(image_size * image_size);
  for (std::int64_t r = 0; r < box; ++r) {
    for (std::int64_t c = 0; c < box; ++c) {
      bool lit = false;
      switch (shape) {
        case 0: lit = true; break;
        case 1: lit = c <= r; break;
        case 2: lit = r == box / 2 || c == box / 2; break;
        default:
          throw Error(ErrorKind::kConfig, "render_factors: unknown shape");
      }
      if (lit) image((top + r) * image_size + left + c) = 1.0;
    }
  }
  return image;
}

FactorDataset generate_factor_dataset(std::vector<std::int64_t> factor_sizes,
                                      Eigen::Index image_size,
                                      std::uint64_t seed) {
  if (factor_sizes.empty() || factor_sizes.size() > kFactorCount) {
    throw Error(ErrorKind::kConfig, "toy data: expected 1 to 4 factor sizes");
  }
  if (image_size < 4) {
    throw Error(ErrorKind::kConfig, "toy data: image size must be at least 4");
  }
  std::int64_t count = 1;
  for (std::int64_t s : factor_sizes) {
    if (s < 1) throw Error(ErrorKind::kConfig, "toy data: factor sizes must be >= 1");
    count *= s;
    if (count > kMaxFactorCombinations) {
      throw Error(ErrorKind::kConfig,
                  "toy data: more than 100000 factor combinations requested");
    }
  }
  check_fits(factor_sizes, image_size);

  FactorDataset ds;
  ds.factor_sizes = std::move(factor_sizes);
  ds.image_size = image_size;
  ds.seed = seed;
  const auto f = static_cast<Eigen::Index>(ds.factor_sizes.size());
  ds.images.resize(count, image_size * image_size);
  ds.factors.resize(count, f);

  std::vector<std::int64_t> row(ds.factor_sizes.size(), 0);
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index k = 0; k < f; ++k) ds.factors(i, k) = row[static_cast<std::size_t>(k)];
    ds.images.row(i) = render_factors(row, image_size).transpose();
    for (std::size_t k = row.size(); k-- > 0;) {
      if (++row[k] < ds.factor_sizes[k]) break;
      row[k] = 0;
    }
  }
  return ds;
}

TrainTestSplit split_train_test(const FactorDataset& ds, double fraction,
                                std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorKind::kConfig, "split_train_test: fraction must be in (0, 1)");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(ds.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::ptrdiff_t>(
      std::floor(fraction * static_cast<double>(order.size()) + 1e-9));
  TrainTestSplit split;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.test.assign(order.begin() + n_train, order.end());
  return split;
}

std::vector<Eigen::Index> eval_batch_indices(std::span<const Eigen::Index> pool,
                                             Eigen::Index k, std::uint64_t seed) {
  if (k < 1 || k > static_cast<Eigen::Index>(pool.size())) {
    throw Error(ErrorKind::kConfig,
                "eval_batch: k=" + std::to_string(k) + " but only " +
                    std::to_string(pool.size()) + " examples available");
  }
  std::vector<Eigen::Index> order(pool.begin(), pool.end());
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(static_cast<std::size_t>(k));
  return order;
}

Matrix eval_batch(const FactorDataset& ds, Eigen::Index k, std::uint64_t seed) {
  std::vector<Eigen::Index> all(static_cast<std::size_t>(ds.size()));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  return eval_batch(ds, all, k, seed);
}

Matrix eval_batch(const FactorDataset& ds, std::span<const Eigen::Index> pool,
                  Eigen::Index k, std::uint64_t seed) {
  return select_rows(ds.images, eval_batch_indices(pool, k, seed));
}

}  // namespace simscope
