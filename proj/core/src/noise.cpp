#include "simscope/noise.hpp"

#include <cmath>
#include <numbers>

namespace simscope {
namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in (0, 1): 53 random bits, offset by half an ulp.
double to_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double keyed_normal(std::uint64_t seed, std::uint64_t stream,
                    std::uint64_t example, std::uint64_t component) {
  const std::uint64_t key =
      mix(mix(mix(seed) ^ stream) ^ example) ^ (component << 1);
  const double u1 = to_unit(mix(key));
  const double u2 = to_unit(mix(key ^ 1u));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Matrix keyed_normal_matrix(std::uint64_t seed, std::uint64_t stream,
                           std::span<const Eigen::Index> rows,
                           Eigen::Index cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), cols);
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const auto example = static_cast<std::uint64_t>(rows[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < cols; ++c) {
      out(r, c) = keyed_normal(seed, stream, example, static_cast<std::uint64_t>(c));
    }
  }
  return out;
}

Matrix keyed_normal_matrix(std::uint64_t seed, std::uint64_t stream,
                           Eigen::Index rows, Eigen::Index cols) {
  Matrix out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      out(r, c) = keyed_normal(seed, stream, static_cast<std::uint64_t>(r),
                               static_cast<std::uint64_t>(c));
    }
  }
  return out;
}

}  // namespace simscope
