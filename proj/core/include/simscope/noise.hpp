#pragma once

#include <cstdint>
#include <span>

#include "simscope/matrix.hpp"

namespace simscope {

/// Base stream id for evaluation-batch snapshot noise; training steps use
/// their step number as the stream.
inline constexpr std::uint64_t kEvalStream = ~std::uint64_t{0};

/// Counter-based standard normal draw: a pure function of its key, so any
/// entry can be regenerated without replaying a generator.
double keyed_normal(std::uint64_t seed, std::uint64_t stream,
                    std::uint64_t example, std::uint64_t component);

/// rows.size() x cols matrix; row r uses example id rows[r].
Matrix keyed_normal_matrix(std::uint64_t seed, std::uint64_t stream,
                           std::span<const Eigen::Index> rows,
                           Eigen::Index cols);

/// Same, with example ids 0..rows-1.
Matrix keyed_normal_matrix(std::uint64_t seed, std::uint64_t stream,
                           Eigen::Index rows, Eigen::Index cols);

}  // namespace simscope
