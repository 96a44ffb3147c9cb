#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simscope/matrix.hpp"

namespace simscope {

/// Four n x p matrices of i.i.d. standard normal features. B shares the
/// first round(0.8 p) columns of A, C the first round(0.5 p), D none; all
/// other columns are fresh draws. Entries are keyed by (seed, matrix, row,
/// column), so a smaller n yields a row prefix of a larger one.
struct SyntheticSet {
  Matrix a, b, c, d;
};

SyntheticSet make_synthetic_set(Eigen::Index n, Eigen::Index p, std::uint64_t seed);

struct SyntheticRow {
  Eigen::Index n = 0;
  std::string pair;  // "A-A", "A-B", "A-C", "A-D"
  double shared_fraction = 0.0;
  double cka = 0.0;
  double procrustes = 0.0;
};

inline const std::vector<Eigen::Index> kDefaultNSweep{50, 100, 250, 500,
                                                      1000, 2500, 5000};

/// CKA and Procrustes similarity of A against A, B, C, D for every n.
std::vector<SyntheticRow> synthetic_benchmark(
    Eigen::Index p = 50, const std::vector<Eigen::Index>& n_sweep = kDefaultNSweep,
    std::uint64_t seed = 0);

}  // namespace simscope
