#include "simscope/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "simscope/error.hpp"
#include "simscope/noise.hpp"
#include "simscope/similarity.hpp"

namespace simscope {
namespace {

enum Stream : std::uint64_t { kA = 1, kB = 2, kC = 3, kD = 4 };

Matrix with_shared_prefix(const Matrix& a, Eigen::Index shared, std::uint64_t seed,
                          Stream stream) {
  Matrix out = keyed_normal_matrix(seed, stream, a.rows(), a.cols());
  out.leftCols(shared) = a.leftCols(shared);
  return out;
}

Eigen::Index shared_columns(Eigen::Index p, double fraction) {
  return static_cast<Eigen::Index>(std::lround(fraction * static_cast<double>(p)));
}

}  // namespace

SyntheticSet make_synthetic_set(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  if (n < 2 || p < 1) {
    throw Error(ErrorKind::kConfig, "synthetic set needs n >= 2 and p >= 1");
  }
  SyntheticSet set;
  set.a = keyed_normal_matrix(seed, kA, n, p);
  set.b = with_shared_prefix(set.a, shared_columns(p, 0.8), seed, kB);
  set.c = with_shared_prefix(set.a, shared_columns(p, 0.5), seed, kC);
  set.d = keyed_normal_matrix(seed, kD, n, p);
  return set;
}

std::vector<SyntheticRow> synthetic_benchmark(Eigen::Index p,
                                              const std::vector<Eigen::Index>& n_sweep,
                                              std::uint64_t seed) {
  if (n_sweep.empty()) throw Error(ErrorKind::kConfig, "synthetic benchmark: empty n sweep");
  const Eigen::Index n_max = *std::max_element(n_sweep.begin(), n_sweep.end());
  if (n_max < p) {
    throw Error(ErrorKind::kConfig,
                "synthetic benchmark: largest n must be at least p");
  }
  std::vector<SyntheticRow> rows;
  for (Eigen::Index n : n_sweep) {
    const SyntheticSet set = make_synthetic_set(n, p, seed);
    const ActivationMatrix a(set.a, "A");
    const struct {
      const char* name;
      const Matrix* other;
      double fraction;
    } pairs[] = {{"A-A", &set.a, 1.0},
                 {"A-B", &set.b, static_cast<double>(shared_columns(p, 0.8)) / p},
                 {"A-C", &set.c, static_cast<double>(shared_columns(p, 0.5)) / p},
                 {"A-D", &set.d, 0.0}};
    for (const auto& pair : pairs) {
      const ActivationMatrix other(*pair.other, pair.name + 2);
      rows.push_back({n, pair.name, pair.fraction, linear_cka(a, other).value,
                      procrustes_similarity(a, other).value});
    }
  }
  return rows;
}

}  // namespace simscope
