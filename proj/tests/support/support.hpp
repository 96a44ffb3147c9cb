#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "simscope/matrix.hpp"

namespace simscope::testing {

/// i.i.d. N(0, 1) entries from std::mt19937_64, independent of the
/// library's own keyed generator.
Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

/// Haar-ish random orthogonal matrix: Q factor of a Gaussian matrix with
/// the signs of R's diagonal folded in.
Matrix random_orthogonal(Eigen::Index n, std::uint64_t seed);

/// Singular values from LAPACK dgesvd, descending.
Vector reference_singular_values(const Matrix& m);

/// Linear CKA through n x n Gram matrices and the centering matrix H:
/// tr(K H L H) / sqrt(tr(K H K H) tr(L H L H)).
double reference_cka(const Matrix& x, const Matrix& y);

/// 1 - P_d / 2 with normalization and the nuclear norm done by hand and
/// LAPACK respectively.
double reference_procrustes_similarity(const Matrix& x, const Matrix& y);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace simscope::testing
