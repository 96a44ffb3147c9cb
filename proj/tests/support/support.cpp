#include "support.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <lapacke.h>
#include <unistd.h>

namespace simscope::testing {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

Matrix random_orthogonal(Eigen::Index n, std::uint64_t seed) {
  const Matrix a = gaussian_matrix(n, n, seed);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

Vector reference_singular_values(const Matrix& m) {
  const lapack_int rows = static_cast<lapack_int>(m.rows());
  const lapack_int cols = static_cast<lapack_int>(m.cols());
  std::vector<double> a(m.data(), m.data() + m.size());  // column-major copy
  Vector s(std::min(rows, cols));
  std::vector<double> superb(static_cast<std::size_t>(std::max(1, std::min(rows, cols))));
  const lapack_int info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'N', 'N', rows, cols, a.data(),
                                         rows, s.data(), nullptr, 1, nullptr, 1,
                                         superb.data());
  if (info != 0) throw std::runtime_error("dgesvd failed: info " + std::to_string(info));
  return s;
}

double reference_cka(const Matrix& x, const Matrix& y) {
  const Eigen::Index n = x.rows();
  const Matrix h = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  const Matrix k = x * x.transpose();
  const Matrix l = y * y.transpose();
  const Matrix kh = k * h;
  const Matrix lh = l * h;
  const double hsic_kl = (kh * lh).trace();
  const double hsic_kk = (kh * kh).trace();
  const double hsic_ll = (lh * lh).trace();
  return hsic_kl / std::sqrt(hsic_kk * hsic_ll);
}

double reference_procrustes_similarity(const Matrix& x, const Matrix& y) {
  auto normalize = [](const Matrix& m) {
    Matrix c = m;
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      double mean = 0.0;
      for (Eigen::Index i = 0; i < c.rows(); ++i) mean += c(i, j);
      mean /= static_cast<double>(c.rows());
      for (Eigen::Index i = 0; i < c.rows(); ++i) c(i, j) -= mean;
    }
    double sq = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) sq += c.data()[i] * c.data()[i];
    return Matrix(c / std::sqrt(sq));
  };
  const Matrix xd = normalize(x);
  const Matrix yd = normalize(y);
  const double nuclear = reference_singular_values(yd.transpose() * xd).sum();
  const double pd = 2.0 - 2.0 * nuclear;
  return 1.0 - pd / 2.0;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("simscope_" + tag + "_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace simscope::testing
