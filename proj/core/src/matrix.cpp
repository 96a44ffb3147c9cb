#include "simscope/matrix.hpp"

#include <utility>

#include <Eigen/SVD>

#include "simscope/error.hpp"

namespace simscope {
namespace {

constexpr Eigen::Index kJacobiMaxDim = 64;

void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::kInvalidInput,
                std::string(what) + ": matrix contains non-finite entries");
  }
}

template <typename Svd>
double sum_singular_values(const Matrix& tall) {
  Svd svd(tall);
  if (svd.info() != Eigen::Success) {
    throw Error(ErrorKind::kNumerical,
                "nuclear_norm: SVD did not converge for " +
                    std::to_string(tall.rows()) + "x" +
                    std::to_string(tall.cols()) + " matrix");
  }
  return svd.singularValues().sum();
}

}  // namespace

ActivationMatrix::ActivationMatrix(Matrix data, std::string layer_name)
    : data_(std::move(data)), layer_name_(std::move(layer_name)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw Error(ErrorKind::kInvalidInput,
                "activation matrix '" + layer_name_ +
                    "' must have at least one row and one column");
  }
  if (!data_.allFinite()) {
    throw Error(ErrorKind::kInvalidInput, "activation matrix '" + layer_name_ +
                                              "' contains non-finite entries");
  }
}

ActivationMatrix::ActivationMatrix(Trusted, Matrix data, std::string layer_name,
                                   bool centered, bool normalized)
    : data_(std::move(data)),
      layer_name_(std::move(layer_name)),
      centered_(centered),
      normalized_(normalized) {}

ActivationMatrix center_columns(const ActivationMatrix& m) {
  const RowVector means = m.data().colwise().mean();
  Matrix centered = m.data().rowwise() - means;
  return ActivationMatrix(ActivationMatrix::Trusted{}, std::move(centered),
                          m.layer_name(), true, false);
}

ActivationMatrix procrustes_normalize(const ActivationMatrix& m) {
  ActivationMatrix centered = center_columns(m);
  const double norm = centered.data().norm();
  if (norm < kDegenerateNorm) {
    throw Error(ErrorKind::kDegenerate,
                "procrustes_normalize: layer '" + m.layer_name() +
                    "' has no variation after centering");
  }
  return ActivationMatrix(ActivationMatrix::Trusted{}, centered.data() / norm,
                          m.layer_name(), true, true);
}

double frobenius_norm(const Eigen::Ref<const Matrix>& m) {
  require_finite(m, "frobenius_norm");
  return m.norm();
}

double nuclear_norm(const Eigen::Ref<const Matrix>& m) {
  require_finite(m, "nuclear_norm");
  if (m.size() == 0) {
    throw Error(ErrorKind::kInvalidInput, "nuclear_norm: empty matrix");
  }
  Matrix tall = m.rows() >= m.cols() ? Matrix(m) : Matrix(m.transpose());
  if (tall.cols() <= kJacobiMaxDim) {
    return sum_singular_values<Eigen::JacobiSVD<Matrix>>(tall);
  }
  return sum_singular_values<Eigen::BDCSVD<Matrix>>(tall);
}

Matrix select_rows(const Matrix& m, std::span<const Eigen::Index> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  }
  return out;
}

Matrix flatten_row_major(const double* values, Eigen::Index n,
                         Eigen::Index features_per_example) {
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(values, n, features_per_example);
}

}  // namespace simscope
