#pragma once

#include <span>
#include <string>

#include <Eigen/Dense>

namespace simscope {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Centered Frobenius norms below this are treated as zero variation.
inline constexpr double kDegenerateNorm = 1e-12;

/// n x p activations of one layer over n data examples (rows) and p
/// neurons (columns). Entries are always finite and n, p >= 1.
///
/// The `centered` / `normalized` flags are only ever set by
/// center_columns() and procrustes_normalize(), so a flagged matrix is
/// guaranteed to satisfy the corresponding invariant.
class ActivationMatrix {
 public:
  explicit ActivationMatrix(Matrix data, std::string layer_name = {});

  const Matrix& data() const noexcept { return data_; }
  const std::string& layer_name() const noexcept { return layer_name_; }
  Eigen::Index n() const noexcept { return data_.rows(); }
  Eigen::Index p() const noexcept { return data_.cols(); }
  bool centered() const noexcept { return centered_; }
  bool normalized() const noexcept { return normalized_; }

 private:
  struct Trusted {};
  ActivationMatrix(Trusted, Matrix data, std::string layer_name, bool centered,
                   bool normalized);

  friend ActivationMatrix center_columns(const ActivationMatrix& m);
  friend ActivationMatrix procrustes_normalize(const ActivationMatrix& m);

  Matrix data_;
  std::string layer_name_;
  bool centered_ = false;
  bool normalized_ = false;
};

/// Subtracts each column's mean. Idempotent.
ActivationMatrix center_columns(const ActivationMatrix& m);

/// (M - colmean) / ||M - colmean||_F. Throws kDegenerate when the centered
/// matrix has Frobenius norm below kDegenerateNorm.
ActivationMatrix procrustes_normalize(const ActivationMatrix& m);

double frobenius_norm(const Eigen::Ref<const Matrix>& m);

/// Sum of singular values. Only singular values are computed, on the
/// orientation with fewer columns; one-sided Jacobi for min(n, p) <= 64,
/// divide-and-conquer bidiagonal SVD above that.
double nuclear_norm(const Eigen::Ref<const Matrix>& m);

/// Gathers the listed rows, in order.
Matrix select_rows(const Matrix& m, std::span<const Eigen::Index> rows);

/// Row-major flattening of a stack of per-example feature maps into an
/// n x (h*w*c) activation matrix. `values` holds n contiguous row-major
/// blocks of `features_per_example` entries each.
Matrix flatten_row_major(const double* values, Eigen::Index n,
                         Eigen::Index features_per_example);

}  // namespace simscope
