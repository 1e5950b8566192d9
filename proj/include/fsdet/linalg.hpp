#pragma once

// Dense symmetric-matrix kernels shared by the factor-model, predictor and
// simulation code. Everything here is a pure function of its inputs.

#include <Eigen/Dense>

namespace fsdet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Eigenvalue tolerance, relative to the largest eigenvalue magnitude.
inline constexpr double kDefaultTol = 1e-10;

/// Square matrix whose entries are exactly symmetric and finite.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;

  /// Rejects non-square input, non-finite entries and asymmetry larger than
  /// `asym_tol` (relative to the largest entry). Residual asymmetry inside the
  /// tolerance is averaged away so that (i,j) and (j,i) are bit-identical.
  explicit SymmetricMatrix(const Matrix& m, double asym_tol = 1e-9);

  /// Averages m and m' without any tolerance check; for products that are
  /// symmetric in exact arithmetic.
  static SymmetricMatrix symmetrized(const Matrix& m);

  static SymmetricMatrix identity(Index n);
  static SymmetricMatrix diagonal(const Vector& d);

  Index order() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }
  Vector diagonal_values() const { return m_.diagonal(); }

 private:
  Matrix m_;
};

/// Symmetric (eigendecomposition) square root of a PSD matrix. Eigenvalues in
/// [-tol*scale, 0) are clamped to zero.
SymmetricMatrix sym_sqrt(const SymmetricMatrix& s, double tol = kDefaultTol);

/// Symmetric inverse square root of a PD matrix.
SymmetricMatrix sym_inv_sqrt(const SymmetricMatrix& s, double tol = kDefaultTol);

/// Inverse of a symmetric positive definite matrix (Cholesky).
SymmetricMatrix invert_spd(const SymmetricMatrix& s, double tol = kDefaultTol);

/// D^{-1/2} S D^{-1/2} with D = diag(S); unit diagonal by construction.
SymmetricMatrix cov_to_corr(const SymmetricMatrix& s);

/// Smallest eigenvalue; convenience for validation code and tests.
double min_eigenvalue(const SymmetricMatrix& s);

double max_abs_diff(const Matrix& a, const Matrix& b);

/// Mean of the strictly upper-triangular entries (the off-diagonal pairs).
double offdiag_mean(const Matrix& m);

/// Sample covariance of the columns of an n x p data matrix (denominator n-1).
SymmetricMatrix sample_covariance(const Matrix& data);

/// Sample correlation of the columns of an n x p data matrix.
SymmetricMatrix sample_correlation(const Matrix& data);

/// Centers each column and scales it to unit sample SD (denominator n-1).
Matrix standardize_columns(const Matrix& data);

}  // namespace fsdet
