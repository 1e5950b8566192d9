#include "fsdet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fsdet/errors.hpp"
#include "fsdet/kernels.hpp"

namespace fsdet {

SymmetricMatrix::SymmetricMatrix(const Matrix& m, double asym_tol) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << "symmetric matrix must be square, got " << m.rows() << "x" << m.cols();
    fail(ErrorKind::DimensionMismatch, os.str());
  }
  if (!m.allFinite()) fail(ErrorKind::InvalidArgument, "symmetric matrix has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > asym_tol * scale) {
    std::ostringstream os;
    os << "matrix is not symmetric (max |a_ij - a_ji| = " << asym << ")";
    fail(ErrorKind::InvalidArgument, os.str());
  }
  m_ = 0.5 * (m + m.transpose());
}

SymmetricMatrix SymmetricMatrix::symmetrized(const Matrix& m) {
  if (m.rows() != m.cols()) fail(ErrorKind::DimensionMismatch, "symmetrized: matrix must be square");
  SymmetricMatrix s;
  s.m_ = 0.5 * (m + m.transpose());
  return s;
}

SymmetricMatrix SymmetricMatrix::identity(Index n) {
  SymmetricMatrix s;
  s.m_ = Matrix::Identity(n, n);
  return s;
}

SymmetricMatrix SymmetricMatrix::diagonal(const Vector& d) {
  SymmetricMatrix s;
  s.m_ = d.asDiagonal();
  return s;
}

namespace {

struct Spectrum {
  Vector values;
  Matrix vectors;
  double scale;
};

Spectrum spectrum(const SymmetricMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.matrix());
  if (es.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "symmetric eigendecomposition failed");
  Spectrum sp{es.eigenvalues(), es.eigenvectors(), 0.0};
  sp.scale = sp.values.size() == 0 ? 0.0 : sp.values.cwiseAbs().maxCoeff();
  return sp;
}

SymmetricMatrix from_spectrum(const Matrix& vectors, const Vector& f) {
  return SymmetricMatrix::symmetrized(vectors * f.asDiagonal() * vectors.transpose());
}

}  // namespace

SymmetricMatrix sym_sqrt(const SymmetricMatrix& s, double tol) {
  const Spectrum sp = spectrum(s);
  if (sp.values.size() == 0) return s;
  const double floor = -tol * sp.scale;
  if (sp.values.minCoeff() < floor) {
    std::ostringstream os;
    os << "smallest eigenvalue " << sp.values.minCoeff() << " below -tol";
    fail(ErrorKind::NotPSD, os.str());
  }
  const Vector root = sp.values.cwiseMax(0.0).cwiseSqrt();
  return from_spectrum(sp.vectors, root);
}

SymmetricMatrix sym_inv_sqrt(const SymmetricMatrix& s, double tol) {
  const Spectrum sp = spectrum(s);
  if (sp.values.size() == 0) return s;
  if (!(sp.values.minCoeff() > tol * sp.scale)) {
    std::ostringstream os;
    os << "smallest eigenvalue " << sp.values.minCoeff() << " not above tol";
    fail(ErrorKind::NotPD, os.str());
  }
  const Vector inv_root = sp.values.cwiseSqrt().cwiseInverse();
  return from_spectrum(sp.vectors, inv_root);
}

SymmetricMatrix invert_spd(const SymmetricMatrix& s, double tol) {
  const Index n = s.order();
  if (n == 0) return s;
  Eigen::LLT<Matrix> llt(s.matrix());
  if (llt.info() != Eigen::Success) fail(ErrorKind::NotPD, "Cholesky factorization failed");
  const double max_diag = s.matrix().diagonal().cwiseAbs().maxCoeff();
  const Vector pivots = Matrix(llt.matrixL()).diagonal();
  if (!(pivots.cwiseAbs2().minCoeff() > tol * max_diag)) fail(ErrorKind::NotPD, "matrix is numerically singular");
  return SymmetricMatrix::symmetrized(llt.solve(Matrix::Identity(n, n)));
}

SymmetricMatrix cov_to_corr(const SymmetricMatrix& s) {
  const Vector d = s.diagonal_values();
  for (Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > 0.0)) {
      std::ostringstream os;
      os << "diagonal entry " << i << " is " << d(i);
      fail(ErrorKind::NonPositiveDiagonal, os.str());
    }
  }
  const Vector inv_sd = d.cwiseSqrt().cwiseInverse();
  Matrix c = inv_sd.asDiagonal() * s.matrix() * inv_sd.asDiagonal();
  c.diagonal().setOnes();
  return SymmetricMatrix::symmetrized(c);
}

double min_eigenvalue(const SymmetricMatrix& s) {
  if (s.order() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorKind::DimensionMismatch, "max_abs_diff: shapes differ");
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

double offdiag_mean(const Matrix& m) {
  double acc = 0.0;
  Index count = 0;
  for (Index j = 1; j < m.cols(); ++j) {
    for (Index i = 0; i < j; ++i) {
      acc += m(i, j);
      ++count;
    }
  }
  return count == 0 ? 0.0 : acc / static_cast<double>(count);
}

namespace {

// Centers the columns of `x` in place.
void center_columns(Matrix& x) {
  const auto& k = kernels::active();
  const auto n = static_cast<std::size_t>(x.rows());
  for (Index j = 0; j < x.cols(); ++j) {
    double* col = x.col(j).data();
    const double mean = k.sum(col, n) / static_cast<double>(n);
    k.shift_scale(col, n, mean, 1.0);
  }
}

void require_rows(const Matrix& data) {
  if (data.rows() < 2) fail(ErrorKind::TooFewRows, "moment computation needs at least 2 rows");
}

}  // namespace

SymmetricMatrix sample_covariance(const Matrix& data) {
  require_rows(data);
  Matrix x = data;
  center_columns(x);
  const auto p = x.cols();
  Matrix g(p, p);
  kernels::active().gram(x.data(), static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(p), g.data());
  g /= static_cast<double>(x.rows() - 1);
  return SymmetricMatrix::symmetrized(g);
}

SymmetricMatrix sample_correlation(const Matrix& data) { return cov_to_corr(sample_covariance(data)); }

Matrix standardize_columns(const Matrix& data) {
  require_rows(data);
  Matrix x = data;
  center_columns(x);
  const auto& k = kernels::active();
  const auto n = static_cast<std::size_t>(x.rows());
  for (Index j = 0; j < x.cols(); ++j) {
    double* col = x.col(j).data();
    const double var = k.dot(col, col, n) / static_cast<double>(n - 1);
    if (!(var > 0.0)) {
      std::ostringstream os;
      os << "column " << j << " has zero variance";
      fail(ErrorKind::NonPositiveDiagonal, os.str());
    }
    k.shift_scale(col, n, 0.0, 1.0 / std::sqrt(var));
  }
  return x;
}

}  // namespace fsdet
