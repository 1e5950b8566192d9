#pragma once

#include <filesystem>
#include <random>

#include "fsdet/csv.hpp"
#include "fsdet/factor_model.hpp"
#include "fsdet/linalg.hpp"

namespace fsdet::test {

inline std::filesystem::path appendix_dir() { return std::filesystem::path(FSDET_DATA_DIR) / "appendix"; }

inline FactorModel appendix_model() {
  const Matrix l = read_matrix_csv(appendix_dir() / "loadings.csv");
  const SymmetricMatrix phi(read_matrix_csv(appendix_dir() / "phi.csv"));
  return FactorModel::from_loadings(l, phi);
}

inline SymmetricMatrix appendix_sigma() { return SymmetricMatrix(read_matrix_csv(appendix_dir() / "sigma.csv")); }

// Three factors, fifteen variables, salient .50, phi .30.
inline LoadingCondition simple_three_factor() { return {3, 0.5, 0.3, 5, false, false}; }
// Same with varying salient and non-zero non-salient loadings.
inline LoadingCondition full_three_factor() { return {3, 0.5, 0.3, 5, true, true}; }

/// Random well-conditioned correlation-metric model.
inline FactorModel random_model(std::mt19937_64& gen, Index p, Index q) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix l = Matrix::Zero(p, q);
  for (Index i = 0; i < p; ++i) {
    l(i, i % q) = 0.35 + 0.45 * u(gen);
    for (Index k = 0; k < q; ++k) {
      if (k != i % q) l(i, k) = 0.2 * (u(gen) - 0.5);
    }
  }
  // Factor correlations from a low-rank-plus-identity covariance.
  Matrix w(q, 2);
  for (Index i = 0; i < q; ++i) {
    w(i, 0) = 0.8 * u(gen);
    w(i, 1) = 0.6 * (u(gen) - 0.5);
  }
  const SymmetricMatrix phi = cov_to_corr(SymmetricMatrix::symmetrized(w * w.transpose() + Matrix::Identity(q, q)));
  const Matrix& pm = phi.matrix();
  // Keep communalities well below one.
  Vector h = (l * pm).cwiseProduct(l).rowwise().sum();
  for (Index i = 0; i < p; ++i) {
    if (h(i) > 0.85) l.row(i) *= std::sqrt(0.85 / h(i));
  }
  return FactorModel::from_loadings(l, phi);
}

inline Matrix random_matrix(std::mt19937_64& gen, Index rows, Index cols) {
  std::normal_distribution<double> z;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = z(gen);
  }
  return m;
}

}  // namespace fsdet::test
