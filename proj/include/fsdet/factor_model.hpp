#pragma once

#include <string>

#include "fsdet/linalg.hpp"

namespace fsdet {

/// Loadings (p x q), factor correlations (q x q) and unique loadings (the
/// diagonal of Psi, length p). Invariants are checked on construction.
class FactorModel {
 public:
  FactorModel(Matrix loadings, SymmetricMatrix phi, Vector unique_loadings, double tol = kDefaultTol);

  /// Completes a correlation-metric model: Psi_ii = sqrt(1 - (L Phi L')_ii).
  static FactorModel from_loadings(Matrix loadings, SymmetricMatrix phi, double tol = kDefaultTol);

  const Matrix& loadings() const noexcept { return loadings_; }
  const SymmetricMatrix& phi() const noexcept { return phi_; }
  const Vector& unique_loadings() const noexcept { return unique_; }
  Vector unique_variances() const { return unique_.cwiseAbs2(); }

  Index variables() const noexcept { return loadings_.rows(); }
  Index factors() const noexcept { return loadings_.cols(); }

  /// diag(L Phi L')
  Vector communalities() const;

 private:
  Matrix loadings_;
  SymmetricMatrix phi_;
  Vector unique_;
};

/// Sigma = L Phi L' + Psi^2.
SymmetricMatrix implied_covariance(const FactorModel& model);

/// sqrt(1 - diag(L Phi L')); HeywoodCase if a communality reaches 1.
Vector uniqueness_from_loadings(const Matrix& loadings, const SymmetricMatrix& phi);

/// Equicorrelation matrix with `value` off the diagonal.
SymmetricMatrix constant_correlation(Index q, double value);

/// One cell of the simulation design.
struct LoadingCondition {
  int q = 3;
  double sl = 0.5;
  double phi = 0.0;
  int p_per_q = 5;
  bool var_sl = false;
  bool nl = false;

  int p() const noexcept { return q * p_per_q; }
  bool operator==(const LoadingCondition&) const = default;
  std::string label() const;
};

void validate(const LoadingCondition& cond);

/// Simple-structure pattern: variables k*p_per_q .. (k+1)*p_per_q-1 are
/// salient on factor k. With var_sl the salient loadings follow
/// sl + (-.10, -.05, 0, +.05, +.10), repeated down the block. With nl the
/// variables of block k load (.10, .10, .10, .00, -.10) on factor (k+1) mod q
/// and (-.10, -.10, .10, .10, .00) on factor (k+2) mod q, again repeated down
/// the block; for q = 3 this is the printed three-factor example.
Matrix loading_pattern(const LoadingCondition& cond);

FactorModel build_loading_pattern(const LoadingCondition& cond);

}  // namespace fsdet
