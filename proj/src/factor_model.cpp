#include "fsdet/factor_model.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fsdet/errors.hpp"

namespace fsdet {

namespace {

constexpr std::array<double, 5> kSalientOffsets{-0.10, -0.05, 0.0, 0.05, 0.10};
constexpr std::array<double, 5> kNextFactor{0.10, 0.10, 0.10, 0.0, -0.10};
constexpr std::array<double, 5> kSecondNextFactor{-0.10, -0.10, 0.10, 0.10, 0.0};

}  // namespace

FactorModel::FactorModel(Matrix loadings, SymmetricMatrix phi, Vector unique_loadings, double tol)
    : loadings_(std::move(loadings)), phi_(std::move(phi)), unique_(std::move(unique_loadings)) {
  const Index p = loadings_.rows();
  const Index q = loadings_.cols();
  if (p == 0 || q == 0) fail(ErrorKind::DimensionMismatch, "factor model needs p >= 1 and q >= 1");
  if (phi_.order() != q || unique_.size() != p) {
    std::ostringstream os;
    os << "loadings " << p << "x" << q << ", phi " << phi_.order() << "x" << phi_.order() << ", unique loadings "
       << unique_.size();
    fail(ErrorKind::DimensionMismatch, os.str());
  }
  if (!loadings_.allFinite() || !unique_.allFinite()) fail(ErrorKind::InvalidArgument, "non-finite model parameter");
  for (Index k = 0; k < q; ++k) {
    if (std::abs(phi_(k, k) - 1.0) > 1e-12) fail(ErrorKind::InvalidArgument, "phi must have a unit diagonal");
  }
  Matrix unit = phi_.matrix();
  unit.diagonal().setOnes();
  phi_ = SymmetricMatrix::symmetrized(unit);
  const double lo = min_eigenvalue(phi_);
  if (lo < -tol * std::max(1.0, static_cast<double>(q))) fail(ErrorKind::NotPSD, "phi is not positive semi-definite");
  for (Index i = 0; i < p; ++i) {
    if (!(unique_(i) > 0.0)) {
      std::ostringstream os;
      os << "unique loading of variable " << i + 1 << " is not positive";
      fail(ErrorKind::HeywoodCase, os.str());
    }
  }
}

FactorModel FactorModel::from_loadings(Matrix loadings, SymmetricMatrix phi, double tol) {
  Vector psi = uniqueness_from_loadings(loadings, phi);
  return FactorModel(std::move(loadings), std::move(phi), std::move(psi), tol);
}

Vector FactorModel::communalities() const { return (loadings_ * phi_.matrix()).cwiseProduct(loadings_).rowwise().sum(); }

SymmetricMatrix implied_covariance(const FactorModel& model) {
  Matrix sigma = model.loadings() * model.phi().matrix() * model.loadings().transpose();
  sigma.diagonal() += model.unique_variances();
  return SymmetricMatrix::symmetrized(sigma);
}

Vector uniqueness_from_loadings(const Matrix& loadings, const SymmetricMatrix& phi) {
  if (loadings.cols() != phi.order()) fail(ErrorKind::DimensionMismatch, "loadings and phi disagree on q");
  const Vector h = (loadings * phi.matrix()).cwiseProduct(loadings).rowwise().sum();
  Vector psi(h.size());
  for (Index i = 0; i < h.size(); ++i) {
    if (!(h(i) < 1.0)) {
      std::ostringstream os;
      os << "communality of variable " << i + 1 << " is " << h(i);
      fail(ErrorKind::HeywoodCase, os.str());
    }
    psi(i) = std::sqrt(1.0 - h(i));
  }
  return psi;
}

SymmetricMatrix constant_correlation(Index q, double value) {
  Matrix m = Matrix::Constant(q, q, value);
  m.diagonal().setOnes();
  return SymmetricMatrix(m);
}

std::string LoadingCondition::label() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "q=%d sl=%.2f phi=%.2f p/q=%d var_sl=%d nl=%d", q, sl, phi, p_per_q, var_sl ? 1 : 0,
                nl ? 1 : 0);
  return buf;
}

void validate(const LoadingCondition& cond) {
  if (cond.q < 1) fail(ErrorKind::InvalidArgument, "q must be at least 1");
  if (cond.p_per_q < 1) fail(ErrorKind::InvalidArgument, "p_per_q must be at least 1");
  if (!(cond.sl > 0.0 && cond.sl < 1.0)) fail(ErrorKind::InvalidArgument, "salient loading must lie in (0, 1)");
  if (!(cond.phi >= 0.0 && cond.phi < 1.0)) fail(ErrorKind::InvalidArgument, "phi must lie in [0, 1)");
}

Matrix loading_pattern(const LoadingCondition& cond) {
  validate(cond);
  const int q = cond.q;
  Matrix l = Matrix::Zero(cond.p(), q);
  for (int k = 0; k < q; ++k) {
    for (int r = 0; r < cond.p_per_q; ++r) {
      const int i = k * cond.p_per_q + r;
      const auto pos = static_cast<std::size_t>(r % 5);
      l(i, k) = cond.sl + (cond.var_sl ? kSalientOffsets[pos] : 0.0);
      if (!cond.nl) continue;
      if (q >= 2) l(i, (k + 1) % q) = kNextFactor[pos];
      if (q >= 3) l(i, (k + 2) % q) = kSecondNextFactor[pos];
    }
  }
  return l;
}

FactorModel build_loading_pattern(const LoadingCondition& cond) {
  return FactorModel::from_loadings(loading_pattern(cond), constant_correlation(cond.q, cond.phi));
}

}  // namespace fsdet
