#include "fsdet/predictors.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "fsdet/errors.hpp"

namespace fsdet {

namespace {

// Predictor variances below this are treated as zero.
constexpr double kMinPredictorVariance = 1e-14;

void check_sigma(const FactorModel& model, const SymmetricMatrix& sigma) {
  if (sigma.order() != model.variables()) {
    std::ostringstream os;
    os << "sigma is " << sigma.order() << "x" << sigma.order() << " but the model has " << model.variables()
       << " variables";
    fail(ErrorKind::DimensionMismatch, os.str());
  }
}

Vector predictor_variances(const Matrix& b, const SymmetricMatrix& sigma) {
  const Vector v = (b.transpose() * sigma.matrix()).cwiseProduct(b.transpose()).rowwise().sum();
  for (Index k = 0; k < v.size(); ++k) {
    if (!(v(k) > kMinPredictorVariance)) {
      std::ostringstream os;
      os << "predictor " << k + 1 << " has variance " << v(k);
      fail(ErrorKind::DegenerateWeights, os.str());
    }
  }
  return v;
}

}  // namespace

const char* to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::Regression: return "regression";
    case PredictorKind::McDonald: return "mcdonald";
    case PredictorKind::CorrelationPreserving: return "cp-from-regression";
  }
  return "unknown";
}

PredictorKind parse_predictor_kind(std::string_view text) {
  if (text == "regression" || text == "r") return PredictorKind::Regression;
  if (text == "mcdonald" || text == "c") return PredictorKind::McDonald;
  if (text == "cp-from-regression" || text == "cp" || text == "c2") return PredictorKind::CorrelationPreserving;
  fail(ErrorKind::InvalidArgument, "unknown predictor kind '" + std::string(text) + "'");
}

ScoreWeights regression_weights(const FactorModel& model) { return regression_weights(model, implied_covariance(model)); }

ScoreWeights regression_weights(const FactorModel& model, const SymmetricMatrix& sigma) {
  check_sigma(model, sigma);
  const SymmetricMatrix sigma_inv = invert_spd(sigma);
  return {sigma_inv.matrix() * model.loadings() * model.phi().matrix(), PredictorKind::Regression};
}

ScoreWeights mcdonald_weights(const FactorModel& model) { return mcdonald_weights(model, implied_covariance(model)); }

ScoreWeights mcdonald_weights(const FactorModel& model, const SymmetricMatrix& sigma) {
  check_sigma(model, sigma);
  const Vector psi2 = model.unique_variances();
  for (Index i = 0; i < psi2.size(); ++i) {
    if (!(psi2(i) > 0.0)) fail(ErrorKind::HeywoodCase, "unique variance must be positive");
  }
  const SymmetricMatrix n = sym_sqrt(model.phi());
  // G = Psi^-2 L N, so B' = N (G' Sigma G)^-1/2 G'.
  const Matrix g = psi2.cwiseInverse().asDiagonal() * model.loadings() * n.matrix();
  const SymmetricMatrix inner = SymmetricMatrix::symmetrized(g.transpose() * sigma.matrix() * g);
  const SymmetricMatrix inner_isqrt = sym_inv_sqrt(inner);
  return {g * inner_isqrt.matrix() * n.matrix(), PredictorKind::McDonald};
}

ScoreWeights cp_from_regression_weights(const FactorModel& model) {
  return cp_from_regression_weights(model, implied_covariance(model));
}

ScoreWeights cp_from_regression_weights(const FactorModel& model, const SymmetricMatrix& sigma) {
  check_sigma(model, sigma);
  const SymmetricMatrix sigma_inv = invert_spd(sigma);
  const Matrix sil = sigma_inv.matrix() * model.loadings();
  const SymmetricMatrix info = SymmetricMatrix::symmetrized(model.loadings().transpose() * sil);
  return {sil * sym_inv_sqrt(info).matrix() * sym_sqrt(model.phi()).matrix(), PredictorKind::CorrelationPreserving};
}

ScoreWeights compute_weights(PredictorKind kind, const FactorModel& model, const SymmetricMatrix& sigma) {
  switch (kind) {
    case PredictorKind::Regression: return regression_weights(model, sigma);
    case PredictorKind::McDonald: return mcdonald_weights(model, sigma);
    case PredictorKind::CorrelationPreserving: return cp_from_regression_weights(model, sigma);
  }
  fail(ErrorKind::InvalidArgument, "unknown predictor kind");
}

Matrix apply_weights(const Matrix& data, const ScoreWeights& w) {
  if (data.cols() != w.weights.rows()) {
    std::ostringstream os;
    os << "data has " << data.cols() << " columns, weights expect " << w.weights.rows();
    fail(ErrorKind::DimensionMismatch, os.str());
  }
  return data * w.weights;
}

Matrix transform_scores(const Matrix& scores, const SymmetricMatrix& phi) {
  if (scores.cols() != phi.order()) {
    std::ostringstream os;
    os << "scores have " << scores.cols() << " columns, phi is " << phi.order() << "x" << phi.order();
    fail(ErrorKind::DimensionMismatch, os.str());
  }
  if (scores.rows() < scores.cols() + 1 || scores.rows() < 2) {
    std::ostringstream os;
    os << "need at least q+1 = " << scores.cols() + 1 << " rows, got " << scores.rows();
    fail(ErrorKind::TooFewRows, os.str());
  }
  const Matrix z = standardize_columns(scores);
  const SymmetricMatrix c = cov_to_corr(sample_covariance(z));
  return z * sym_inv_sqrt(c).matrix() * sym_sqrt(phi).matrix();
}

Vector determinacy(const FactorModel& model, const ScoreWeights& w, const SymmetricMatrix& sigma) {
  check_sigma(model, sigma);
  const Vector var = predictor_variances(w.weights, sigma);
  const Matrix cov_with_factors = w.weights.transpose() * model.loadings() * model.phi().matrix();
  return cov_with_factors.diagonal().cwiseQuotient(var.cwiseSqrt());
}

Vector determinacy(const FactorModel& model, const ScoreWeights& w) {
  return determinacy(model, w, implied_covariance(model));
}

SymmetricMatrix predictor_intercorrelations(const ScoreWeights& w, const SymmetricMatrix& sigma) {
  if (sigma.order() != w.weights.rows()) fail(ErrorKind::DimensionMismatch, "weights and sigma disagree on p");
  predictor_variances(w.weights, sigma);
  return cov_to_corr(SymmetricMatrix::symmetrized(w.weights.transpose() * sigma.matrix() * w.weights));
}

PredictorReport evaluate_predictor(const FactorModel& model, PredictorKind kind, const SymmetricMatrix& sigma) {
  const ScoreWeights w = compute_weights(kind, model, sigma);
  PredictorReport r;
  r.kind = kind;
  r.determinacy = determinacy(model, w, sigma);
  r.intercorrelations = predictor_intercorrelations(w, sigma);
  r.bias = Matrix::Zero(model.factors(), model.factors());
  r.loss = Vector::Zero(model.factors());
  return r;
}

void bias_and_loss(const SymmetricMatrix& phi, PredictorReport& regression, PredictorReport& mcdonald,
                   PredictorReport& cp) {
  for (PredictorReport* r : {&regression, &mcdonald, &cp}) {
    r->bias = r->intercorrelations.matrix() - phi.matrix();
    r->bias.diagonal().setZero();
    r->loss = r->determinacy - regression.determinacy;
  }
}

double TradeoffReport::mean_bias() const { return offdiag_mean(regression.bias); }
double TradeoffReport::mean_loss_mcdonald() const { return mcdonald.loss.mean(); }
double TradeoffReport::mean_loss_cp() const { return cp.loss.mean(); }

TradeoffReport diagnose(const FactorModel& model, const SymmetricMatrix& sigma) {
  TradeoffReport t{evaluate_predictor(model, PredictorKind::Regression, sigma),
                   evaluate_predictor(model, PredictorKind::McDonald, sigma),
                   evaluate_predictor(model, PredictorKind::CorrelationPreserving, sigma)};
  bias_and_loss(model.phi(), t.regression, t.mcdonald, t.cp);
  return t;
}

TradeoffReport diagnose(const FactorModel& model) { return diagnose(model, implied_covariance(model)); }

}  // namespace fsdet
