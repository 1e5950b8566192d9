#pragma once

#include <string_view>

#include "fsdet/factor_model.hpp"

namespace fsdet {

enum class PredictorKind {
  Regression,             // Phi L' Sigma^-1 x
  McDonald,               // correlation-preserving, from model parameters
  CorrelationPreserving,  // correlation-preserving transform of the regression predictor
};

const char* to_string(PredictorKind kind);
PredictorKind parse_predictor_kind(std::string_view text);

/// p x q matrix B; the predictor for a column observation x is B'x, so an
/// n x p data matrix X maps to scores X B.
struct ScoreWeights {
  Matrix weights;
  PredictorKind kind;
};

// Without an explicit sigma the model-implied covariance is used.
ScoreWeights regression_weights(const FactorModel& model);
ScoreWeights regression_weights(const FactorModel& model, const SymmetricMatrix& sigma);
ScoreWeights mcdonald_weights(const FactorModel& model);
ScoreWeights mcdonald_weights(const FactorModel& model, const SymmetricMatrix& sigma);
ScoreWeights cp_from_regression_weights(const FactorModel& model);
ScoreWeights cp_from_regression_weights(const FactorModel& model, const SymmetricMatrix& sigma);

ScoreWeights compute_weights(PredictorKind kind, const FactorModel& model, const SymmetricMatrix& sigma);

/// X B
Matrix apply_weights(const Matrix& data, const ScoreWeights& w);

/// Turns any n x q score matrix into scores whose sample correlation matrix is
/// exactly phi: columns are centered and scaled (denominator n-1), whitened by
/// the inverse square root of their correlation matrix and colored by phi^1/2.
Matrix transform_scores(const Matrix& scores, const SymmetricMatrix& phi);

/// Correlation of each standardized predictor with its factor:
/// diag(B' L Phi) / sqrt(diag(B' Sigma B)).
Vector determinacy(const FactorModel& model, const ScoreWeights& w, const SymmetricMatrix& sigma);
Vector determinacy(const FactorModel& model, const ScoreWeights& w);

/// cov_to_corr(B' Sigma B)
SymmetricMatrix predictor_intercorrelations(const ScoreWeights& w, const SymmetricMatrix& sigma);

struct PredictorReport {
  PredictorKind kind = PredictorKind::Regression;
  Vector determinacy;
  SymmetricMatrix intercorrelations;
  Matrix bias;  // intercorrelations - phi, zero diagonal
  Vector loss;  // determinacy - regression determinacy
};

PredictorReport evaluate_predictor(const FactorModel& model, PredictorKind kind, const SymmetricMatrix& sigma);

/// Fills bias and loss of all three reports relative to phi and the
/// regression report.
void bias_and_loss(const SymmetricMatrix& phi, PredictorReport& regression, PredictorReport& mcdonald,
                   PredictorReport& cp);

struct TradeoffReport {
  PredictorReport regression;
  PredictorReport mcdonald;
  PredictorReport cp;

  double mean_bias() const;        // mean off-diagonal Cor(regression) - phi
  double mean_loss_mcdonald() const;
  double mean_loss_cp() const;
};

TradeoffReport diagnose(const FactorModel& model, const SymmetricMatrix& sigma);
TradeoffReport diagnose(const FactorModel& model);

}  // namespace fsdet
