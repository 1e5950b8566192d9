#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fsdet/factor_model.hpp"
#include "fsdet/predictors.hpp"
#include "fsdet/stats.hpp"

namespace fsdet {

inline constexpr std::array<PredictorKind, 3> kAllPredictors = {
    PredictorKind::Regression, PredictorKind::McDonald, PredictorKind::CorrelationPreserving};

inline constexpr std::size_t index_of(PredictorKind kind) { return static_cast<std::size_t>(kind); }

/// Exact evaluation of one grid condition.
struct PopulationRecord {
  LoadingCondition condition;
  std::array<Vector, 3> determinacy;               // per factor, indexed by index_of(kind)
  std::array<std::vector<double>, 3> offdiag_cor;  // upper triangle of the predictor correlations
  std::vector<double> bias;                        // regression offdiag_cor minus phi
  std::array<Vector, 3> loss;                      // determinacy minus regression determinacy

  double mean_determinacy(PredictorKind kind) const;
  double mean_intercorrelation(PredictorKind kind) const;
  double bias_mean() const;
  double loss_mean(PredictorKind kind) const;
};

PopulationRecord evaluate_condition(const LoadingCondition& cond);

/// Evaluates every condition; results are in input order regardless of
/// `threads` (0 = hardware concurrency).
std::vector<PopulationRecord> run_population(std::span<const LoadingCondition> conditions, unsigned threads = 0);

enum class GroupKey { Total, SalientLoading, Factors, Phi, PerFactor, VarSl, Nl, SampleSize };

GroupKey parse_group_key(std::string_view text);
const char* to_string(GroupKey key);
/// Numeric value of the grouping variable; 0 for Total.
double group_value(GroupKey key, const LoadingCondition& cond, int n = 0);
std::string group_label(GroupKey key, const LoadingCondition& cond, int n = 0);

struct SummaryRow {
  std::string group;
  std::string metric;
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n_conditions = 0;
  std::size_t n_values = 0;
  // Sample-study bookkeeping; zero for population rows.
  int sample_size = 0;  // 0 when the group spans several sizes
  std::size_t replicates = 0;
  std::size_t excluded = 0;
};

struct SummaryTable {
  std::vector<SummaryRow> rows;

  /// Throws EmptyGroup if the pair is absent.
  const SummaryRow& find(std::string_view group, std::string_view metric) const;
  void append(const SummaryTable& other);
};

/// Metric names: P_r, P_c, P_c2 pool factor-level determinacies; Cor_r,
/// Cor_c, Cor_c2 pool off-diagonal predictor correlations; Bias_r pools
/// Cor_r - phi; Loss_c, Loss_c2 pool determinacy differences to P_r.
inline constexpr std::array<const char*, 9> kPopulationMetrics = {"P_r",   "P_c",    "P_c2",   "Cor_r", "Cor_c",
                                                                  "Cor_c2", "Bias_r", "Loss_c", "Loss_c2"};

/// Pools the values of every record in a group with equal weight and reports
/// mean and SD (denominator n-1). Groups appear in ascending key order.
SummaryTable aggregate_by(std::span<const PopulationRecord> records, GroupKey key);

/// Salient-loading groups followed by the total, as tabulated for the
/// population study.
SummaryTable population_summary(std::span<const PopulationRecord> records);

struct PopulationFigureRow {
  double sl = 0.0;
  bool var_sl = false;
  int p_per_q = 5;
  bool nl = false;
  double phi_pop = 0.0;
  double rho_reg = 0.0;
  double phi_reg = 0.0;
  double rho_cor = 0.0;
  double phi_cor = 0.0;
};

/// Rows for q = 3, sorted by (sl, var_sl, p_per_q, nl, phi_pop).
std::vector<PopulationFigureRow> figure_data(std::span<const PopulationRecord> records);

std::string summary_csv(const SummaryTable& table);
std::string figure_csv(std::span<const PopulationFigureRow> rows);
/// One line per record with the condition and its mean metrics.
std::string population_records_csv(std::span<const PopulationRecord> records);

}  // namespace fsdet
