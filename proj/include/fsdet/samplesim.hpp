#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fsdet/grid.hpp"
#include "fsdet/popsim.hpp"
#include "fsdet/rng.hpp"

namespace fsdet {

struct SampleSimConfig {
  int replicates = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  int paf_max_iter = 1000;
  double paf_eps = 1e-6;
};

struct GeneratedSample {
  Matrix data;     // n x p
  Matrix factors;  // n x q common-factor scores
};

/// factors = z Phi^1/2, data = factors L' + e Psi, with z (n x q) drawn first
/// and e (n x p) second, both column by column. TooFewRows if n < p + 1.
GeneratedSample generate_sample(const FactorModel& model, int n, NormalStream& rng);

struct PafResult {
  Matrix loadings;  // p x q, unrotated
  Vector communalities;
  int iterations = 0;
  double final_change = 0.0;
  bool converged = false;
  bool heywood = false;      // communality clamp active in the last iteration
  bool smc_fallback = false; // R was not invertible; started from max |r_ij|
};

/// Iterated principal-axis factoring from squared-multiple-correlation start
/// values. Communalities are clamped to at most 1 - 1e-6. Does not throw on
/// non-convergence; the last iterate is returned with converged = false.
PafResult principal_axis(const SymmetricMatrix& r, int q, int max_iter = 1000, double eps = 1e-6);

struct RotationResult {
  Matrix loadings;
  SymmetricMatrix phi;
};

/// Oblique least-squares transform of `unrotated` toward `target`, rescaled
/// so that diag(phi) = 1 exactly; columns are then matched to the target by
/// congruence and given positive orientation. RankDeficient if `unrotated`
/// or the transform is singular.
RotationResult oblique_target_rotation(const Matrix& unrotated, const Matrix& target);

struct SampleEstimate {
  Matrix loadings;
  SymmetricMatrix phi;
  SymmetricMatrix correlation;
  int iterations = 0;
  double final_change = 0.0;
  bool converged = false;
  bool heywood = false;
};

SampleEstimate estimate_model(const SymmetricMatrix& r, const Matrix& target, int max_iter = 1000, double eps = 1e-6);

/// Completes an estimate with unique variances 1 - diag(L Phi L'), floored
/// at 1e-6.
FactorModel estimated_factor_model(const SampleEstimate& est);

enum class ReplicateStatus { Ok, Heywood, NoConvergence, Numerical };
const char* to_string(ReplicateStatus s);

struct ReplicateResult {
  ReplicateStatus status = ReplicateStatus::Ok;
  // Indexed by index_of(kind); means over factors or factor pairs.
  std::array<double, 3> determinacy{};        // correlation of scores with the simulated factors
  std::array<double, 3> determinacy_model{};  // against the estimated model with R as covariance
  std::array<double, 3> intercorrelation{};   // sample correlations of the scores
  double phi_hat = 0.0;                       // mean off-diagonal estimated factor correlation
  int iterations = 0;
};

/// One replicate: simulate, correlate, extract, rotate toward the population
/// pattern, weight with R and the estimates, score and summarize.
ReplicateResult run_replicate(const FactorModel& population, int n, NormalStream& rng, const SampleSimConfig& config);

/// Stream key of a condition (hash of its label).
std::uint64_t condition_key(const SampleCondition& cond);

inline constexpr std::array<const char*, 10> kSampleMetrics = {
    "P_r", "P_c", "P_c2", "Cor_r", "Cor_c", "Cor_c2", "P_r_model", "P_c_model", "P_c2_model", "Phi_hat"};

double metric_value(const ReplicateResult& r, std::size_t metric);

struct SampleAggregate {
  SampleCondition condition;
  int replicates = 0;
  int heywood = 0;
  int nonconverged = 0;
  int numerical = 0;
  std::vector<ReplicateResult> kept;
  std::array<Summary, kSampleMetrics.size()> metrics{};

  int excluded() const noexcept { return heywood + nonconverged + numerical; }
  const Summary& metric(std::string_view name) const;
};

SampleAggregate run_sample_condition(const SampleCondition& cond, const SampleSimConfig& config);

/// All (condition, replicate) pairs are independent work items; output is in
/// condition order and bit-identical for any thread count.
std::vector<SampleAggregate> run_sample_grid(std::span<const SampleCondition> conditions, const SampleSimConfig& config);

/// Replicate-level values of every kept replicate in a group, pooled with
/// equal weight. Groups appear in ascending key order.
SummaryTable aggregate_samples(std::span<const SampleAggregate> aggregates, GroupKey key);

/// Salient-loading groups followed by the total.
SummaryTable sample_summary(std::span<const SampleAggregate> aggregates);

struct SampleFigureRow {
  double sl = 0.0;
  double phi_pop = 0.0;
  bool nl = false;
  int n = 0;
  bool var_sl = false;
  Summary p_reg, p_cor, cor_reg, cor_cor;
  int replicates = 0;
  int excluded = 0;
};

/// Rows for q = 9, sorted by (sl, phi_pop, nl, n, var_sl).
std::vector<SampleFigureRow> figure_data_samples(std::span<const SampleAggregate> aggregates);

/// group, metric, mean, sd, n_conditions, n, replicates, excluded_count; n is
/// empty when a group spans several sample sizes.
std::string sample_summary_csv(const SummaryTable& table);
std::string sample_conditions_csv(std::span<const SampleAggregate> aggregates);
std::string sample_figure_csv(std::span<const SampleFigureRow> rows);

}  // namespace fsdet
