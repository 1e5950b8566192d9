#include <cmath>
#include <map>
#include <tuple>

#include "doctest.h"
#include "fsdet/errors.hpp"
#include "fsdet/grid.hpp"
#include "fsdet/popsim.hpp"
#include "helpers.hpp"

using namespace fsdet;

namespace {

const std::vector<PopulationRecord>& full_grid() {
  static const std::vector<PopulationRecord> records = [] {
    const auto grid = enumerate_population_grid();
    return run_population(grid, 1);
  }();
  return records;
}

}  // namespace

TEST_CASE("printed example condition") {
  const PopulationRecord r = evaluate_condition(test::full_three_factor());
  for (const double c : r.offdiag_cor[index_of(PredictorKind::McDonald)]) CHECK(std::abs(c - 0.3) < 1e-10);
  for (const double c : r.offdiag_cor[index_of(PredictorKind::CorrelationPreserving)]) CHECK(std::abs(c - 0.3) < 1e-10);
  CHECK(r.bias_mean() > 0.0);
  CHECK(r.loss_mean(PredictorKind::McDonald) < 0.0);
  CHECK(r.determinacy[0].size() == 3);
  CHECK(r.offdiag_cor[0].size() == 3);
}

TEST_CASE("orthogonal clusters have zero bias") {
  for (const auto& r : full_grid()) {
    if (r.condition.phi == 0.0 && !r.condition.nl) CHECK(std::abs(r.bias_mean()) < 1e-12);
  }
}

TEST_CASE("bias and loss signs on the grid") {
  for (const auto& r : full_grid()) {
    CAPTURE(r.condition.label());
    CHECK(r.bias_mean() >= -1e-12);
    CHECK(r.loss_mean(PredictorKind::McDonald) <= 1e-12);
    CHECK(r.loss_mean(PredictorKind::CorrelationPreserving) <= 1e-12);
  }
}

TEST_CASE("bias grows with the factor correlation at low salient loadings") {
  std::map<std::tuple<int, int, bool, bool>, std::vector<double>> series;
  for (const auto& r : full_grid()) {
    const auto& c = r.condition;
    if (c.sl == 0.40) series[{c.q, c.p_per_q, c.var_sl, c.nl}].push_back(r.bias_mean());
  }
  CHECK(series.size() == 24);
  for (const auto& [key, values] : series) {
    REQUIRE(values.size() == 7);
    for (std::size_t i = 1; i < 6; ++i) CHECK(values[i] >= values[i - 1] - 1e-12);
    // With five indicators per factor the curve flattens and turns down
    // slightly between .50 and .60, also without non-salient loadings.
    CHECK(values[6] >= values[5] - 0.005);
    CHECK(values[6] > values[1]);
  }
}

TEST_CASE("preserving predictors keep the grid mean correlation exactly") {
  const SummaryTable total = aggregate_by(full_grid(), GroupKey::Total);
  CHECK(std::abs(total.find("total", "Cor_c").mean - 0.30) < 1e-12);
  CHECK(std::abs(total.find("total", "Cor_c2").mean - 0.30) < 1e-12);
  CHECK(total.find("total", "P_r").n_conditions == 672);
}

TEST_CASE("grouping") {
  const SummaryTable by_sl = aggregate_by(full_grid(), GroupKey::SalientLoading);
  CHECK(by_sl.rows.size() == 4 * kPopulationMetrics.size());
  CHECK(by_sl.rows.front().group == "sl=0.40");
  CHECK(by_sl.find("sl=0.70", "P_r").n_conditions == 168);
  // Means increase with the salient loading.
  CHECK(by_sl.find("sl=0.40", "P_r").mean < by_sl.find("sl=0.70", "P_r").mean);
  CHECK(by_sl.find("sl=0.40", "Cor_r").mean > by_sl.find("sl=0.70", "Cor_r").mean);

  const SummaryTable by_q = aggregate_by(full_grid(), GroupKey::Factors);
  CHECK(by_q.find("q=9", "P_r").n_conditions == 224);
  CHECK_THROWS_AS(by_q.find("q=4", "P_r"), Error);

  CHECK_THROWS_AS(aggregate_by(std::span<const PopulationRecord>{}, GroupKey::Total), Error);
  CHECK(parse_group_key("p/q") == GroupKey::PerFactor);
  CHECK_THROWS_AS(parse_group_key("colour"), Error);

  const SummaryTable table = population_summary(full_grid());
  CHECK(table.rows.size() == 5 * kPopulationMetrics.size());
  CHECK(table.rows.back().group == "total");
}

TEST_CASE("figure data") {
  const auto rows = figure_data(full_grid());
  CHECK(rows.size() == 224);
  for (const auto& r : rows) {
    CHECK(std::abs(r.phi_cor - r.phi_pop) < 1e-10);
    CHECK(r.rho_reg >= r.rho_cor - 1e-12);
  }
  const auto& first_orth = *std::find_if(rows.begin(), rows.end(), [](const PopulationFigureRow& r) {
    return r.sl == 0.70 && r.phi_pop == 0.0 && !r.nl && !r.var_sl && r.p_per_q == 5;
  });
  CHECK(std::abs(first_orth.phi_reg) < 1e-12);
  CHECK(std::abs(first_orth.rho_reg - first_orth.rho_cor) < 1e-12);

  const std::string csv = figure_csv(rows);
  CHECK(csv.rfind("sl,var_sl,p_per_q,nl,phi_pop,rho_reg,phi_reg,rho_cor,phi_cor\n", 0) == 0);
}

TEST_CASE("evaluation does not depend on the thread count") {
  const auto grid = enumerate_population_grid();
  const std::vector<std::string> f = {"q=6"};
  const auto subset = filter_conditions(grid, ConditionFilter::parse(f));
  const auto serial = run_population(subset, 1);
  const auto parallel = run_population(subset, 4);
  CHECK(population_records_csv(serial) == population_records_csv(parallel));
  CHECK(summary_csv(population_summary(serial)) == summary_csv(population_summary(parallel)));
}

TEST_CASE("summary CSV layout") {
  const std::string csv = summary_csv(population_summary(full_grid()));
  CHECK(csv.rfind("group,metric,mean,sd,n_conditions\n", 0) == 0);
  CHECK(csv.find("\nsl=0.40,P_r,") != std::string::npos);
  CHECK(csv.find("\ntotal,Cor_c2,0.3,") != std::string::npos);
}
