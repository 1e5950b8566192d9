#include "fsdet/popsim.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <tuple>

#include "fsdet/csv.hpp"
#include "fsdet/errors.hpp"
#include "fsdet/parallel.hpp"

namespace fsdet {

namespace {

double vector_mean(const Vector& v) { return compensated_sum({v.data(), static_cast<std::size_t>(v.size())}) / v.size(); }

double list_mean(const std::vector<double>& v) { return v.empty() ? 0.0 : compensated_sum(v) / v.size(); }

std::vector<double> upper_triangle(const Matrix& m) {
  std::vector<double> out;
  for (Index j = 1; j < m.cols(); ++j) {
    for (Index i = 0; i < j; ++i) out.push_back(m(i, j));
  }
  return out;
}

void append_values(std::vector<double>& out, const Vector& v) { out.insert(out.end(), v.data(), v.data() + v.size()); }

void append_values(std::vector<double>& out, const std::vector<double>& v) { out.insert(out.end(), v.begin(), v.end()); }

void pool_metric(const PopulationRecord& r, std::size_t metric, std::vector<double>& out) {
  switch (metric) {
    case 0: case 1: case 2:
      append_values(out, r.determinacy[metric]);
      break;
    case 3: case 4: case 5:
      append_values(out, r.offdiag_cor[metric - 3]);
      break;
    case 6:
      append_values(out, r.bias);
      break;
    case 7:
      append_values(out, r.loss[index_of(PredictorKind::McDonald)]);
      break;
    default:
      append_values(out, r.loss[index_of(PredictorKind::CorrelationPreserving)]);
      break;
  }
}

}  // namespace

double PopulationRecord::mean_determinacy(PredictorKind kind) const { return vector_mean(determinacy[index_of(kind)]); }

double PopulationRecord::mean_intercorrelation(PredictorKind kind) const { return list_mean(offdiag_cor[index_of(kind)]); }

double PopulationRecord::bias_mean() const { return list_mean(bias); }

double PopulationRecord::loss_mean(PredictorKind kind) const { return vector_mean(loss[index_of(kind)]); }

PopulationRecord evaluate_condition(const LoadingCondition& cond) {
  const FactorModel model = build_loading_pattern(cond);
  const TradeoffReport report = diagnose(model);

  PopulationRecord rec;
  rec.condition = cond;
  const PredictorReport* reports[] = {&report.regression, &report.mcdonald, &report.cp};
  for (const PredictorKind kind : kAllPredictors) {
    const PredictorReport& pr = *reports[index_of(kind)];
    rec.determinacy[index_of(kind)] = pr.determinacy;
    rec.offdiag_cor[index_of(kind)] = upper_triangle(pr.intercorrelations.matrix());
    rec.loss[index_of(kind)] = pr.loss;
  }
  rec.bias = upper_triangle(report.regression.bias);
  return rec;
}

std::vector<PopulationRecord> run_population(std::span<const LoadingCondition> conditions, unsigned threads) {
  std::vector<PopulationRecord> out(conditions.size());
  parallel_for(conditions.size(), threads, [&](std::size_t i) { out[i] = evaluate_condition(conditions[i]); });
  return out;
}

GroupKey parse_group_key(std::string_view t) {
  if (t == "total") return GroupKey::Total;
  if (t == "sl") return GroupKey::SalientLoading;
  if (t == "q") return GroupKey::Factors;
  if (t == "phi") return GroupKey::Phi;
  if (t == "p_per_q" || t == "p/q") return GroupKey::PerFactor;
  if (t == "var_sl") return GroupKey::VarSl;
  if (t == "nl") return GroupKey::Nl;
  if (t == "n") return GroupKey::SampleSize;
  fail(ErrorKind::InvalidArgument, "unknown grouping key '" + std::string(t) + "'");
}

const char* to_string(GroupKey key) {
  switch (key) {
    case GroupKey::Total: return "total";
    case GroupKey::SalientLoading: return "sl";
    case GroupKey::Factors: return "q";
    case GroupKey::Phi: return "phi";
    case GroupKey::PerFactor: return "p/q";
    case GroupKey::VarSl: return "var_sl";
    case GroupKey::Nl: return "nl";
    case GroupKey::SampleSize: return "n";
  }
  return "?";
}

double group_value(GroupKey key, const LoadingCondition& c, int n) {
  switch (key) {
    case GroupKey::Total: return 0.0;
    case GroupKey::SalientLoading: return c.sl;
    case GroupKey::Factors: return c.q;
    case GroupKey::Phi: return c.phi;
    case GroupKey::PerFactor: return c.p_per_q;
    case GroupKey::VarSl: return c.var_sl ? 1.0 : 0.0;
    case GroupKey::Nl: return c.nl ? 1.0 : 0.0;
    case GroupKey::SampleSize: return n;
  }
  return 0.0;
}

std::string group_label(GroupKey key, const LoadingCondition& c, int n) {
  if (key == GroupKey::Total) return "total";
  char buf[48];
  if (key == GroupKey::SalientLoading || key == GroupKey::Phi) {
    std::snprintf(buf, sizeof buf, "%s=%.2f", to_string(key), group_value(key, c, n));
  } else {
    std::snprintf(buf, sizeof buf, "%s=%d", to_string(key), static_cast<int>(group_value(key, c, n)));
  }
  return buf;
}

const SummaryRow& SummaryTable::find(std::string_view group, std::string_view metric) const {
  for (const auto& r : rows) {
    if (r.group == group && r.metric == metric) return r;
  }
  fail(ErrorKind::EmptyGroup, "no summary row for group '" + std::string(group) + "', metric '" + std::string(metric) + "'");
}

void SummaryTable::append(const SummaryTable& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }

SummaryTable aggregate_by(std::span<const PopulationRecord> records, GroupKey key) {
  if (records.empty()) fail(ErrorKind::EmptyGroup, "no records to aggregate");
  std::map<double, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) groups[group_value(key, records[i].condition)].push_back(i);

  SummaryTable table;
  std::vector<double> pooled;
  for (const auto& [value, members] : groups) {
    const std::string label = group_label(key, records[members.front()].condition);
    for (std::size_t m = 0; m < kPopulationMetrics.size(); ++m) {
      pooled.clear();
      for (const std::size_t i : members) pool_metric(records[i], m, pooled);
      const Summary s = summarize(pooled);
      table.rows.push_back({label, kPopulationMetrics[m], s.mean, s.sd, members.size(), s.n});
    }
  }
  return table;
}

SummaryTable population_summary(std::span<const PopulationRecord> records) {
  SummaryTable t = aggregate_by(records, GroupKey::SalientLoading);
  t.append(aggregate_by(records, GroupKey::Total));
  return t;
}

std::vector<PopulationFigureRow> figure_data(std::span<const PopulationRecord> records) {
  std::vector<PopulationFigureRow> rows;
  for (const auto& r : records) {
    const auto& c = r.condition;
    if (c.q != 3) continue;
    rows.push_back({c.sl, c.var_sl, c.p_per_q, c.nl, c.phi, r.mean_determinacy(PredictorKind::Regression),
                    r.mean_intercorrelation(PredictorKind::Regression), r.mean_determinacy(PredictorKind::McDonald),
                    r.mean_intercorrelation(PredictorKind::McDonald)});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const PopulationFigureRow& a, const PopulationFigureRow& b) {
    return std::tie(a.sl, a.var_sl, a.p_per_q, a.nl, a.phi_pop) < std::tie(b.sl, b.var_sl, b.p_per_q, b.nl, b.phi_pop);
  });
  return rows;
}

std::string summary_csv(const SummaryTable& table) {
  std::string out = "group,metric,mean,sd,n_conditions\n";
  for (const auto& r : table.rows) {
    out += r.group + ',' + r.metric + ',' + format_number(r.mean) + ',' + format_number(r.sd) + ',' +
           std::to_string(r.n_conditions) + '\n';
  }
  return out;
}

std::string figure_csv(std::span<const PopulationFigureRow> rows) {
  std::string out = "sl,var_sl,p_per_q,nl,phi_pop,rho_reg,phi_reg,rho_cor,phi_cor\n";
  for (const auto& r : rows) {
    out += format_number(r.sl) + ',' + (r.var_sl ? "1" : "0") + ',' + std::to_string(r.p_per_q) + ',' +
           (r.nl ? "1" : "0") + ',' + format_number(r.phi_pop) + ',' + format_number(r.rho_reg) + ',' +
           format_number(r.phi_reg) + ',' + format_number(r.rho_cor) + ',' + format_number(r.phi_cor) + '\n';
  }
  return out;
}

std::string population_records_csv(std::span<const PopulationRecord> records) {
  std::string out = "q,sl,phi_pop,p_per_q,var_sl,nl,P_r,P_c,P_c2,Cor_r,Cor_c,Cor_c2,bias_mean,loss_c,loss_c2\n";
  for (const auto& r : records) {
    const auto& c = r.condition;
    out += std::to_string(c.q) + ',' + format_number(c.sl) + ',' + format_number(c.phi) + ',' +
           std::to_string(c.p_per_q) + ',' + (c.var_sl ? "1" : "0") + ',' + (c.nl ? "1" : "0");
    for (const PredictorKind k : kAllPredictors) out += ',' + format_number(r.mean_determinacy(k));
    for (const PredictorKind k : kAllPredictors) out += ',' + format_number(r.mean_intercorrelation(k));
    out += ',' + format_number(r.bias_mean()) + ',' + format_number(r.loss_mean(PredictorKind::McDonald)) + ',' +
           format_number(r.loss_mean(PredictorKind::CorrelationPreserving)) + '\n';
  }
  return out;
}

}  // namespace fsdet
