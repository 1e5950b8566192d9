#include "fsdet/samplesim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "fsdet/csv.hpp"
#include "fsdet/errors.hpp"
#include "fsdet/kernels.hpp"
#include "fsdet/parallel.hpp"

namespace fsdet {

namespace {

constexpr double kCommunalityCeiling = 1.0 - 1e-6;
constexpr double kUniqueFloor = 1e-6;

bool is_numerical(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotPSD:
    case ErrorKind::NotPD:
    case ErrorKind::NonPositiveDiagonal:
    case ErrorKind::HeywoodCase:
    case ErrorKind::DegenerateWeights:
    case ErrorKind::RankDeficient:
    case ErrorKind::NoConvergence:
      return true;
    default:
      return false;
  }
}

Summary summarize_or_nan(std::span<const double> xs) {
  Summary s = summarize(xs);
  if (s.n == 0) s.mean = s.sd = std::numeric_limits<double>::quiet_NaN();
  return s;
}

// Greedy maximal-congruence matching of estimated columns to target columns.
void align_to_target(Matrix& loadings, Matrix& phi, const Matrix& target) {
  const Index q = loadings.cols();
  Matrix cong(q, q);
  for (Index j = 0; j < q; ++j) {
    for (Index k = 0; k < q; ++k) {
      const double denom = loadings.col(j).norm() * target.col(k).norm();
      cong(j, k) = denom > 0.0 ? loadings.col(j).dot(target.col(k)) / denom : 0.0;
    }
  }
  std::vector<Index> source(static_cast<std::size_t>(q), -1);
  std::vector<double> sign(static_cast<std::size_t>(q), 1.0);
  std::vector<bool> used_src(static_cast<std::size_t>(q), false);
  for (Index step = 0; step < q; ++step) {
    Index bj = -1, bk = -1;
    double best = -1.0;
    for (Index j = 0; j < q; ++j) {
      if (used_src[j]) continue;
      for (Index k = 0; k < q; ++k) {
        if (source[k] >= 0) continue;
        if (std::abs(cong(j, k)) > best) {
          best = std::abs(cong(j, k));
          bj = j;
          bk = k;
        }
      }
    }
    used_src[bj] = true;
    source[bk] = bj;
    sign[bk] = cong(bj, bk) < 0.0 ? -1.0 : 1.0;
  }
  Matrix l(loadings.rows(), q), f(q, q);
  for (Index k = 0; k < q; ++k) {
    l.col(k) = sign[k] * loadings.col(source[k]);
    for (Index m = 0; m < q; ++m) f(k, m) = sign[k] * sign[m] * phi(source[k], source[m]);
  }
  loadings = std::move(l);
  phi = std::move(f);
}

}  // namespace

GeneratedSample generate_sample(const FactorModel& model, int n, NormalStream& rng) {
  const Index p = model.variables();
  const Index q = model.factors();
  if (n < p + 1) fail(ErrorKind::TooFewRows, "sample size must be at least p + 1");

  Matrix z(n, q);
  rng.fill(z.data(), static_cast<std::size_t>(z.size()));
  GeneratedSample s;
  s.factors = z * sym_sqrt(model.phi()).matrix();

  s.data.resize(n, p);
  rng.fill(s.data.data(), static_cast<std::size_t>(s.data.size()));
  const auto& k = kernels::active();
  const Matrix& lambda = model.loadings();
  const Vector& psi = model.unique_loadings();
  const auto rows = static_cast<std::size_t>(n);
  for (Index j = 0; j < p; ++j) {
    double* col = s.data.col(j).data();
    k.shift_scale(col, rows, 0.0, psi(j));
    for (Index f = 0; f < q; ++f) {
      if (lambda(j, f) != 0.0) k.axpy(lambda(j, f), s.factors.col(f).data(), col, rows);
    }
  }
  return s;
}

PafResult principal_axis(const SymmetricMatrix& r, int q, int max_iter, double eps) {
  const Index p = r.order();
  if (q < 1 || q >= p) fail(ErrorKind::InvalidArgument, "principal_axis needs 1 <= q < p");
  if (max_iter < 1) fail(ErrorKind::InvalidArgument, "max_iter must be positive");

  PafResult res;
  Vector h(p);
  try {
    const SymmetricMatrix inv = invert_spd(r);
    for (Index i = 0; i < p; ++i) h(i) = 1.0 - 1.0 / inv(i, i);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotPD) throw;
    res.smc_fallback = true;
    for (Index i = 0; i < p; ++i) {
      double m = 0.0;
      for (Index j = 0; j < p; ++j) {
        if (j != i) m = std::max(m, std::abs(r(i, j)));
      }
      h(i) = m;
    }
  }
  h = h.cwiseMax(0.0).cwiseMin(kCommunalityCeiling);

  Matrix reduced = r.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  Matrix a(p, q);
  for (int it = 1; it <= max_iter; ++it) {
    reduced.diagonal() = h;
    es.compute(reduced);
    if (es.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "eigendecomposition failed in principal_axis");
    for (Index k = 0; k < q; ++k) {
      const Index idx = p - 1 - k;
      Vector v = es.eigenvectors().col(idx);
      if (v.sum() < 0.0) v = -v;
      a.col(k) = v * std::sqrt(std::max(es.eigenvalues()(idx), 0.0));
    }
    const Vector raw = a.rowwise().squaredNorm();
    res.heywood = (raw.array() > kCommunalityCeiling).any();
    const Vector next = raw.cwiseMin(kCommunalityCeiling);
    res.final_change = (next - h).cwiseAbs().maxCoeff();
    h = next;
    res.iterations = it;
    if (res.final_change < eps) {
      res.converged = true;
      break;
    }
  }
  res.loadings = a;
  res.communalities = h;
  return res;
}

RotationResult oblique_target_rotation(const Matrix& unrotated, const Matrix& target) {
  if (unrotated.rows() != target.rows() || unrotated.cols() != target.cols()) {
    fail(ErrorKind::DimensionMismatch, "loadings and target must have the same shape");
  }
  const Index q = unrotated.cols();
  const Eigen::ColPivHouseholderQR<Matrix> qr(unrotated);
  if (qr.rank() < q) fail(ErrorKind::RankDeficient, "unrotated loadings are not of full column rank");
  const Matrix t = qr.solve(target);

  SymmetricMatrix inner_inv;
  try {
    inner_inv = invert_spd(SymmetricMatrix::symmetrized(t.transpose() * t));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotPD) throw;
    fail(ErrorKind::RankDeficient, "target transform is singular");
  }
  const Vector d = inner_inv.diagonal_values().cwiseSqrt();
  const Vector d_inv = d.cwiseInverse();
  Matrix loadings = unrotated * (t * d.asDiagonal());
  Matrix phi = d_inv.asDiagonal() * inner_inv.matrix() * d_inv.asDiagonal();
  align_to_target(loadings, phi, target);
  phi.diagonal().setOnes();
  return {std::move(loadings), SymmetricMatrix::symmetrized(phi)};
}

SampleEstimate estimate_model(const SymmetricMatrix& r, const Matrix& target, int max_iter, double eps) {
  const PafResult paf = principal_axis(r, static_cast<int>(target.cols()), max_iter, eps);
  RotationResult rot = oblique_target_rotation(paf.loadings, target);
  return {std::move(rot.loadings), std::move(rot.phi), r, paf.iterations, paf.final_change, paf.converged, paf.heywood};
}

FactorModel estimated_factor_model(const SampleEstimate& est) {
  const Vector h = (est.loadings * est.phi.matrix()).cwiseProduct(est.loadings).rowwise().sum();
  const Vector psi = (Vector::Ones(h.size()) - h).cwiseMax(kUniqueFloor).cwiseSqrt();
  return FactorModel(est.loadings, est.phi, psi);
}

const char* to_string(ReplicateStatus s) {
  switch (s) {
    case ReplicateStatus::Ok: return "ok";
    case ReplicateStatus::Heywood: return "heywood";
    case ReplicateStatus::NoConvergence: return "nonconverged";
    case ReplicateStatus::Numerical: return "numerical";
  }
  return "?";
}

ReplicateResult run_replicate(const FactorModel& population, int n, NormalStream& rng, const SampleSimConfig& config) {
  ReplicateResult out;
  const GeneratedSample sample = generate_sample(population, n, rng);
  const Index q = population.factors();
  try {
    const SymmetricMatrix r = sample_correlation(sample.data);
    const SampleEstimate est = estimate_model(r, population.loadings(), config.paf_max_iter, config.paf_eps);
    out.iterations = est.iterations;
    if (!est.converged) {
      out.status = ReplicateStatus::NoConvergence;
      return out;
    }
    if (est.heywood) {
      out.status = ReplicateStatus::Heywood;
      return out;
    }
    const FactorModel model = estimated_factor_model(est);
    out.phi_hat = offdiag_mean(est.phi.matrix());

    const Matrix z = standardize_columns(sample.data);
    Matrix joint(n, 4 * q);
    for (const PredictorKind kind : kAllPredictors) {
      const std::size_t i = index_of(kind);
      const ScoreWeights w = compute_weights(kind, model, r);
      out.determinacy_model[i] = determinacy(model, w, r).mean();
      joint.middleCols(static_cast<Index>(i) * q, q) = z * w.weights;
    }
    joint.rightCols(q) = sample.factors;
    const SymmetricMatrix c = sample_correlation(joint);
    for (const PredictorKind kind : kAllPredictors) {
      const std::size_t i = index_of(kind);
      const Index off = static_cast<Index>(i) * q;
      double acc = 0.0;
      for (Index j = 0; j < q; ++j) acc += c(off + j, 3 * q + j);
      out.determinacy[i] = acc / static_cast<double>(q);
      out.intercorrelation[i] = offdiag_mean(c.matrix().block(off, off, q, q));
    }
  } catch (const Error& e) {
    if (!is_numerical(e.kind())) throw;
    out.status = ReplicateStatus::Numerical;
  }
  return out;
}

std::uint64_t condition_key(const SampleCondition& cond) { return fnv1a(cond.label()); }

double metric_value(const ReplicateResult& r, std::size_t metric) {
  if (metric < 3) return r.determinacy[metric];
  if (metric < 6) return r.intercorrelation[metric - 3];
  if (metric < 9) return r.determinacy_model[metric - 6];
  return r.phi_hat;
}

const Summary& SampleAggregate::metric(std::string_view name) const {
  for (std::size_t m = 0; m < kSampleMetrics.size(); ++m) {
    if (name == kSampleMetrics[m]) return metrics[m];
  }
  fail(ErrorKind::InvalidArgument, "unknown sample metric '" + std::string(name) + "'");
}

namespace {

SampleAggregate finish_aggregate(const SampleCondition& cond, std::span<const ReplicateResult> results) {
  SampleAggregate agg;
  agg.condition = cond;
  agg.replicates = static_cast<int>(results.size());
  for (const auto& r : results) {
    switch (r.status) {
      case ReplicateStatus::Ok: agg.kept.push_back(r); break;
      case ReplicateStatus::Heywood: ++agg.heywood; break;
      case ReplicateStatus::NoConvergence: ++agg.nonconverged; break;
      case ReplicateStatus::Numerical: ++agg.numerical; break;
    }
  }
  std::vector<double> values;
  for (std::size_t m = 0; m < kSampleMetrics.size(); ++m) {
    values.clear();
    for (const auto& r : agg.kept) values.push_back(metric_value(r, m));
    agg.metrics[m] = summarize_or_nan(values);
  }
  return agg;
}

}  // namespace

SampleAggregate run_sample_condition(const SampleCondition& cond, const SampleSimConfig& config) {
  const SampleCondition one[] = {cond};
  return std::move(run_sample_grid(one, config).front());
}

std::vector<SampleAggregate> run_sample_grid(std::span<const SampleCondition> conditions, const SampleSimConfig& config) {
  if (config.replicates < 1) fail(ErrorKind::InvalidArgument, "replicates must be at least 1");
  std::vector<FactorModel> models;
  std::vector<std::uint64_t> keys;
  models.reserve(conditions.size());
  for (const auto& c : conditions) {
    validate(c.base);
    if (c.n < c.base.p() + 1) fail(ErrorKind::InvalidArgument, "sample size must exceed the number of variables");
    models.push_back(build_loading_pattern(c.base));
    keys.push_back(condition_key(c));
  }

  const auto reps = static_cast<std::size_t>(config.replicates);
  std::vector<ReplicateResult> results(conditions.size() * reps);
  parallel_for(results.size(), config.threads, [&](std::size_t i) {
    const std::size_t c = i / reps;
    NormalStream rng(replicate_seed(config.seed, keys[c], i % reps));
    results[i] = run_replicate(models[c], conditions[c].n, rng, config);
  });

  std::vector<SampleAggregate> out;
  out.reserve(conditions.size());
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    out.push_back(finish_aggregate(conditions[c], std::span(results).subspan(c * reps, reps)));
  }
  return out;
}

SummaryTable aggregate_samples(std::span<const SampleAggregate> aggregates, GroupKey key) {
  if (aggregates.empty()) fail(ErrorKind::EmptyGroup, "no sample aggregates to summarize");
  std::map<double, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < aggregates.size(); ++i) {
    const auto& c = aggregates[i].condition;
    groups[group_value(key, c.base, c.n)].push_back(i);
  }

  SummaryTable table;
  std::vector<double> pooled;
  for (const auto& [value, members] : groups) {
    const auto& first = aggregates[members.front()].condition;
    const std::string label = group_label(key, first.base, first.n);
    std::size_t replicates = 0, excluded = 0;
    int sample_size = first.n;
    for (const std::size_t i : members) {
      replicates += static_cast<std::size_t>(aggregates[i].replicates);
      excluded += static_cast<std::size_t>(aggregates[i].excluded());
      if (aggregates[i].condition.n != sample_size) sample_size = 0;
    }
    for (std::size_t m = 0; m < kSampleMetrics.size(); ++m) {
      pooled.clear();
      for (const std::size_t i : members) {
        for (const auto& r : aggregates[i].kept) pooled.push_back(metric_value(r, m));
      }
      const Summary s = summarize_or_nan(pooled);
      table.rows.push_back({label, kSampleMetrics[m], s.mean, s.sd, members.size(), s.n, sample_size, replicates, excluded});
    }
  }
  return table;
}

SummaryTable sample_summary(std::span<const SampleAggregate> aggregates) {
  SummaryTable t = aggregate_samples(aggregates, GroupKey::SalientLoading);
  t.append(aggregate_samples(aggregates, GroupKey::Total));
  return t;
}

std::vector<SampleFigureRow> figure_data_samples(std::span<const SampleAggregate> aggregates) {
  std::vector<SampleFigureRow> rows;
  for (const auto& a : aggregates) {
    const auto& c = a.condition;
    if (c.base.q != 9) continue;
    rows.push_back({c.base.sl, c.base.phi, c.base.nl, c.n, c.base.var_sl, a.metric("P_r"), a.metric("P_c"),
                    a.metric("Cor_r"), a.metric("Cor_c"), a.replicates, a.excluded()});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SampleFigureRow& x, const SampleFigureRow& y) {
    return std::tie(x.sl, x.phi_pop, x.nl, x.n, x.var_sl) < std::tie(y.sl, y.phi_pop, y.nl, y.n, y.var_sl);
  });
  return rows;
}

std::string sample_summary_csv(const SummaryTable& table) {
  std::string out = "group,metric,mean,sd,n_conditions,n,replicates,excluded_count\n";
  for (const auto& r : table.rows) {
    out += r.group + ',' + r.metric + ',' + format_number(r.mean) + ',' + format_number(r.sd) + ',' +
           std::to_string(r.n_conditions) + ',' + (r.sample_size > 0 ? std::to_string(r.sample_size) : std::string()) +
           ',' + std::to_string(r.replicates) + ',' + std::to_string(r.excluded) + '\n';
  }
  return out;
}

std::string sample_conditions_csv(std::span<const SampleAggregate> aggregates) {
  std::string out = "q,sl,phi_pop,p_per_q,var_sl,nl,n,replicates,excluded_count,heywood_count,nonconverged_count,"
                    "numerical_count";
  for (const char* m : kSampleMetrics) out += std::string(",mean_") + m + ",sd_" + m;
  out += '\n';
  for (const auto& a : aggregates) {
    const auto& c = a.condition;
    out += std::to_string(c.base.q) + ',' + format_number(c.base.sl) + ',' + format_number(c.base.phi) + ',' +
           std::to_string(c.base.p_per_q) + ',' + (c.base.var_sl ? "1" : "0") + ',' + (c.base.nl ? "1" : "0") + ',' +
           std::to_string(c.n) + ',' + std::to_string(a.replicates) + ',' + std::to_string(a.excluded()) + ',' +
           std::to_string(a.heywood) + ',' + std::to_string(a.nonconverged) + ',' + std::to_string(a.numerical);
    for (const auto& s : a.metrics) out += ',' + format_number(s.mean) + ',' + format_number(s.sd);
    out += '\n';
  }
  return out;
}

std::string sample_figure_csv(std::span<const SampleFigureRow> rows) {
  std::string out = "sl,phi_pop,nl,n,var_sl,mean_P_r,sd_P_r,mean_P_c,sd_P_c,mean_Cor_r,sd_Cor_r,mean_Cor_c,sd_Cor_c,"
                    "replicates,excluded_count\n";
  for (const auto& r : rows) {
    out += format_number(r.sl) + ',' + format_number(r.phi_pop) + ',' + (r.nl ? "1" : "0") + ',' +
           std::to_string(r.n) + ',' + (r.var_sl ? "1" : "0");
    for (const Summary* s : {&r.p_reg, &r.p_cor, &r.cor_reg, &r.cor_cor}) {
      out += ',' + format_number(s->mean) + ',' + format_number(s->sd);
    }
    out += ',' + std::to_string(r.replicates) + ',' + std::to_string(r.excluded) + '\n';
  }
  return out;
}

}  // namespace fsdet
