#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <new>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fsdet/cli.hpp"
#include "fsdet/csv.hpp"
#include "fsdet/grid.hpp"
#include "fsdet/kernels.hpp"
#include "fsdet/parallel.hpp"
#include "fsdet/popsim.hpp"
#include "fsdet/predictors.hpp"
#include "fsdet/samplesim.hpp"
#include "fsdet/version.hpp"
#include "io.hpp"
#include "json.hpp"

namespace fsdet::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  ModelPaths model;
  std::string data;
  std::string scores;
  std::string out;
  std::vector<std::string> kinds;
  std::vector<std::string> filters;
  bool standardize = false;
  bool mcdonald = false;
  std::uint64_t seed = 1;
  int replicates = 1000;
  unsigned threads = 0;
  int paf_max_iter = 1000;
  double paf_eps = 1e-6;
};

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%8.3f", v);
  return buf;
}

int cmd_predict(const Options& o, std::ostream& out) {
  if (o.data.empty()) fail(ErrorKind::InvalidArgument, "--data is required");
  const LoadedModel lm = load_model(o.model);
  Matrix data = read_matrix_csv(o.data);
  if (data.cols() != lm.model.variables()) {
    fail(ErrorKind::DimensionMismatch, "data has " + std::to_string(data.cols()) + " columns but the model has " +
                                           std::to_string(lm.model.variables()) + " variables");
  }
  if (o.standardize) data = standardize_columns(data);
  const SymmetricMatrix sigma = lm.sigma ? *lm.sigma : implied_covariance(lm.model);

  std::vector<PredictorKind> kinds;
  for (const auto& k : o.kinds) kinds.push_back(parse_predictor_kind(k));
  if (kinds.empty()) kinds.assign(kAllPredictors.begin(), kAllPredictors.end());

  std::vector<std::pair<fs::path, std::string>> files;
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  for (const PredictorKind kind : kinds) {
    const Matrix scores = apply_weights(data, compute_weights(kind, lm.model, sigma));
    files.emplace_back(dir / (std::string("scores_") + to_string(kind) + ".csv"), matrix_to_csv(scores));
  }
  ensure_directory(dir);
  for (const auto& [path, text] : files) {
    write_file_atomic(path, text);
    out << "wrote " << path.string() << " (" << data.rows() << " x " << lm.model.factors() << ")\n";
  }
  return 0;
}

int cmd_transform(const Options& o, std::ostream& out) {
  if (o.scores.empty()) fail(ErrorKind::InvalidArgument, "--scores is required");
  ModelPaths mp = o.model;
  if (mp.phi.empty() && !mp.fixture.empty()) mp.phi = (fixture_dir(mp.fixture) / "phi.csv").string();
  if (mp.phi.empty()) fail(ErrorKind::InvalidArgument, "--phi is required");
  const Matrix scores = read_matrix_csv(o.scores);
  const SymmetricMatrix phi = read_symmetric(mp.phi, scores.cols(), "phi");
  const std::string text = matrix_to_csv(transform_scores(scores, phi));
  if (o.out.empty() || o.out == "-") {
    out << text;
  } else {
    write_file_atomic(o.out, text);
    out << "wrote " << o.out << " (" << scores.rows() << " x " << scores.cols() << ")\n";
  }
  return 0;
}

void add_report_rows(std::string& csv, const PredictorReport& r) {
  const std::string name = to_string(r.kind);
  const Index q = r.determinacy.size();
  for (Index i = 0; i < q; ++i) {
    csv += "determinacy," + name + ',' + std::to_string(i + 1) + ",," + format_number(r.determinacy(i)) + '\n';
  }
  for (Index i = 0; i < q; ++i) csv += "loss," + name + ',' + std::to_string(i + 1) + ",," + format_number(r.loss(i)) + '\n';
  for (Index i = 0; i < q; ++i) {
    for (Index j = 0; j < q; ++j) {
      csv += "intercorrelation," + name + ',' + std::to_string(i + 1) + ',' + std::to_string(j + 1) + ',' +
             format_number(r.intercorrelations(i, j)) + '\n';
    }
  }
  for (Index i = 0; i < q; ++i) {
    for (Index j = 0; j < q; ++j) {
      csv += "bias," + name + ',' + std::to_string(i + 1) + ',' + std::to_string(j + 1) + ',' + format_number(r.bias(i, j)) +
             '\n';
    }
  }
}

int cmd_diagnose(const Options& o, std::ostream& out) {
  ModelPaths mp = o.model;
  if (mp.loadings.empty() && mp.fixture.empty()) fail(ErrorKind::InvalidArgument, "--loadings or --fixture is required");
  const LoadedModel lm = load_model(mp);
  const SymmetricMatrix sigma = lm.sigma ? *lm.sigma : implied_covariance(lm.model);
  const TradeoffReport rep = diagnose(lm.model, sigma);
  const Index q = lm.model.factors();

  out << "Determinacies:\n" << std::string(8, ' ') << "    xi_r   xi_c2" << (o.mcdonald ? "    xi_c" : "") << '\n';
  for (Index i = 0; i < q; ++i) {
    char label[32];
    std::snprintf(label, sizeof label, "F%-7lld", static_cast<long long>(i + 1));
    out << label << fmt3(rep.regression.determinacy(i)) << fmt3(rep.cp.determinacy(i));
    if (o.mcdonald) out << fmt3(rep.mcdonald.determinacy(i));
    out << '\n';
  }
  out << "\nInter-correlations of xi_r:\n" << format_matrix(rep.regression.intercorrelations.matrix());
  out << "\nInter-correlations of xi_c2:\n" << format_matrix(rep.cp.intercorrelations.matrix());
  if (o.mcdonald) out << "\nInter-correlations of xi_c:\n" << format_matrix(rep.mcdonald.intercorrelations.matrix());
  out << "\nFactor inter-correlations:\n" << format_matrix(lm.model.phi().matrix());
  out << "\nBias and loss:\n";
  out << "  mean off-diagonal bias of xi_r        " << fmt3(rep.mean_bias()) << '\n';
  out << "  mean determinacy loss of xi_c2        " << fmt3(rep.mean_loss_cp()) << '\n';
  if (o.mcdonald) out << "  mean determinacy loss of xi_c         " << fmt3(rep.mean_loss_mcdonald()) << '\n';

  if (!o.out.empty()) {
    std::string csv = "section,predictor,row,col,value\n";
    add_report_rows(csv, rep.regression);
    add_report_rows(csv, rep.cp);
    if (o.mcdonald) add_report_rows(csv, rep.mcdonald);
    csv += "summary,regression,,," + format_number(rep.mean_bias()) + '\n';
    csv += "summary," + std::string(to_string(PredictorKind::CorrelationPreserving)) + ",,," +
           format_number(rep.mean_loss_cp()) + '\n';
    if (o.mcdonald) csv += "summary,mcdonald,,," + format_number(rep.mean_loss_mcdonald()) + '\n';
    const fs::path dir(o.out);
    ensure_directory(dir);
    write_file_atomic(dir / "diagnose.csv", csv);
  }
  return 0;
}

void print_summary(std::ostream& out, const SummaryTable& t) {
  static const char* shown[] = {"P_r", "P_c", "P_c2", "Cor_r", "Cor_c", "Cor_c2"};
  out << "group       ";
  for (const char* m : shown) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%16s", m);
    out << buf;
  }
  out << '\n';
  std::vector<std::string> groups;
  for (const auto& r : t.rows) {
    if (std::find(groups.begin(), groups.end(), r.group) == groups.end()) groups.push_back(r.group);
  }
  for (const auto& g : groups) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%-12s", g.c_str());
    out << buf;
    for (const char* m : shown) {
      const SummaryRow& r = t.find(g, m);
      std::snprintf(buf, sizeof buf, "  %6.3f (%5.3f)", r.mean, r.sd);
      out << buf;
    }
    out << '\n';
  }
}

SummaryTable all_groups(auto&& aggregate, std::initializer_list<GroupKey> keys) {
  SummaryTable t;
  for (const GroupKey k : keys) t.append(aggregate(k));
  return t;
}

int cmd_popsim(const Options& o, std::ostream& out) {
  const auto grid = enumerate_population_grid();
  const auto conditions = filter_conditions(grid, ConditionFilter::parse(o.filters));
  if (conditions.empty()) fail(ErrorKind::EmptyGroup, "the filter selects no conditions");
  const auto records = run_population(conditions, o.threads);

  const SummaryTable summary =
      all_groups([&](GroupKey k) { return aggregate_by(records, k); },
                 {GroupKey::SalientLoading, GroupKey::Total, GroupKey::Factors, GroupKey::Phi, GroupKey::PerFactor,
                  GroupKey::VarSl, GroupKey::Nl});
  const fs::path dir = o.out.empty() ? fs::path("popsim") : fs::path(o.out);
  ensure_directory(dir);
  write_file_atomic(dir / "records.csv", population_records_csv(records));
  write_file_atomic(dir / "summary.csv", summary_csv(summary));
  write_file_atomic(dir / "figures.csv", figure_csv(figure_data(records)));

  out << records.size() << " conditions evaluated\n\n";
  print_summary(out, population_summary(records));
  out << "\nwrote records.csv, summary.csv, figures.csv to " << dir.string() << '\n';
  return 0;
}

int cmd_samplesim(const Options& o, std::ostream& out) {
  const auto grid = enumerate_sample_grid();
  const auto conditions = filter_conditions(grid, ConditionFilter::parse(o.filters));
  if (conditions.empty()) fail(ErrorKind::EmptyGroup, "the filter selects no conditions");
  SampleSimConfig cfg;
  cfg.replicates = o.replicates;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.paf_max_iter = o.paf_max_iter;
  cfg.paf_eps = o.paf_eps;
  const auto aggregates = run_sample_grid(conditions, cfg);

  const SummaryTable summary =
      all_groups([&](GroupKey k) { return aggregate_samples(aggregates, k); },
                 {GroupKey::SalientLoading, GroupKey::Total, GroupKey::Factors, GroupKey::SampleSize, GroupKey::Phi,
                  GroupKey::VarSl, GroupKey::Nl});

  long heywood = 0, nonconverged = 0, numerical = 0;
  for (const auto& a : aggregates) {
    heywood += a.heywood;
    nonconverged += a.nonconverged;
    numerical += a.numerical;
  }
  nlohmann::ordered_json manifest;
  manifest["tool"] = "fsdet";
  manifest["version"] = kVersion;
  manifest["seed"] = cfg.seed;
  manifest["replicates"] = cfg.replicates;
  manifest["threads"] = resolve_threads(cfg.threads);
  manifest["filter"] = o.filters;
  manifest["conditions"] = conditions.size();
  std::vector<std::string> labels;
  for (const auto& c : conditions) labels.push_back(c.label());
  manifest["grid"] = labels;
  manifest["rng"] = "mt19937_64 per replicate, seeded by replicate_seed(seed, fnv1a(condition label), replicate); "
                    "53-bit uniforms; Box-Muller";
  manifest["paf"] = {{"start", "squared multiple correlations"}, {"max_iter", cfg.paf_max_iter}, {"eps", cfg.paf_eps},
                     {"communality_ceiling", 1.0 - 1e-6}};
  manifest["rotation"] = "oblique least-squares target, unit-diagonal phi, congruence alignment";
  manifest["observed_covariance"] = "sample correlation matrix";
  manifest["kernels"] = kernels::name(kernels::active().isa);
  manifest["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION);
  manifest["excluded"] = {{"heywood", heywood}, {"nonconverged", nonconverged}, {"numerical", numerical}};
  manifest["outputs"] = {"summary.csv", "conditions.csv", "figures.csv"};

  const fs::path dir = o.out.empty() ? fs::path("samplesim") : fs::path(o.out);
  ensure_directory(dir);
  write_file_atomic(dir / "summary.csv", sample_summary_csv(summary));
  write_file_atomic(dir / "conditions.csv", sample_conditions_csv(aggregates));
  write_file_atomic(dir / "figures.csv", sample_figure_csv(figure_data_samples(aggregates)));
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + '\n');

  out << conditions.size() << " conditions x " << cfg.replicates << " replicates; excluded: " << heywood
      << " heywood, " << nonconverged << " nonconverged, " << numerical << " numerical\n\n";
  print_summary(out, sample_summary(aggregates));
  out << "\nwrote summary.csv, conditions.csv, figures.csv, manifest.json to " << dir.string() << '\n';
  return 0;
}

void add_model_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--loadings", o.model.loadings, "Loadings CSV (p x q)");
  cmd->add_option("--phi", o.model.phi, "Factor correlation CSV (q x q); identity if omitted");
  cmd->add_option("--sigma", o.model.sigma, "Observed covariance CSV (p x p); model-implied if omitted");
  cmd->add_option("--fixture", o.model.fixture, "Bundled model, e.g. 'appendix'");
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch:
    case ErrorKind::Parse:
    case ErrorKind::InvalidArgument:
    case ErrorKind::TooFewRows:
    case ErrorKind::DomainError:
    case ErrorKind::HeywoodCase:
    case ErrorKind::EmptyGroup:
      return 2;
    case ErrorKind::Io:
      return 4;
    default:
      return 3;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Factor score predictors: determinacy, inter-correlation bias and simulation studies", "fsdet"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* predict = app.add_subcommand("predict", "Compute factor score predictors for a data matrix");
  add_model_options(predict, o);
  predict->add_option("--data", o.data, "Data CSV (n x p)");
  predict->add_option("--kind", o.kinds, "regression, mcdonald or cp-from-regression (default: all)");
  predict->add_flag("--standardize", o.standardize, "Center and scale data columns first");
  predict->add_option("--out", o.out, "Output directory");

  auto* transform = app.add_subcommand("transform", "Map scores to scores whose correlations equal phi");
  transform->add_option("--scores", o.scores, "Score CSV (n x q)");
  transform->add_option("--phi", o.model.phi, "Factor correlation CSV (q x q)");
  transform->add_option("--fixture", o.model.fixture, "Take phi from a bundled model");
  transform->add_option("--out", o.out, "Output CSV ('-' for stdout)");

  auto* diag = app.add_subcommand("diagnose", "Report determinacy and inter-correlations of the predictors");
  add_model_options(diag, o);
  diag->add_flag("--mcdonald", o.mcdonald, "Include the McDonald predictor");
  diag->add_option("--out", o.out, "Directory for diagnose.csv");

  auto* pop = app.add_subcommand("popsim", "Exact evaluation of the population design");
  pop->add_option("--filter", o.filters, "Restrict the grid, key=value (q, sl, phi, p_per_q, var_sl, nl)");
  pop->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  pop->add_option("--out", o.out, "Output directory");

  auto* samp = app.add_subcommand("samplesim", "Monte Carlo sample study");
  samp->add_option("--seed", o.seed, "Master seed");
  samp->add_option("--replicates", o.replicates, "Replicates per condition")->check(CLI::PositiveNumber);
  samp->add_option("--filter", o.filters, "Restrict the grid, key=value (q, sl, phi, var_sl, nl, n)");
  samp->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  samp->add_option("--paf-max-iter", o.paf_max_iter, "Principal-axis iteration limit")->check(CLI::PositiveNumber);
  samp->add_option("--paf-eps", o.paf_eps, "Principal-axis convergence threshold")->check(CLI::PositiveNumber);
  samp->add_option("--out", o.out, "Output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (predict->parsed()) return cmd_predict(o, out);
    if (transform->parsed()) return cmd_transform(o, out);
    if (diag->parsed()) return cmd_diagnose(o, out);
    if (pop->parsed()) return cmd_popsim(o, out);
    return cmd_samplesim(o, out);
  } catch (const Error& e) {
    err << "fsdet: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "fsdet: Io: " << e.what() << '\n';
    return 4;
  } catch (const std::bad_alloc&) {
    err << "fsdet: out of memory\n";
    return 3;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace fsdet::cli
