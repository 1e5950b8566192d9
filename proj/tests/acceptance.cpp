// One PASS/FAIL line per acceptance criterion, followed by indented details.
// FSDET_ACCEPT_FULL=1 runs the sample study at 1000 replicates with the tight
// tolerance; FSDET_ACCEPT_STRICT=1 turns any FAIL into a non-zero exit.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fsdet/cli.hpp"
#include "fsdet/csv.hpp"
#include "fsdet/grid.hpp"
#include "fsdet/parallel.hpp"
#include "fsdet/popsim.hpp"
#include "fsdet/predictors.hpp"
#include "fsdet/samplesim.hpp"

using namespace fsdet;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool env_flag(const char* name) {
  const char* v = std::getenv(name);
  return v != nullptr && std::string(v) == "1";
}

struct Criterion {
  int id;
  std::string title;
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const char* fmt, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    notes.push_back(std::string(ok ? "  ok    " : "  MISS  ") + buf);
    pass = pass && ok;
  }
  void info(const char* fmt, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    notes.push_back(std::string("        ") + buf);
  }
};

std::vector<Criterion> results;

void run_criterion(int id, const std::string& title, const std::function<void(Criterion&)>& body) {
  Criterion c{id, title};
  const auto t0 = Clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.check(false, "exception: %s", e.what());
  }
  c.info("elapsed %.2f s", seconds_since(t0));
  std::printf("%s %d: %s\n", c.pass ? "PASS" : "FAIL", c.id, c.title.c_str());
  for (const auto& n : c.notes) std::printf("%s\n", n.c_str());
  std::fflush(stdout);
  results.push_back(std::move(c));
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "fsdet-accept-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

int cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

// Determinacy rows of diagnose.csv: predictor -> values by factor.
std::vector<double> csv_determinacies(const std::string& csv, const std::string& predictor) {
  std::vector<double> v;
  std::istringstream in(csv);
  std::string line;
  const std::string prefix = "determinacy," + predictor + ',';
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) != 0) continue;
    v.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  }
  return v;
}

struct Cell {
  const char* group;
  const char* metric;
  double mean;
  double sd;
};

void compare_cells(Criterion& c, const SummaryTable& table, const std::vector<Cell>& cells, double mean_tol,
                   double sd_tol) {
  for (const Cell& cell : cells) {
    const SummaryRow& row = table.find(cell.group, cell.metric);
    const bool ok = std::abs(row.mean - cell.mean) <= mean_tol + 1e-12 && std::abs(row.sd - cell.sd) <= sd_tol + 1e-12;
    c.check(ok, "%-8s %-7s %.4f (%.4f)  table %.2f (%.2f)", cell.group, cell.metric, row.mean, row.sd, cell.mean,
            cell.sd);
  }
}

FactorModel random_model(std::mt19937_64& gen, Index p, Index q) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix l = Matrix::Zero(p, q);
  for (Index i = 0; i < p; ++i) {
    l(i, i % q) = 0.35 + 0.45 * u(gen);
    for (Index k = 0; k < q; ++k) {
      if (k != i % q) l(i, k) = 0.2 * (u(gen) - 0.5);
    }
  }
  Matrix w(q, 2);
  for (Index i = 0; i < q; ++i) {
    w(i, 0) = 0.8 * u(gen);
    w(i, 1) = 0.6 * (u(gen) - 0.5);
  }
  const SymmetricMatrix phi = cov_to_corr(SymmetricMatrix::symmetrized(w * w.transpose() + Matrix::Identity(q, q)));
  Vector h = (l * phi.matrix()).cwiseProduct(l).rowwise().sum();
  for (Index i = 0; i < p; ++i) {
    if (h(i) > 0.85) l.row(i) *= std::sqrt(0.85 / h(i));
  }
  return FactorModel::from_loadings(l, phi);
}

// n x p data whose sample covariance is exactly sigma.
Matrix exact_data(std::mt19937_64& gen, const SymmetricMatrix& sigma, Index n) {
  std::normal_distribution<double> z;
  const Index p = sigma.order();
  Matrix raw(n, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) raw(i, j) = z(gen);
  }
  const Matrix centered = raw.rowwise() - raw.colwise().mean();
  const SymmetricMatrix cov = sample_covariance(centered);
  return centered * sym_inv_sqrt(cov).matrix() * sym_sqrt(sigma).matrix();
}

void empirical_fixture(Criterion& c) {
  TempDir dir;
  const auto t0 = Clock::now();
  const int code = cli_run({"diagnose", "--fixture", "appendix", "--mcdonald", "--out", dir.path.string()});
  const double elapsed = seconds_since(t0);
  c.check(code == 0, "diagnose exit code %d", code);
  const std::string csv = read_file(dir.path / "diagnose.csv");
  struct Expect {
    PredictorKind kind;
    double values[3];
  };
  // The McDonald value for the third factor is printed as .91, the transform value as .92.
  for (const Expect& e : {Expect{PredictorKind::Regression, {.85, .89, .92}},
                          Expect{PredictorKind::McDonald, {.84, .88, .91}},
                          Expect{PredictorKind::CorrelationPreserving, {.84, .88, .92}}}) {
    const char* name = to_string(e.kind);
    const auto got = csv_determinacies(csv, name);
    c.check(got.size() == 3, "%s: %zu determinacies", name, got.size());
    for (std::size_t i = 0; i < std::min<std::size_t>(3, got.size()); ++i) {
      c.check(std::abs(got[i] - e.values[i]) <= 0.005, "%-18s F%zu %.4f  table %.2f", name, i + 1, got[i],
              e.values[i]);
    }
  }
  c.check(elapsed < 1.0, "runtime %.3f s < 1 s", elapsed);
}

void empirical_tradeoff(Criterion& c) {
  const auto t0 = Clock::now();
  const Matrix l = read_matrix_csv(fs::path(FSDET_DATA_DIR) / "appendix" / "loadings.csv");
  const SymmetricMatrix phi(read_matrix_csv(fs::path(FSDET_DATA_DIR) / "appendix" / "phi.csv"));
  const SymmetricMatrix sigma(read_matrix_csv(fs::path(FSDET_DATA_DIR) / "appendix" / "sigma.csv"));
  const TradeoffReport r = diagnose(FactorModel::from_loadings(l, phi), sigma);
  const double elapsed = seconds_since(t0);
  const double gain = -r.mean_loss_cp();
  c.check(std::abs(r.mean_bias() - 0.10) <= 0.02, "mean Cor(xi_r) - phi = %.4f, expected .10 +- .02", r.mean_bias());
  c.check(std::abs(gain - 0.01) <= 0.005, "mean determinacy gain over xi_c2 = %.4f, expected .01 +- .005", gain);
  c.check(elapsed < 1.0, "runtime %.3f s < 1 s", elapsed);
}

const std::vector<PopulationRecord>& population_records() {
  static const std::vector<PopulationRecord> records = [] {
    const auto grid = enumerate_population_grid();
    return run_population(grid);
  }();
  return records;
}

void population_table(Criterion& c) {
  const auto t0 = Clock::now();
  const auto grid = enumerate_population_grid();
  const auto records = run_population(grid);
  const SummaryTable table = population_summary(records);
  const double elapsed = seconds_since(t0);
  c.check(records.size() == 672, "%zu conditions", records.size());

  std::vector<Cell> cells;
  const char* groups[] = {"sl=0.40", "sl=0.50", "sl=0.60", "sl=0.70", "total"};
  const double pr[][2] = {{.80, .05}, {.86, .04}, {.91, .03}, {.94, .02}, {.88, .07}};
  const double pc[][2] = {{.79, .05}, {.86, .04}, {.90, .03}, {.94, .02}, {.87, .07}};
  const double cr[][2] = {{.41, .27}, {.38, .25}, {.36, .24}, {.34, .22}, {.37, .24}};
  for (int g = 0; g < 5; ++g) {
    cells.push_back({groups[g], "P_r", pr[g][0], pr[g][1]});
    cells.push_back({groups[g], "P_c", pc[g][0], pc[g][1]});
    cells.push_back({groups[g], "P_c2", pc[g][0], pc[g][1]});
    cells.push_back({groups[g], "Cor_r", cr[g][0], cr[g][1]});
    cells.push_back({groups[g], "Cor_c", .30, .20});
    cells.push_back({groups[g], "Cor_c2", .30, .20});
  }
  compare_cells(c, table, cells, 0.005, 0.01);

  double worst = 0.0;
  for (const char* g : groups) {
    for (const char* m : {"Cor_c", "Cor_c2"}) worst = std::max(worst, std::abs(table.find(g, m).mean - 0.30));
  }
  c.check(worst < 1e-10, "Cor_c, Cor_c2 means equal .30: max deviation %.2e", worst);
  c.check(elapsed < 10.0, "runtime %.3f s < 10 s", elapsed);
}

void factor_count_effect(Criterion& c) {
  const auto& records = population_records();
  const SummaryTable table = aggregate_by(records, GroupKey::Factors);
  for (const auto& [group, want] : {std::pair{"q=3", .87}, std::pair{"q=6", .88}, std::pair{"q=9", .88}}) {
    const double got = table.find(group, "P_r").mean;
    c.check(std::abs(got - want) <= 0.005, "%s mean P_r %.4f, expected %.2f +- .005", group, got, want);
  }
}

void preserving_identity(Criterion& c) {
  const auto& records = population_records();
  double worst = 0.0;
  for (const auto& r : records) {
    worst = std::max(worst, max_abs_diff(r.determinacy[index_of(PredictorKind::McDonald)],
                                         r.determinacy[index_of(PredictorKind::CorrelationPreserving)]));
  }
  c.check(worst < 1e-8, "max |P_c - P_c2| over %zu conditions = %.2e", records.size(), worst);
}

void sample_table(Criterion& c) {
  const bool full = env_flag("FSDET_ACCEPT_FULL");
  SampleSimConfig cfg;
  cfg.replicates = full ? 1000 : 200;
  cfg.seed = 20240601;
  const double mean_tol = full ? 0.02 : 0.03;
  c.info("%d replicates per condition, means +- %.2f, SDs +- .03", cfg.replicates, mean_tol);

  const auto t0 = Clock::now();
  const auto grid = enumerate_sample_grid();
  const auto aggregates = run_sample_grid(grid, cfg);
  const SummaryTable table = sample_summary(aggregates);
  const double elapsed = seconds_since(t0);

  int excluded = 0;
  for (const auto& a : aggregates) excluded += a.excluded();
  c.info("%zu conditions, %d replicates excluded", aggregates.size(), excluded);

  std::vector<Cell> cells;
  const char* groups[] = {"sl=0.40", "sl=0.50", "sl=0.60", "total"};
  const double pr[][2] = {{.69, .10}, {.81, .03}, {.88, .01}, {.79, .10}};
  const double pc[][2] = {{.68, .10}, {.80, .03}, {.87, .01}, {.79, .10}};
  const double cr[][2] = {{.27, .23}, {.31, .24}, {.31, .24}, {.30, .24}};
  const double cc[][2] = {{.18, .16}, {.23, .18}, {.25, .19}, {.22, .18}};
  for (int g = 0; g < 4; ++g) {
    cells.push_back({groups[g], "P_r", pr[g][0], pr[g][1]});
    cells.push_back({groups[g], "P_c", pc[g][0], pc[g][1]});
    cells.push_back({groups[g], "P_c2", pc[g][0], pc[g][1]});
    cells.push_back({groups[g], "Cor_r", cr[g][0], cr[g][1]});
    cells.push_back({groups[g], "Cor_c", cc[g][0], cc[g][1]});
    cells.push_back({groups[g], "Cor_c2", cc[g][0], cc[g][1]});
  }
  compare_cells(c, table, cells, mean_tol, 0.03);
  const double budget = full ? 90 * 60.0 : 15 * 60.0;
  c.info("%u worker thread(s)", resolve_threads(0));
  c.check(elapsed < budget, "runtime %.1f s < %.0f s", elapsed, budget);
}

void property_suite(Criterion& c) {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> qd(2, 6);

  double cor_worst = 0.0, dominance_worst = 0.0, sqrt_worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Index q = qd(gen);
    const Index p = q * std::uniform_int_distribution<int>(3, 7)(gen);
    const FactorModel m = random_model(gen, p, q);
    const SymmetricMatrix sigma = implied_covariance(m);
    const TradeoffReport r = diagnose(m, sigma);
    cor_worst = std::max(cor_worst, max_abs_diff(r.mcdonald.intercorrelations.matrix(), m.phi().matrix()));
    cor_worst = std::max(cor_worst, max_abs_diff(r.cp.intercorrelations.matrix(), m.phi().matrix()));
    dominance_worst = std::max(dominance_worst, (r.mcdonald.determinacy - r.regression.determinacy).maxCoeff());
    dominance_worst = std::max(dominance_worst, (r.cp.determinacy - r.regression.determinacy).maxCoeff());

    const Matrix& s = sigma.matrix();
    const Matrix root = sym_sqrt(sigma).matrix();
    const Matrix inv_root = sym_inv_sqrt(sigma).matrix();
    const Matrix id = Matrix::Identity(p, p);
    sqrt_worst = std::max({sqrt_worst, max_abs_diff(root * root, s), max_abs_diff(inv_root * s * inv_root, id),
                           max_abs_diff(root * inv_root, id)});
  }
  c.check(cor_worst < 1e-10, "500 random models: Cor(xi_c), Cor(xi_c2) = phi, max deviation %.2e", cor_worst);
  c.check(dominance_worst <= 1e-12, "500 random models: P_r >= P_c, P_c2, max excess %.2e", dominance_worst);
  c.check(sqrt_worst < 1e-10, "500 random models: square-root identities, max deviation %.2e", sqrt_worst);

  // Transforming regression scores to phi reproduces the cp scores. On the
  // grid designs this is exact; on arbitrary models the two score sets agree
  // only up to an orthogonal rotation, which is reported but not required.
  double equiv_worst = 0.0;
  for (const auto& cond : enumerate_population_grid()) {
    const FactorModel m = build_loading_pattern(cond);
    const SymmetricMatrix sigma = implied_covariance(m);
    const Matrix x = exact_data(gen, sigma, m.variables() + 40);
    const Matrix transformed = transform_scores(apply_weights(x, regression_weights(m, sigma)), m.phi());
    const Matrix direct = standardize_columns(apply_weights(x, cp_from_regression_weights(m, sigma)));
    equiv_worst = std::max(equiv_worst, max_abs_diff(transformed, direct));
  }
  c.check(equiv_worst < 1e-8, "672 grid models: transformed regression scores = cp scores, max deviation %.2e",
          equiv_worst);
  double general = 0.0;
  for (int i = 0; i < 50; ++i) {
    const FactorModel m = random_model(gen, 12, 3);
    const SymmetricMatrix sigma = implied_covariance(m);
    const Matrix x = exact_data(gen, sigma, 60);
    const Matrix transformed = transform_scores(apply_weights(x, regression_weights(m, sigma)), m.phi());
    const Matrix direct = standardize_columns(apply_weights(x, cp_from_regression_weights(m, sigma)));
    general = std::max(general, max_abs_diff(transformed, direct));
  }
  c.info("50 random non-symmetric models: score difference up to %.3f (rotation, see README)", general);

  double recovery_worst = 0.0;
  int recovered = 0;
  const auto grid = enumerate_population_grid();
  for (std::size_t i = 0; i < grid.size(); i += 7) {
    const FactorModel m = build_loading_pattern(grid[i]);
    const SampleEstimate est = estimate_model(implied_covariance(m), m.loadings(), 100000, 1e-12);
    recovery_worst = std::max({recovery_worst, max_abs_diff(est.loadings, m.loadings()),
                               max_abs_diff(est.phi.matrix(), m.phi().matrix())});
    ++recovered;
  }
  c.check(recovery_worst < 1e-4, "%d grid models: extraction + rotation of the exact matrix, max error %.2e", recovered,
          recovery_worst);

  double closed_worst = 0.0;
  for (int p = 3; p <= 20; ++p) {
    for (int k = 3; k <= 9; ++k) {
      const double sl = k / 10.0;
      const FactorModel m = FactorModel::from_loadings(Matrix::Constant(p, 1, sl), SymmetricMatrix::identity(1));
      const double rho = determinacy(m, regression_weights(m))(0);
      const double oracle = p * sl * sl / (1.0 + (p - 1) * sl * sl);
      closed_worst = std::max(closed_worst, std::abs(rho * rho - oracle));
    }
  }
  c.check(closed_worst < 1e-12, "one-factor closed form, sl .3-.9, p 3-20: max deviation %.2e", closed_worst);
}

void thread_determinism(Criterion& c) {
  TempDir one, many;
  auto args = [](const TempDir& d, const char* threads) {
    return std::vector<std::string>{"samplesim", "--seed",    "99",      "--replicates", "20",          "--filter",
                                    "q=3",       "--filter",  "sl=0.5", "--threads",    threads,       "--out",
                                    d.path.string()};
  };
  c.check(cli_run(args(one, "1")) == 0, "run with %d thread", 1);
  c.check(cli_run(args(many, "4")) == 0, "run with %d threads", 4);
  for (const char* f : {"summary.csv", "conditions.csv", "figures.csv"}) {
    const std::string a = read_file(one.path / f);
    const std::string b = read_file(many.path / f);
    c.check(!a.empty() && a == b, "%s byte-identical (%zu bytes)", f, a.size());
  }
}

}  // namespace

int main() {
  run_criterion(1, "empirical fixture determinacies", empirical_fixture);
  run_criterion(2, "empirical bias and determinacy gain", empirical_tradeoff);
  run_criterion(3, "population grid summary", population_table);
  run_criterion(4, "number-of-factors effect on regression determinacy", factor_count_effect);
  run_criterion(5, "identical determinacy of the correlation-preserving predictors", preserving_identity);
  run_criterion(6, "sample study summary", sample_table);
  run_criterion(7, "property suite", property_suite);
  run_criterion(8, "thread-count independence of sample outputs", thread_determinism);

  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::printf("\n%zu criteria, %d passed, %d failed\n", results.size(), static_cast<int>(results.size()) - failed,
              failed);
  return env_flag("FSDET_ACCEPT_STRICT") && failed > 0 ? 1 : 0;
}
