#include "io.hpp"

#include <cstdio>
#include <cstdlib>
#include <system_error>

#include "fsdet/csv.hpp"
#include "fsdet/errors.hpp"

#ifndef FSDET_DATA_DIR
#define FSDET_DATA_DIR "data"
#endif

namespace fsdet::cli {

std::filesystem::path fixture_dir(const std::string& name) {
  const char* env = std::getenv("FSDET_DATA_DIR");
  const std::filesystem::path root = (env && *env) ? env : FSDET_DATA_DIR;
  const auto dir = root / name;
  if (!std::filesystem::is_directory(dir)) fail(ErrorKind::Io, "unknown fixture '" + name + "' (looked in " + dir.string() + ")");
  return dir;
}

SymmetricMatrix read_symmetric(const std::filesystem::path& path, Index expected_order, const std::string& what) {
  const Matrix m = read_matrix_csv(path);
  if (m.rows() != m.cols()) fail(ErrorKind::DimensionMismatch, what + " must be square");
  if (expected_order >= 0 && m.rows() != expected_order) {
    fail(ErrorKind::DimensionMismatch, what + " has order " + std::to_string(m.rows()) + ", expected " +
                                           std::to_string(expected_order));
  }
  return SymmetricMatrix(m, 1e-6);
}

LoadedModel load_model(const ModelPaths& paths) {
  ModelPaths p = paths;
  if (!p.fixture.empty()) {
    const auto dir = fixture_dir(p.fixture);
    if (p.loadings.empty()) p.loadings = (dir / "loadings.csv").string();
    if (p.phi.empty()) p.phi = (dir / "phi.csv").string();
    if (p.sigma.empty() && std::filesystem::exists(dir / "sigma.csv")) p.sigma = (dir / "sigma.csv").string();
  }
  if (p.loadings.empty()) fail(ErrorKind::InvalidArgument, "a loadings file (or --fixture) is required");

  const Matrix loadings = read_matrix_csv(p.loadings);
  const SymmetricMatrix phi =
      p.phi.empty() ? SymmetricMatrix::identity(loadings.cols()) : read_symmetric(p.phi, loadings.cols(), "phi");
  LoadedModel out{FactorModel::from_loadings(loadings, phi), std::nullopt};
  if (!p.sigma.empty()) out.sigma = read_symmetric(p.sigma, loadings.rows(), "sigma");
  return out;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    fail(ErrorKind::Io, "cannot create output directory '" + dir.string() + "'");
  }
}

std::string format_matrix(const Matrix& m) {
  std::string out;
  char buf[32];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%8.3f", m(i, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace fsdet::cli
