#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "fsdet/factor_model.hpp"

namespace fsdet::cli {

struct ModelPaths {
  std::string loadings;
  std::string phi;
  std::string sigma;
  std::string fixture;
};

struct LoadedModel {
  FactorModel model;
  std::optional<SymmetricMatrix> sigma;
};

/// Loadings plus optional phi (identity if absent); unique loadings are
/// completed from the loadings. A fixture name resolves to bundled files.
LoadedModel load_model(const ModelPaths& paths);

SymmetricMatrix read_symmetric(const std::filesystem::path& path, Index expected_order, const std::string& what);

/// Directory of a bundled fixture; FSDET_DATA_DIR in the environment
/// overrides the build-time location.
std::filesystem::path fixture_dir(const std::string& name);

void ensure_directory(const std::filesystem::path& dir);

/// Rows of %8.3f values.
std::string format_matrix(const Matrix& m);

}  // namespace fsdet::cli
