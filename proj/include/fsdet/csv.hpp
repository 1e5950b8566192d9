#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fsdet/linalg.hpp"

namespace fsdet {

/// Parses a comma-separated numeric table. A first line containing any field
/// that is not a number is taken as a header and skipped. Blank lines are
/// ignored. Parse errors name the source, row and column (1-based).
Matrix parse_matrix_csv(std::string_view text, const std::string& source = "<input>");
Matrix read_matrix_csv(const std::filesystem::path& path);

/// %.12g
std::string format_number(double v);

/// One line per row, no header unless `header` is non-empty.
std::string matrix_to_csv(const Matrix& m, const std::vector<std::string>& header = {});

/// Writes to a sibling temporary file and renames it over `path`, so the
/// final path never holds partial output.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace fsdet
