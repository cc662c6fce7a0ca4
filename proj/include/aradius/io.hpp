#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "aradius/harness.hpp"
#include "aradius/matrix.hpp"

namespace aradius {

/// Parses a MatrixFile document {"rows": r, "cols": c, "data": [[[re, im], ...], ...]}.
/// `source` prefixes error messages. Throws ParseError naming the offending
/// position (data[i][j]) or byte offset.
CMatrix parse_matrix(std::string_view text, std::string_view source = "<input>");

/// Reads and parses a MatrixFile. Throws IOError / ParseError.
CMatrix read_matrix_file(const std::filesystem::path& path);

/// MatrixFile text with every number printed as %.17g, so parsing gives back
/// bit-identical doubles.
std::string format_matrix(const CMatrix& m);

/// Writes `content` to a sibling temporary file and renames it over `path`.
/// Throws IOError; on failure no partial file is left at `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Files written by `write_instance` inside a directory.
struct InstanceFiles {
  std::filesystem::path space;
  std::vector<std::filesystem::path> t;
  std::vector<std::filesystem::path> s;
  std::filesystem::path u;
};

/// Dumps A, T_k, S_k and U as MatrixFiles (A.json, T_1.json, ..., S_1.json, ...,
/// U.json) into `dir`, creating it when needed.
InstanceFiles write_instance(const Instance& inst, const std::filesystem::path& dir);

/// Structured report: sorted keys, CheckResult fields mirrored one to one.
std::string report_json(const Report& report);

/// Fixed-width table with check_id, samples, passes, candidates and max ratio.
std::string summary_table(const Report& report);

/// CheckResult as a JSON object string (same field set as in report_json).
std::string check_result_json(const CheckResult& r);

}  // namespace aradius
