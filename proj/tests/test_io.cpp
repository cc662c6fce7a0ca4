#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "aradius/error.hpp"
#include "aradius/io.hpp"
#include "support.hpp"

using namespace aradius;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "aradius-tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ErrorKind kind_of(std::string_view text) {
  try {
    parse_matrix(text, "t.json");
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::NotHermitian;
}

std::string message_of(std::string_view text) {
  try {
    parse_matrix(text, "t.json");
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

bool bit_identical(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::memcmp(a.entries().data(), b.entries().data(), a.entries().size() * sizeof(Complex)) == 0;
}

}  // namespace

TEST_CASE("parse_matrix reads the documented schema") {
  const CMatrix m = parse_matrix(R"({"rows": 2, "cols": 1, "data": [[[1, 2]], [[-0.5, 0]]]})");
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 1);
  CHECK(m(0, 0) == Complex{1, 2});
  CHECK(m(1, 0) == Complex{-0.5, 0});
}

TEST_CASE("parse_matrix reports offending positions") {
  CHECK(kind_of("{\"rows\": 1") == ErrorKind::ParseError);
  CHECK(message_of("{\"rows\": 1").find("byte") != std::string::npos);
  CHECK(kind_of(R"({"cols": 1, "data": []})") == ErrorKind::ParseError);
  CHECK(message_of(R"({"rows": 2, "cols": 1, "data": [[[1, 0]]]})").find("rows") != std::string::npos);
  CHECK(message_of(R"({"rows": 1, "cols": 2, "data": [[[1, 0], [1]]]})").find("data[0][1]") !=
        std::string::npos);
  CHECK(message_of(R"({"rows": 2, "cols": 2, "data": [[[1, 0], [0, 0]], [[0, 0], ["x", 0]]]})")
            .find("data[1][1]") != std::string::npos);
  CHECK(message_of(R"({"rows": 1, "cols": 2, "data": [[[1, 0]]]})").find("data[0]") != std::string::npos);
  CHECK(kind_of(R"({"rows": -1, "cols": 2, "data": []})") == ErrorKind::ParseError);
  CHECK(kind_of("[1, 2]") == ErrorKind::ParseError);
}

TEST_CASE("format_matrix round-trips bit for bit") {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 10; ++rep) {
    CMatrix m = testing::gaussian(3, 4, rng);
    m(0, 0) = Complex{1.0 / 3.0, -std::ldexp(1.0, -1070)};
    m(1, 1) = Complex{1e300, -0.0};
    CHECK(bit_identical(parse_matrix(format_matrix(m)), m));
  }
  const CMatrix empty(0, 0);
  CHECK(parse_matrix(format_matrix(empty)).rows() == 0);
}

TEST_CASE("write_file_atomic replaces the target and leaves no temp file") {
  const fs::path dir = scratch("atomic");
  const fs::path p = dir / "out.txt";
  write_file_atomic(p, "first");
  write_file_atomic(p, "second");
  std::ifstream in(p);
  std::string s;
  std::getline(in, s);
  CHECK(s == "second");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  try {
    write_file_atomic(dir / "missing" / "x.txt", "y");
    FAIL("expected IOError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IOError);
  }
  CHECK_THROWS_AS(read_matrix_file(dir / "nope.json"), Error);
}

TEST_CASE("write_instance dumps reusable matrix files") {
  const fs::path dir = scratch("instance");
  const Instance in = gen_instance(Ensemble::singularA, 3, 2, 5);
  const InstanceFiles f = write_instance(in, dir / "dump");
  CHECK(bit_identical(read_matrix_file(f.space), in.space.weight()));
  REQUIRE(f.t.size() == 2);
  CHECK(bit_identical(read_matrix_file(f.t[1]), in.t[1]));
  CHECK(bit_identical(read_matrix_file(f.s[0]), in.s[0]));
  CHECK(bit_identical(read_matrix_file(f.u), in.u));
  const Instance back = make_instance(read_matrix_file(f.space), {read_matrix_file(f.t[0]), read_matrix_file(f.t[1])},
                                      {read_matrix_file(f.s[0]), read_matrix_file(f.s[1])},
                                      read_matrix_file(f.u), in.params, in.ensemble, in.seed);
  CHECK(back.digest() == in.digest());
}

TEST_CASE("report_json mirrors CheckResult fields") {
  SuiteConfig cfg;
  cfg.samples = 1;
  cfg.dim_max = 3;
  cfg.checks = {"INEQ-Z1"};
  cfg.keep_all_results = true;
  const Report r = run_suite(cfg);
  const std::string text = report_json(r);
  CHECK(text == report_json(run_suite(cfg)));
  const auto doc = nlohmann::json::parse(text);
  CHECK(doc["total_candidates"] == 0);
  REQUIRE(doc["results"].size() > 0);
  const auto& res = doc["results"][0];
  for (const char* key : {"check_id", "lhs", "rhs", "slack_used", "verdict", "lhs_direction",
                          "rhs_direction", "instance_digest", "seed", "ensemble", "dim", "n",
                          "params", "ratio", "escalated", "note"}) {
    CHECK_MESSAGE(res.contains(key), key);
  }
  CHECK(doc["checks"][0]["check_id"] == "INEQ-Z1");
  const std::string table = summary_table(r);
  CHECK(table.find("INEQ-Z1") != std::string::npos);
  CHECK(table.find("max_ratio") != std::string::npos);
}
