#include "aradius/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "json.hpp"

#include "aradius/error.hpp"

namespace aradius {
namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(std::string_view source, const std::string& what) {
  throw Error(ErrorKind::ParseError, std::string(source) + ": " + what);
}

std::size_t read_count(const json& doc, const char* key, std::string_view source) {
  auto it = doc.find(key);
  if (it == doc.end()) parse_fail(source, std::string("missing \"") + key + "\"");
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0)) {
    parse_fail(source, std::string("\"") + key + "\" must be a non-negative integer");
  }
  return it->get<std::size_t>();
}

std::string position(std::size_t i, std::size_t j) {
  return "data[" + std::to_string(i) + "][" + std::to_string(j) + "]";
}

std::string fmt17(double v) {
  // "-0" would come back as the integer 0.
  if (v == 0.0 && std::signbit(v)) return "-0.0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json estimate_bound(Bound b) { return to_string(b); }

json params_json(const SeminormParams& p) { return json{{"alpha", p.alpha}, {"beta", p.beta}}; }

json result_json(const CheckResult& r) {
  return json{{"check_id", r.check_id},
              {"lhs", r.lhs},
              {"rhs", r.rhs},
              {"slack_used", r.slack_used},
              {"verdict", to_string(r.verdict)},
              {"lhs_direction", estimate_bound(r.lhs_direction)},
              {"rhs_direction", estimate_bound(r.rhs_direction)},
              {"instance_digest", r.instance_digest},
              {"seed", r.seed},
              {"ensemble", to_string(r.ensemble)},
              {"dim", r.dim},
              {"n", r.n},
              {"params", params_json(r.params)},
              {"ratio", r.ratio},
              {"escalated", r.escalated},
              {"note", r.note}};
}

json config_json(const SuiteConfig& c) {
  json ens = json::array();
  for (Ensemble e : c.ensembles) ens.push_back(to_string(e));
  json grid = json::array();
  for (const auto& p : c.harness.inf_grid) grid.push_back(params_json(p));
  const RadiiConfig& rc = c.harness.radii;
  return json{{"dim_min", c.dim_min},
              {"dim_max", c.dim_max},
              {"n_min", c.n_min},
              {"n_max", c.n_max},
              {"samples", c.samples},
              {"seed", c.seed},
              {"rank_tol", c.rank_tol},
              {"slack_scale", c.harness.slack_scale},
              {"escalation_factor", c.harness.escalation_factor},
              {"brute_force_samples", c.harness.brute_force_samples},
              {"optimizer",
               {{"starts", rc.opt.starts},
                {"seeded_starts", rc.seeded_starts},
                {"max_iter", rc.opt.max_iter},
                {"grad_tol", rc.opt.grad_tol},
                {"seed", rc.opt.seed}}},
              {"inf_grid", grid},
              {"ensembles", ens},
              {"checks", c.checks},
              {"keep_all_results", c.keep_all_results}};
}

}  // namespace

CMatrix parse_matrix(std::string_view text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    parse_fail(source, "malformed JSON at byte " + std::to_string(e.byte));
  }
  if (!doc.is_object()) parse_fail(source, "top level must be an object");
  const std::size_t rows = read_count(doc, "rows", source);
  const std::size_t cols = read_count(doc, "cols", source);
  auto data = doc.find("data");
  if (data == doc.end()) parse_fail(source, "missing \"data\"");
  if (!data->is_array()) parse_fail(source, "\"data\" must be an array");
  if (data->size() != rows) {
    parse_fail(source, "\"data\" has " + std::to_string(data->size()) + " rows, expected " +
                           std::to_string(rows));
  }
  CMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = (*data)[i];
    if (!row.is_array() || row.size() != cols) {
      parse_fail(source, "data[" + std::to_string(i) + "] must be an array of " +
                             std::to_string(cols) + " entries");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      const json& z = row[j];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
        parse_fail(source, position(i, j) + " must be a [re, im] pair of numbers");
      }
      const double re = z[0].get<double>();
      const double im = z[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im)) {
        parse_fail(source, position(i, j) + " is not finite");
      }
      m(i, j) = Complex{re, im};
    }
  }
  return m;
}

CMatrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IOError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::IOError, "cannot read " + path.string());
  return parse_matrix(buf.str(), path.string());
}

std::string format_matrix(const CMatrix& m) {
  std::string out = "{\"rows\": " + std::to_string(m.rows()) +
                    ", \"cols\": " + std::to_string(m.cols()) + ", \"data\": [";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out += i == 0 ? "\n  [" : ",\n  [";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ", ";
      out += "[" + fmt17(m(i, j).real()) + ", " + fmt17(m(i, j).imag()) + "]";
    }
    out += "]";
  }
  out += m.rows() == 0 ? "]}\n" : "\n]}\n";
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IOError, "cannot create " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorKind::IOError, "cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    std::filesystem::remove(tmp, ignore);
    throw Error(ErrorKind::IOError, "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

InstanceFiles write_instance(const Instance& inst, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IOError, "cannot create " + dir.string() + ": " + ec.message());
  InstanceFiles files;
  files.space = dir / "A.json";
  write_file_atomic(files.space, format_matrix(inst.space.weight()));
  for (std::size_t k = 0; k < inst.t.size(); ++k) {
    files.t.push_back(dir / ("T_" + std::to_string(k + 1) + ".json"));
    write_file_atomic(files.t.back(), format_matrix(inst.t[k]));
  }
  for (std::size_t k = 0; k < inst.s.size(); ++k) {
    files.s.push_back(dir / ("S_" + std::to_string(k + 1) + ".json"));
    write_file_atomic(files.s.back(), format_matrix(inst.s[k]));
  }
  if (!inst.u.empty()) {
    files.u = dir / "U.json";
    write_file_atomic(files.u, format_matrix(inst.u));
  }
  return files;
}

std::string check_result_json(const CheckResult& r) { return result_json(r).dump(2) + "\n"; }

std::string report_json(const Report& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    json q = json::object();
    static const char* kNames[] = {"min", "p50", "p90", "p99", "max"};
    for (std::size_t i = 0; i < c.ratio_quantiles.size() && i < 5; ++i) {
      q[kNames[i]] = c.ratio_quantiles[i];
    }
    checks.push_back(json{{"check_id", c.check_id},
                          {"samples", c.samples},
                          {"passes", c.passes},
                          {"candidates", c.candidates},
                          {"skipped", c.skipped},
                          {"escalations", c.escalations},
                          {"max_slack_consumed", c.max_slack_consumed},
                          {"ratio_quantiles", q},
                          {"tightest", c.tightest ? result_json(*c.tightest) : json(nullptr)}});
  }
  json candidates = json::array();
  for (const auto& r : report.candidates) candidates.push_back(result_json(r));
  json results = json::array();
  for (const auto& r : report.results) results.push_back(result_json(r));
  const json doc{{"config", config_json(report.config)},
                 {"instances", report.instances},
                 {"total_candidates", report.total_candidates()},
                 {"checks", checks},
                 {"candidates", candidates},
                 {"results", results}};
  return doc.dump(2) + "\n";
}

std::string summary_table(const Report& report) {
  std::ostringstream out;
  out << std::left << std::setw(22) << "check_id" << std::right << std::setw(9) << "samples"
      << std::setw(9) << "passes" << std::setw(12) << "candidates" << std::setw(14)
      << "max_ratio" << "\n";
  out << std::string(66, '-') << "\n";
  for (const auto& c : report.checks) {
    const double max_ratio = c.ratio_quantiles.empty() ? 0.0 : c.ratio_quantiles.back();
    out << std::left << std::setw(22) << c.check_id << std::right << std::setw(9) << c.samples
        << std::setw(9) << c.passes << std::setw(12) << c.candidates << std::setw(14)
        << std::fixed << std::setprecision(6) << max_ratio << "\n";
  }
  out << std::string(66, '-') << "\n";
  out << "instances " << report.instances << ", violation candidates "
      << report.total_candidates() << "\n";
  return out.str();
}

}  // namespace aradius
