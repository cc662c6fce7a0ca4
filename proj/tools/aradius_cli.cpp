// Command-line front end: eval, certify, adjoint, search.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "aradius/error.hpp"
#include "aradius/harness.hpp"
#include "aradius/io.hpp"
#include "aradius/radii.hpp"
#include "aradius/space.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace aradius;

namespace {

constexpr int kExitParse = 1;
constexpr int kExitMath = 2;
constexpr int kExitParam = 3;
constexpr int kExitIO = 4;
constexpr int kExitViolations = 5;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return kExitParse;
    case ErrorKind::NotHermitian:
    case ErrorKind::NonFinite:
    case ErrorKind::NotPSD:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::NotABounded:
    case ErrorKind::ZeroWeight: return kExitMath;
    case ErrorKind::InvalidParams:
    case ErrorKind::UnsupportedEnsemble:
    case ErrorKind::UnknownCheck: return kExitParam;
    case ErrorKind::IOError: return kExitIO;
  }
  return kExitMath;
}

json vector_json(std::span<const Complex> v) {
  json out = json::array();
  for (const auto& z : v) out.push_back(json::array({z.real(), z.imag()}));
  return out;
}

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    }
    rows.push_back(row);
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

json flags_json(const OpFlags& f) {
  return json{{"a_bounded", f.a_bounded},         {"in_B_A", f.in_B_A},
              {"a_selfadjoint", f.a_selfadjoint}, {"a_positive", f.a_positive},
              {"a_isometry", f.a_isometry},       {"a_unitary", f.a_unitary}};
}

std::vector<Ensemble> parse_ensembles(const std::vector<std::string>& names) {
  std::vector<Ensemble> out;
  for (const auto& name : names) {
    auto e = parse_ensemble(name);
    if (!e) throw Error(ErrorKind::UnsupportedEnsemble, "unknown ensemble '" + name + "'");
    out.push_back(*e);
  }
  return out;
}

void check_range(std::size_t lo, std::size_t hi, const char* what) {
  if (lo > hi) throw Error(ErrorKind::InvalidParams, std::string(what) + ": min exceeds max");
}

struct EvalArgs {
  std::string space;
  std::vector<std::string> ops;
  std::string quantity;
  std::optional<double> alpha;
  std::optional<double> beta;
  double rank_tol = kDefaultRankTol;
  std::size_t budget = 32;
};

int run_eval(const EvalArgs& a) {
  static const std::vector<std::string> kQuantities = {
      "op_seminorm", "numrad", "joint_norm", "euclid_radius", "crawford", "min_modulus",
      "alpha_beta"};
  if (std::find(kQuantities.begin(), kQuantities.end(), a.quantity) == kQuantities.end()) {
    throw Error(ErrorKind::InvalidParams, "unknown quantity '" + a.quantity + "'");
  }
  const bool ab = a.quantity == "alpha_beta";
  if (ab != (a.alpha.has_value() && a.beta.has_value()) || (!ab && (a.alpha || a.beta))) {
    throw Error(ErrorKind::InvalidParams, "--alpha and --beta are required iff quantity = alpha_beta");
  }
  const CMatrix weight = read_matrix_file(a.space);
  std::vector<CMatrix> mats;
  for (const auto& p : a.ops) mats.push_back(read_matrix_file(p));
  if (mats.empty()) throw Error(ErrorKind::InvalidParams, "at least one --op is required");
  const SpaceA space = build_space(weight, a.rank_tol);
  for (std::size_t k = 0; k < mats.size(); ++k) {
    if (mats[k].rows() != space.dim() || mats[k].cols() != space.dim()) {
      throw Error(ErrorKind::DimensionMismatch,
                  a.ops[k] + ": expected " + std::to_string(space.dim()) + "x" +
                      std::to_string(space.dim()));
    }
  }
  const bool single = a.quantity == "op_seminorm" || a.quantity == "numrad";
  if (single && mats.size() != 1) {
    throw Error(ErrorKind::InvalidParams, a.quantity + " takes exactly one --op");
  }
  RadiiConfig cfg;
  cfg.opt.starts = a.budget;
  const OpTuple t(mats);
  Estimate est;
  if (a.quantity == "op_seminorm") est = a_op_seminorm(space, mats[0], cfg);
  else if (a.quantity == "numrad") est = a_numrad(space, mats[0], cfg);
  else if (a.quantity == "joint_norm") est = joint_op_norm(space, t, cfg);
  else if (a.quantity == "euclid_radius") est = euclid_radius(space, t, cfg);
  else if (a.quantity == "crawford") est = joint_crawford(space, t, cfg);
  else if (a.quantity == "min_modulus") est = joint_min_modulus(space, t, cfg);
  else est = alpha_beta_seminorm(space, t, {*a.alpha, *a.beta}, cfg);

  json flags = json::array();
  for (const auto& m : mats) flags.push_back(flags_json(classify(space, m)));
  const TuplePredicates tp = tuple_predicates(space, t);
  json doc{{"quantity", a.quantity},
           {"value", est.value},
           {"method", to_string(est.method)},
           {"direction", to_string(est.bound)},
           {"residual", est.residual},
           {"certificate", vector_json(est.certificate)},
           {"a_unit_vector",
            est.certificate.empty() ? json::array() : vector_json(space.pull_back(est.certificate))},
           {"rank", space.rank()},
           {"op_flags", flags},
           {"tuple", {{"commuting", tp.commuting}, {"a_normal", tp.a_normal}}}};
  if (ab) doc["params"] = {{"alpha", *a.alpha}, {"beta", *a.beta}};
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int run_adjoint(const std::string& space_file, const std::string& op_file, double rank_tol) {
  const CMatrix weight = read_matrix_file(space_file);
  const CMatrix t = read_matrix_file(op_file);
  const SpaceA space = build_space(weight, rank_tol);
  if (t.rows() != space.dim() || t.cols() != space.dim()) {
    throw Error(ErrorKind::DimensionMismatch, op_file + ": expected " +
                                                  std::to_string(space.dim()) + "x" +
                                                  std::to_string(space.dim()));
  }
  const json doc{{"a_adjoint", matrix_json(a_adjoint(space, t))},
                 {"reduced", matrix_json(reduce_op(space, t))},
                 {"flags", flags_json(classify(space, t))}};
  std::cout << doc.dump(2) << "\n";
  return 0;
}

struct SuiteArgs {
  std::size_t dim_min = 2, dim_max = 6, n_min = 1, n_max = 3;
  std::size_t samples = 200;
  std::uint64_t seed = 42;
  double rank_tol = kDefaultRankTol;
  double slack_scale = 1.0;
  std::size_t budget = 32;
  std::vector<std::string> checks;
  std::vector<std::string> ensembles;
  std::string out = "certify-out";
  bool keep_all = false;
};

int run_certify(const SuiteArgs& a) {
  check_range(a.dim_min, a.dim_max, "dimension");
  check_range(a.n_min, a.n_max, "tuple length");
  if (a.dim_max > 64) throw Error(ErrorKind::InvalidParams, "--dim-max must be <= 64");
  SuiteConfig cfg;
  cfg.dim_min = a.dim_min;
  cfg.dim_max = a.dim_max;
  cfg.n_min = a.n_min;
  cfg.n_max = a.n_max;
  cfg.samples = a.samples;
  cfg.seed = a.seed;
  cfg.rank_tol = a.rank_tol;
  cfg.harness.slack_scale = a.slack_scale;
  cfg.harness.radii.opt.starts = a.budget;
  cfg.checks = a.checks;
  for (const auto& id : cfg.checks) {
    if (!find_check(id)) throw Error(ErrorKind::UnknownCheck, "unknown check '" + id + "'");
  }
  cfg.ensembles = parse_ensembles(a.ensembles);
  cfg.keep_all_results = a.keep_all;

  const Report report = run_suite(cfg);
  const fs::path dir(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IOError, "cannot create " + dir.string() + ": " + ec.message());
  const std::string table = summary_table(report);
  write_file_atomic(dir / "report.json", report_json(report));
  write_file_atomic(dir / "summary.txt", table);
  std::cout << table;
  for (const auto& r : report.candidates) {
    std::cout << "candidate " << r.check_id << " " << to_string(r.ensemble) << " seed " << r.seed
              << " lhs " << r.lhs << " rhs " << r.rhs << (r.note.empty() ? "" : " (" + r.note + ")")
              << "\n";
  }
  return report.total_candidates() == 0 ? 0 : kExitViolations;
}

struct SearchArgs {
  std::string check;
  std::size_t dim_min = 2, dim_max = 4, n_min = 1, n_max = 3;
  std::size_t trials = 60;
  std::size_t climb = 60;
  std::uint64_t seed = 42;
  std::size_t budget = 32;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::vector<std::string> ensembles;
  std::string out = "search-out";
};

int run_search(const SearchArgs& a) {
  if (!find_check(a.check)) throw Error(ErrorKind::UnknownCheck, "unknown check '" + a.check + "'");
  check_range(a.dim_min, a.dim_max, "dimension");
  check_range(a.n_min, a.n_max, "tuple length");
  if (a.alpha.has_value() != a.beta.has_value()) {
    throw Error(ErrorKind::InvalidParams, "--alpha and --beta go together");
  }
  SearchConfig cfg;
  cfg.dim_min = a.dim_min;
  cfg.dim_max = a.dim_max;
  cfg.n_min = a.n_min;
  cfg.n_max = a.n_max;
  cfg.random_trials = a.trials;
  cfg.climb_steps = a.climb;
  cfg.seed = a.seed;
  cfg.harness.radii.opt.starts = a.budget;
  cfg.ensembles = parse_ensembles(a.ensembles);
  if (a.alpha) cfg.params = SeminormParams{*a.alpha, *a.beta};

  const SearchResult best = tightness_search(a.check, cfg);
  const fs::path dir(a.out);
  const InstanceFiles files = write_instance(best.instance, dir);
  json t_files = json::array();
  for (const auto& p : files.t) t_files.push_back(p.filename().string());
  json s_files = json::array();
  for (const auto& p : files.s) s_files.push_back(p.filename().string());
  const json doc{{"check_id", a.check},
                 {"ratio", best.result.ratio},
                 {"evaluated", best.evaluated},
                 {"result", json::parse(check_result_json(best.result))},
                 {"files",
                  {{"space", files.space.filename().string()},
                   {"t", t_files},
                   {"s", s_files},
                   {"u", files.u.empty() ? "" : files.u.filename().string()}}}};
  write_file_atomic(dir / "search.json", doc.dump(2) + "\n");
  std::printf("%s ratio %.17g (%s, dim %zu, n %zu, alpha %g, beta %g) -> %s\n", a.check.c_str(),
              best.result.ratio, to_string(best.result.ensemble), best.result.dim, best.result.n,
              best.result.params.alpha, best.result.params.beta, dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"A-Euclidean operator radius toolkit"};
  app.require_subcommand(1);

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Evaluate a radius or seminorm");
  eval->add_option("--space", ev.space, "Weight matrix A (MatrixFile)")->required();
  eval->add_option("--op", ev.ops, "Operator T_k (repeatable, ordered)")->required();
  eval->add_option("--quantity", ev.quantity,
                   "op_seminorm | numrad | joint_norm | euclid_radius | crawford | "
                   "min_modulus | alpha_beta")
      ->required();
  eval->add_option("--alpha", ev.alpha, "alpha >= 0 (alpha_beta only)");
  eval->add_option("--beta", ev.beta, "beta >= 0 (alpha_beta only)");
  eval->add_option("--rank-tol", ev.rank_tol, "Relative rank tolerance for A");
  eval->add_option("--budget", ev.budget, "Random optimizer starts");

  std::string adj_space, adj_op;
  double adj_tol = kDefaultRankTol;
  auto* adjoint = app.add_subcommand("adjoint", "Print T^#A, reduce(T) and operator flags");
  adjoint->add_option("--space", adj_space, "Weight matrix A")->required();
  adjoint->add_option("--op", adj_op, "Operator T")->required();
  adjoint->add_option("--rank-tol", adj_tol, "Relative rank tolerance for A");

  SuiteArgs su;
  auto* certify = app.add_subcommand("certify", "Run the inequality suite");
  certify->add_option("--dim-min", su.dim_min)->check(CLI::Range(2, 64));
  certify->add_option("--dim-max", su.dim_max)->check(CLI::Range(2, 64));
  certify->add_option("--n-min", su.n_min)->check(CLI::Range(1, 4));
  certify->add_option("--n-max", su.n_max)->check(CLI::Range(1, 4));
  certify->add_option("--samples", su.samples, "Samples per (check, ensemble)")
      ->check(CLI::PositiveNumber);
  certify->add_option("--seed", su.seed);
  certify->add_option("--rank-tol", su.rank_tol);
  certify->add_option("--slack-scale", su.slack_scale)->check(CLI::PositiveNumber);
  certify->add_option("--budget", su.budget, "Random optimizer starts");
  certify->add_option("--check", su.checks, "Restrict to check ids (repeatable)");
  certify->add_option("--ensemble", su.ensembles, "Restrict to ensembles (repeatable)");
  certify->add_option("--out", su.out, "Output directory for report.json and summary.txt");
  certify->add_flag("--keep-all", su.keep_all, "Store every CheckResult in the report");

  SearchArgs se;
  auto* search = app.add_subcommand("search", "Maximise lhs/rhs of one check");
  search->add_option("--check", se.check)->required();
  search->add_option("--dim-min", se.dim_min)->check(CLI::Range(2, 64));
  search->add_option("--dim-max", se.dim_max)->check(CLI::Range(2, 64));
  search->add_option("--n-min", se.n_min)->check(CLI::Range(1, 4));
  search->add_option("--n-max", se.n_max)->check(CLI::Range(1, 4));
  search->add_option("--trials", se.trials, "Random instances before climbing");
  search->add_option("--climb", se.climb, "Hill-climbing steps");
  search->add_option("--seed", se.seed);
  search->add_option("--budget", se.budget, "Random optimizer starts");
  search->add_option("--alpha", se.alpha);
  search->add_option("--beta", se.beta);
  search->add_option("--ensemble", se.ensembles, "Restrict to ensembles (repeatable)");
  search->add_option("--out", se.out, "Output directory for the instance dump");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParam;
  }

  try {
    if (*eval) return run_eval(ev);
    if (*adjoint) return run_adjoint(adj_space, adj_op, adj_tol);
    if (*certify) return run_certify(su);
    if (*search) return run_search(se);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMath;
  }
  return 0;
}
