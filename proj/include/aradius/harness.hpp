#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aradius/radii.hpp"
#include "aradius/space.hpp"

namespace aradius {

enum class Ensemble {
  generic,
  invertibleA,
  singularA,
  commuting,
  a_normal_commuting,
  a_isometry,
  a_unitary,
  nilpotentA2,
  random_params,
};

const char* to_string(Ensemble e);
std::optional<Ensemble> parse_ensemble(std::string_view name);
std::span<const Ensemble> all_ensembles();

/// One random test case. `t` is the main tuple, `s` a second tuple of the same
/// length (entrywise products, sums and S^#A T), `u` an A-unitary.
struct Instance {
  SpaceA space;
  OpTuple t;
  OpTuple s;
  CMatrix u;
  SeminormParams params;
  Ensemble ensemble = Ensemble::generic;
  std::uint64_t seed = 0;

  /// 16 hex digits hashing every matrix entry, the parameters and the ensemble.
  std::string digest() const;
};

/// dim in [2, 64], n in [1, 4] (`a_unitary` always has n = 1). The ensemble's
/// structural hypothesis is verified before returning. Throws
/// UnsupportedEnsemble / InvalidParams.
Instance gen_instance(Ensemble ensemble, std::size_t dim, std::size_t n, std::uint64_t seed,
                      double rank_tol = kDefaultRankTol);

/// Rebuilds an instance from explicit matrices (used to replay serialized cases).
Instance make_instance(const CMatrix& a, std::vector<CMatrix> t, std::vector<CMatrix> s,
                       CMatrix u, SeminormParams params, Ensemble ensemble,
                       std::uint64_t seed, double rank_tol = kDefaultRankTol);

enum class Verdict { pass, violation_candidate, skipped };
const char* to_string(Verdict v);

enum class Relation { leq, eq };

struct CheckResult {
  std::string check_id;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack_used = 0.0;
  Verdict verdict = Verdict::skipped;
  Bound lhs_direction = Bound::exact;
  Bound rhs_direction = Bound::exact;
  std::string instance_digest;
  std::uint64_t seed = 0;
  Ensemble ensemble = Ensemble::generic;
  std::size_t dim = 0;
  std::size_t n = 0;
  SeminormParams params;
  // lhs / rhs; 1 when both vanish.
  double ratio = 0.0;
  bool escalated = false;
  std::string note;
};

struct CheckInfo {
  std::string id;
  std::string statement;
  Relation relation = Relation::leq;
  // Ensembles the suite draws instances from for this check.
  std::vector<Ensemble> ensembles;
};

std::span<const CheckInfo> registry();
const CheckInfo* find_check(std::string_view id);

struct HarnessConfig {
  RadiiConfig radii;
  // Multiplies every slack.
  double slack_scale = 1.0;
  // Parameter grid for the inf_{alpha,beta} forms.
  std::vector<SeminormParams> inf_grid = default_inf_grid();
  // Budget multiplier and brute-force sample count used before a
  // violation candidate is declared.
  std::size_t escalation_factor = 4;
  std::size_t brute_force_samples = 20000;

  static std::vector<SeminormParams> default_inf_grid();
};

/// Runs the listed checks on one instance, sharing computed quantities.
/// Unknown ids throw UnknownCheck.
std::vector<CheckResult> run_checks(std::span<const std::string> ids, const Instance& inst,
                                    const HarnessConfig& cfg);

CheckResult run_check(std::string_view id, const Instance& inst, const HarnessConfig& cfg);

struct SuiteConfig {
  std::size_t dim_min = 2;
  std::size_t dim_max = 6;
  std::size_t n_min = 1;
  std::size_t n_max = 3;
  std::size_t samples = 200;
  std::uint64_t seed = 42;
  double rank_tol = kDefaultRankTol;
  HarnessConfig harness;
  // Empty means everything.
  std::vector<Ensemble> ensembles;
  std::vector<std::string> checks;
  // Keep every CheckResult in the report, not only candidates and extremes.
  bool keep_all_results = false;
};

struct CheckSummary {
  std::string check_id;
  std::size_t samples = 0;
  std::size_t passes = 0;
  std::size_t candidates = 0;
  std::size_t skipped = 0;
  std::size_t escalations = 0;
  // max |violation| / slack over non-skipped results (0 when inside the bound).
  double max_slack_consumed = 0.0;
  // Tightness ratio quantiles over non-skipped results: min, 50%, 90%, 99%, max.
  std::vector<double> ratio_quantiles;
  std::optional<CheckResult> tightest;
};

struct Report {
  SuiteConfig config;
  std::vector<CheckSummary> checks;
  std::vector<CheckResult> candidates;
  std::vector<CheckResult> results;
  std::size_t instances = 0;
  std::size_t total_candidates() const { return candidates.size(); }
};

Report run_suite(const SuiteConfig& cfg);

/// Per-instance seed used by run_suite.
std::uint64_t instance_seed(std::uint64_t seed, Ensemble e, std::size_t index);

struct SearchConfig {
  std::size_t dim_min = 2;
  std::size_t dim_max = 4;
  std::size_t n_min = 1;
  std::size_t n_max = 3;
  std::size_t random_trials = 60;
  std::size_t climb_steps = 60;
  std::uint64_t seed = 42;
  HarnessConfig harness;
  std::vector<Ensemble> ensembles;
  // Fixed parameters instead of the instance's own.
  std::optional<SeminormParams> params;
};

struct SearchResult {
  Instance instance;
  CheckResult result;
  std::size_t evaluated = 0;
};

/// Random search over instances followed by hill climbing on the entries of
/// T, maximising lhs / rhs. Throws UnknownCheck.
SearchResult tightness_search(std::string_view check_id, const SearchConfig& cfg);

}  // namespace aradius
