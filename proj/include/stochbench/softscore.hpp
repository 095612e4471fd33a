#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stochbench/model.hpp"
#include "stochbench/solver.hpp"

namespace stochbench {

enum class ErrorKind { none, runtime, compile };

std::string_view to_string(ErrorKind kind);
ErrorKind parse_error_kind(std::string_view text);

inline constexpr double kMatchFloor = 0.2;

struct PairScore {
  std::string truth_var;
  std::string gen_var;
  std::size_t truth_index = 0;
  std::size_t gen_index = 0;
  // bounds/type, constraint structure, objective contribution,
  // appearance frequency, indexed-term overlap
  std::array<double, 5> subscores{};
  double total = 0.0;
};

// generated name -> truth name
using VarMapping = std::map<std::string, std::string>;

struct ScoreReport {
  double accuracy = 0.0;
  double partial_score = 0.0;
  double match_vars = 0.0;
  double match_cons = 0.0;
  double match_obj = 0.0;
  double extra_gen = 0.0;
  ErrorKind error_kind = ErrorKind::none;

  VarMapping var_mapping;
  std::vector<std::string> matched_constraints;  // truth names
  std::vector<std::string> extra_variables;      // generated names
  std::vector<std::string> extra_constraints;    // generated names
  std::vector<std::string> extra_objective_terms;

  double runtime_err() const { return error_kind == ErrorKind::runtime ? 100.0 : 0.0; }
  double compile_err() const { return error_kind == ErrorKind::compile ? 100.0 : 0.0; }

  friend bool operator==(const ScoreReport&, const ScoreReport&) = default;
};

// Metric keys in report order.
inline constexpr std::array<std::string_view, 8> kMetricNames = {
    "accuracy", "partial_score", "match_vars", "match_cons", "match_obj", "extra_gen", "runtime_err", "compile_err"};

std::array<double, 8> metric_values(const ScoreReport& report);

nlohmann::json to_json(const ScoreReport& report);
ScoreReport score_report_from_json(const nlohmann::json& j);

// 100 when the statuses agree and, if optimal, the objectives agree within
// 1e-6 relative; 0 otherwise.
double exact_accuracy(const Solution& truth_out, const Solution& gen_out);

PairScore pair_score(const Variable& vt, const Variable& vg, const Model& truth, const Model& gen);

// Every truth x generated pair, truth-major in declaration order.
std::vector<PairScore> score_pairs(const Model& truth, const Model& gen);

// Descending total, ties by truth then generated declaration order; a pair is
// accepted when both ends are free and its total is at least kMatchFloor.
VarMapping greedy_match(std::vector<PairScore> scores, double floor = kMatchFloor);

// Matched names take their truth name, the rest get an "extra__" prefix.
// Throws CollisionError when two variables would end up with one name.
Model rename_generated(const Model& gen, const VarMapping& mapping);

// Same sense and the same canonical coefficients and rhs within rel_tol.
bool constraints_equivalent(const Constraint& a, const Constraint& b, double rel_tol = kCompareTol);

// Outputs may be absent (no accuracy credit then).
ScoreReport score_models(const Model& truth, const Model& gen, const std::optional<Solution>& truth_out,
                         const std::optional<Solution>& gen_out);

// Report for a candidate that produced no usable model.
ScoreReport error_report(ErrorKind kind);

}  // namespace stochbench
