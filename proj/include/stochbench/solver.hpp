#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "stochbench/model.hpp"

namespace stochbench {

enum class SolveStatus { optimal, infeasible, unbounded, node_limit };

std::string_view to_string(SolveStatus status);
// Accepts the names above (any case) and Gurobi's numeric status codes.
std::optional<SolveStatus> parse_status(std::string_view text);

struct Solution {
  SolveStatus status = SolveStatus::infeasible;
  // Objective in the model's own sense, including any constant term.
  // Meaningful when `values` is non-empty.
  double objective = 0.0;
  std::map<std::string, double> values;

  friend bool operator==(const Solution&, const Solution&) = default;
};

inline constexpr double kFeasibilityTol = 1e-9;
inline constexpr double kOptimalityTol = 1e-9;
inline constexpr double kIntegralityTol = 1e-6;
inline constexpr int kDefaultNodeLimit = 10000;

// Dense two-phase tableau simplex with Bland's rule. All variables must be
// continuous (see solve_mip). Throws NumericBreakdown when pivots degenerate
// below 1e-12 repeatedly or the iteration budget runs out.
Solution solve_lp(const Model& model);

// Best-first branch-and-bound on the most fractional integer variable. On an
// all-continuous model this is exactly solve_lp. When the node budget runs out
// the status is node_limit and the incumbent, if any, is returned.
Solution solve_mip(const Model& model, int node_limit = kDefaultNodeLimit);

// solve_mip when the model has integer or binary variables, solve_lp otherwise.
Solution solve(const Model& model);

// Largest violation of any bound or constraint at `values` (missing values are 0).
double max_violation(const Model& model, const std::map<std::string, double>& values);

}  // namespace stochbench
