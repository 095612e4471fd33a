#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stochbench {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Relative tolerance used when comparing canonicalized coefficients.
inline constexpr double kCompareTol = 1e-6;
// Absolute threshold below which canonical coefficients are dropped.
inline constexpr double kZeroTol = 1e-9;

enum class VarKind { continuous, integer, binary };
enum class Sense { le, eq, ge };
enum class ObjSense { minimize, maximize };

std::string_view to_string(VarKind kind);
std::string_view to_string(Sense sense);
std::string_view to_string(ObjSense sense);

bool is_identifier(std::string_view name);

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  VarKind kind = VarKind::continuous;

  friend bool operator==(const Variable&, const Variable&) = default;
};

// Linear expression; terms are keyed (and therefore iterated) by variable name.
struct LinExpr {
  std::map<std::string, double> terms;
  double constant = 0.0;

  void add(const std::string& var, double coef) { terms[var] += coef; }
  double coef(const std::string& var) const;
  double evaluate(const std::map<std::string, double>& values) const;

  friend bool operator==(const LinExpr&, const LinExpr&) = default;
};

struct Constraint {
  std::string name;
  LinExpr lhs;
  Sense sense = Sense::le;
  double rhs = 0.0;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct Objective {
  std::string name = "obj";
  ObjSense sense = ObjSense::minimize;
  LinExpr expr;

  friend bool operator==(const Objective&, const Objective&) = default;
};

struct Model {
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  Objective objective;

  const Variable* find_variable(std::string_view name) const;
  std::optional<std::size_t> variable_index(std::string_view name) const;
  bool has_integers() const;

  friend bool operator==(const Model&, const Model&) = default;
};

// Throws ValidationError when names are malformed or duplicated, a bound pair
// is inverted, a binary is not on [0,1], or an expression references an
// undeclared variable.
void validate(const Model& model);

// Canonical constraint: constant folded into rhs, >= flipped to <=, everything
// divided by the largest absolute entry among the coefficients and the rhs,
// coefficients under `tol` dropped, and equality rows signed so that the
// lexicographically smallest variable is positive.
//
// A row with an all-zero left side that is always satisfied canonicalizes to
// the trivial marker (empty lhs, rhs 0); one that can never be satisfied
// raises InfeasibleTautology.
Constraint canonicalize_constraint(const Constraint& c, double tol = kZeroTol);
bool is_trivial(const Constraint& canonical);

// Variables sorted by name, every constraint canonicalized in place (order and
// names kept), zero objective terms removed. Used for structural comparison.
Model canonicalize_model(const Model& model, double tol = kZeroTol);

// Structural equality with a relative tolerance on every number.
bool structurally_equal(const Model& a, const Model& b, double rel_tol = 1e-9);

using Digest = std::array<std::uint8_t, 32>;

// SHA-256 over the sorted canonical forms; independent of declaration order.
Digest fingerprint(const Model& model);
std::string to_hex(const Digest& digest);

// SHA-256 of arbitrary bytes.
Digest sha256(std::string_view bytes);

// %.12g with -0 printed as 0 and infinities as inf/-inf.
std::string format_number(double value);

}  // namespace stochbench
