#include "stochbench/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "stochbench/errors.hpp"

namespace stochbench {

std::string_view to_string(VarKind kind) {
  switch (kind) {
    case VarKind::continuous: return "continuous";
    case VarKind::integer: return "integer";
    case VarKind::binary: return "binary";
  }
  return "continuous";
}

std::string_view to_string(Sense sense) {
  switch (sense) {
    case Sense::le: return "<=";
    case Sense::eq: return "=";
    case Sense::ge: return ">=";
  }
  return "<=";
}

std::string_view to_string(ObjSense sense) {
  return sense == ObjSense::minimize ? "minimize" : "maximize";
}

bool is_identifier(std::string_view name) {
  if (name.empty()) return false;
  auto head = static_cast<unsigned char>(name.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  return std::all_of(name.begin(), name.end(), [](char ch) {
    auto c = static_cast<unsigned char>(ch);
    return std::isalnum(c) || c == '_';
  });
}

double LinExpr::coef(const std::string& var) const {
  auto it = terms.find(var);
  return it == terms.end() ? 0.0 : it->second;
}

double LinExpr::evaluate(const std::map<std::string, double>& values) const {
  double total = constant;
  for (const auto& [name, coef] : terms) {
    auto it = values.find(name);
    if (it != values.end()) total += coef * it->second;
  }
  return total;
}

const Variable* Model::find_variable(std::string_view name) const {
  for (const auto& v : variables)
    if (v.name == name) return &v;
  return nullptr;
}

std::optional<std::size_t> Model::variable_index(std::string_view name) const {
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i].name == name) return i;
  return std::nullopt;
}

bool Model::has_integers() const {
  return std::any_of(variables.begin(), variables.end(),
                     [](const Variable& v) { return v.kind != VarKind::continuous; });
}

void validate(const Model& model) {
  std::set<std::string, std::less<>> names;
  for (const auto& v : model.variables) {
    if (!is_identifier(v.name)) throw ValidationError("malformed variable name '" + v.name + "'");
    if (!names.insert(v.name).second) throw ValidationError("duplicate variable '" + v.name + "'");
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper)
      throw ValidationError("variable '" + v.name + "' has lower > upper");
    if (v.kind == VarKind::binary && (v.lower != 0.0 || v.upper != 1.0))
      throw ValidationError("binary variable '" + v.name + "' must have bounds [0, 1]");
  }
  auto check_refs = [&](const LinExpr& e, const std::string& where) {
    for (const auto& [name, coef] : e.terms) {
      if (!names.contains(name))
        throw ValidationError(where + " references undeclared variable '" + name + "'");
      if (!std::isfinite(coef)) throw ValidationError(where + " has a non-finite coefficient");
    }
  };
  check_refs(model.objective.expr, "objective");
  std::set<std::string, std::less<>> cons;
  for (const auto& c : model.constraints) {
    if (!cons.insert(c.name).second) throw ValidationError("duplicate constraint '" + c.name + "'");
    check_refs(c.lhs, "constraint '" + c.name + "'");
    if (!std::isfinite(c.rhs)) throw ValidationError("constraint '" + c.name + "' has a non-finite rhs");
  }
}

namespace {

Constraint trivial_or_throw(const Constraint& original, Sense sense, double rhs, double tol) {
  bool infeasible = sense == Sense::eq ? std::abs(rhs) > tol : rhs < -tol;
  if (infeasible)
    throw InfeasibleTautology("constraint '" + original.name + "' has an empty left side and cannot hold");
  return Constraint{original.name, {}, sense, 0.0};
}

bool close(double a, double b, double rel_tol) {
  if (a == b) return true;
  if (std::isinf(a) || std::isinf(b)) return false;
  return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
}

bool close_expr(const LinExpr& a, const LinExpr& b, double rel_tol) {
  if (a.terms.size() != b.terms.size()) return false;
  for (auto ia = a.terms.begin(), ib = b.terms.begin(); ia != a.terms.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !close(ia->second, ib->second, rel_tol)) return false;
  }
  return close(a.constant, b.constant, rel_tol);
}

}  // namespace

Constraint canonicalize_constraint(const Constraint& c, double tol) {
  Sense sense = c.sense;
  double rhs = c.rhs - c.lhs.constant;
  std::map<std::string, double> terms;
  for (const auto& [name, coef] : c.lhs.terms)
    if (coef != 0.0) terms.emplace(name, coef);

  if (sense == Sense::ge) {
    for (auto& [name, coef] : terms) coef = -coef;
    rhs = -rhs;
    sense = Sense::le;
  }
  if (terms.empty()) return trivial_or_throw(c, sense, rhs, tol);

  double scale = std::abs(rhs);
  for (const auto& [name, coef] : terms) scale = std::max(scale, std::abs(coef));
  rhs /= scale;
  for (auto it = terms.begin(); it != terms.end();) {
    it->second /= scale;
    it = std::abs(it->second) < tol ? terms.erase(it) : std::next(it);
  }
  if (std::abs(rhs) < tol) rhs = 0.0;
  if (terms.empty()) return trivial_or_throw(c, sense, rhs, tol);

  if (sense == Sense::eq && terms.begin()->second < 0.0) {
    for (auto& [name, coef] : terms) coef = -coef;
    rhs = -rhs;
  }
  if (rhs == 0.0) rhs = 0.0;  // drop a negative zero

  Constraint out;
  out.name = c.name;
  out.sense = sense;
  out.rhs = rhs;
  out.lhs.terms = std::move(terms);
  return out;
}

bool is_trivial(const Constraint& canonical) { return canonical.lhs.terms.empty(); }

Model canonicalize_model(const Model& model, double tol) {
  Model out;
  out.variables = model.variables;
  std::sort(out.variables.begin(), out.variables.end(),
            [](const Variable& a, const Variable& b) { return a.name < b.name; });
  out.constraints.reserve(model.constraints.size());
  for (const auto& c : model.constraints) out.constraints.push_back(canonicalize_constraint(c, tol));
  out.objective = model.objective;
  std::erase_if(out.objective.expr.terms, [](const auto& t) { return t.second == 0.0; });
  return out;
}

bool structurally_equal(const Model& a, const Model& b, double rel_tol) {
  if (a.variables.size() != b.variables.size() || a.constraints.size() != b.constraints.size())
    return false;
  for (std::size_t i = 0; i < a.variables.size(); ++i) {
    const auto& va = a.variables[i];
    const auto& vb = b.variables[i];
    if (va.name != vb.name || va.kind != vb.kind || !close(va.lower, vb.lower, rel_tol) ||
        !close(va.upper, vb.upper, rel_tol))
      return false;
  }
  for (std::size_t i = 0; i < a.constraints.size(); ++i) {
    const auto& ca = a.constraints[i];
    const auto& cb = b.constraints[i];
    if (ca.name != cb.name || ca.sense != cb.sense || !close(ca.rhs, cb.rhs, rel_tol) ||
        !close_expr(ca.lhs, cb.lhs, rel_tol))
      return false;
  }
  return a.objective.sense == b.objective.sense && a.objective.name == b.objective.name &&
         close_expr(a.objective.expr, b.objective.expr, rel_tol);
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

Digest sha256(std::string_view bytes) {
  Digest out{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
  EVP_DigestFinal_ex(ctx, out.data(), &len);
  EVP_MD_CTX_free(ctx);
  return out;
}

std::string to_hex(const Digest& digest) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (auto byte : digest) {
    out.push_back(kHex[byte >> 4]);
    out.push_back(kHex[byte & 0xf]);
  }
  return out;
}

Digest fingerprint(const Model& model) {
  Model canon = canonicalize_model(model);
  std::ostringstream out;
  for (const auto& v : canon.variables)
    out << "var " << v.name << ' ' << to_string(v.kind) << ' ' << format_number(v.lower) << ' '
        << format_number(v.upper) << '\n';

  // Constraint names are labels, not structure: only the canonical rows count.
  std::vector<std::string> rows;
  for (const auto& c : canon.constraints) {
    std::ostringstream row;
    row << "row";
    for (const auto& [name, coef] : c.lhs.terms) row << ' ' << format_number(coef) << ' ' << name;
    row << ' ' << to_string(c.sense) << ' ' << format_number(c.rhs);
    rows.push_back(row.str());
  }
  std::sort(rows.begin(), rows.end());
  for (const auto& r : rows) out << r << '\n';

  out << "obj " << to_string(canon.objective.sense);
  for (const auto& [name, coef] : canon.objective.expr.terms)
    out << ' ' << format_number(coef) << ' ' << name;
  out << ' ' << format_number(canon.objective.expr.constant) << '\n';
  return sha256(out.str());
}

}  // namespace stochbench
