#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "stochbench/detequiv.hpp"
#include "stochbench/model.hpp"
#include "stochbench/softscore.hpp"
#include "stochbench/solver.hpp"

namespace stochbench::testutil {

struct RandomModelOptions {
  int max_vars = 6;
  int max_cons = 6;
  int coef_range = 5;
  bool allow_integers = true;
  bool allow_odd_bounds = true;
  bool allow_eq = true;
};

// Small random model with integer data. Variables are named v0, v1, ...
// and constraints r0, r1, ...
inline Model random_model(std::mt19937_64& rng, const RandomModelOptions& opt = {}) {
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  Model m;
  int n = uni(1, opt.max_vars);
  int k = uni(0, opt.max_cons);
  for (int j = 0; j < n; ++j) {
    Variable v{"v" + std::to_string(j)};
    if (opt.allow_integers) {
      int kind = uni(0, 5);
      if (kind == 0) v.kind = VarKind::integer;
      if (kind == 1) {
        v.kind = VarKind::binary;
        v.upper = 1.0;
      }
    }
    if (opt.allow_odd_bounds && v.kind != VarKind::binary) {
      switch (uni(0, 6)) {
        case 0: v.upper = uni(1, 9); break;
        case 1: v.lower = -uni(1, 9); break;
        case 2: v.lower = -kInfinity; break;
        case 3: v.lower = -uni(1, 4), v.upper = uni(1, 4); break;
        default: break;
      }
    }
    m.variables.push_back(v);
  }
  m.objective.sense = uni(0, 1) ? ObjSense::minimize : ObjSense::maximize;
  for (const auto& v : m.variables)
    if (int c = uni(-opt.coef_range, opt.coef_range); c != 0) m.objective.expr.terms[v.name] = c;
  for (int i = 0; i < k; ++i) {
    Constraint c;
    c.name = "r" + std::to_string(i);
    for (const auto& v : m.variables)
      if (int a = uni(-opt.coef_range, opt.coef_range); a != 0 && uni(0, 2) > 0) c.lhs.terms[v.name] = a;
    if (c.lhs.terms.empty()) c.lhs.terms[m.variables[uni(0, n - 1)].name] = uni(1, opt.coef_range);
    int s = uni(0, opt.allow_eq ? 2 : 1);
    c.sense = s == 0 ? Sense::le : (s == 1 ? Sense::ge : Sense::eq);
    c.rhs = uni(-10, 10);
    m.constraints.push_back(std::move(c));
  }
  return m;
}

// Solves a small dense system; empty result when singular.
inline std::vector<double> gauss(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (std::abs(a[p][c]) < 1e-9) return {};
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = 0; c < n; ++c) b[c] /= a[c][c];
  return b;
}

struct OracleResult {
  SolveStatus status = SolveStatus::infeasible;
  double objective = 0.0;
};

// Vertex enumeration over the model intersected with the box |x| <= box.
// Returns the best objective among feasible vertices (model sense).
inline OracleResult boxed_vertex_optimum(const Model& m, double box) {
  const std::size_t n = m.variables.size();
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<Sense> senses;
  auto push = [&](std::vector<double> a, Sense s, double b) {
    rows.push_back(std::move(a));
    senses.push_back(s);
    rhs.push_back(b);
  };
  for (const auto& c : m.constraints) {
    std::vector<double> a(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) a[j] = c.lhs.coef(m.variables[j].name);
    push(a, c.sense, c.rhs - c.lhs.constant);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    push(e, Sense::ge, std::isfinite(m.variables[j].lower) ? m.variables[j].lower : -box);
    push(e, Sense::le, std::isfinite(m.variables[j].upper) ? m.variables[j].upper : box);
  }
  auto feasible = [&](const std::vector<double>& x) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < n; ++j) lhs += rows[i][j] * x[j];
      double tol = 1e-7 * std::max(1.0, std::abs(rhs[i]));
      if (senses[i] == Sense::le && lhs > rhs[i] + tol) return false;
      if (senses[i] == Sense::ge && lhs < rhs[i] - tol) return false;
      if (senses[i] == Sense::eq && std::abs(lhs - rhs[i]) > tol) return false;
    }
    return true;
  };

  OracleResult best;
  const double sgn = m.objective.sense == ObjSense::minimize ? 1.0 : -1.0;
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (chosen.size() == n) {
      std::vector<std::vector<double>> a;
      std::vector<double> b;
      for (auto i : chosen) {
        a.push_back(rows[i]);
        b.push_back(rhs[i]);
      }
      auto x = gauss(a, b);
      if (x.empty() || !feasible(x)) return;
      double obj = m.objective.expr.constant;
      for (std::size_t j = 0; j < n; ++j) obj += m.objective.expr.coef(m.variables[j].name) * x[j];
      if (best.status != SolveStatus::optimal || sgn * obj < sgn * best.objective) {
        best.status = SolveStatus::optimal;
        best.objective = obj;
      }
      return;
    }
    for (std::size_t k = from; k < rows.size(); ++k) {
      chosen.push_back(k);
      rec(k + 1);
      chosen.pop_back();
    }
  };
  rec(0);
  return best;
}

// LP oracle: two boxes of different size; an optimum that moves with the box
// means the LP is unbounded.
inline OracleResult lp_oracle(const Model& m) {
  auto small = boxed_vertex_optimum(m, 1e6);
  auto large = boxed_vertex_optimum(m, 2e6);
  if (large.status != SolveStatus::optimal) return large;
  if (small.status != SolveStatus::optimal) return {SolveStatus::unbounded, 0.0};
  if (std::abs(small.objective - large.objective) > 1e-6 * std::max(1.0, std::abs(large.objective)))
    return {SolveStatus::unbounded, 0.0};
  return large;
}

// Exhaustive enumeration for models whose variables are all binary.
inline OracleResult binary_oracle(const Model& m) {
  const std::size_t n = m.variables.size();
  OracleResult best;
  const double sgn = m.objective.sense == ObjSense::minimize ? 1.0 : -1.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::map<std::string, double> values;
    for (std::size_t j = 0; j < n; ++j) values[m.variables[j].name] = (mask >> j) & 1u;
    if (max_violation(m, values) > 0.0) continue;
    double obj = m.objective.expr.evaluate(values);
    if (best.status != SolveStatus::optimal || sgn * obj < sgn * best.objective) best = {SolveStatus::optimal, obj};
  }
  return best;
}

// Random model whose variables are all binary, with integer data.
inline Model random_binary_model(std::mt19937_64& rng, int max_vars = 10, int max_cons = 5) {
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  Model m;
  int n = uni(1, max_vars);
  for (int j = 0; j < n; ++j) m.variables.push_back(Variable{"b" + std::to_string(j), 0.0, 1.0, VarKind::binary});
  m.objective.sense = uni(0, 1) ? ObjSense::minimize : ObjSense::maximize;
  for (const auto& v : m.variables)
    if (int c = uni(-9, 9); c != 0) m.objective.expr.terms[v.name] = c;
  int k = uni(1, max_cons);
  for (int i = 0; i < k; ++i) {
    Constraint c;
    c.name = "k" + std::to_string(i);
    for (const auto& v : m.variables)
      if (int a = uni(-6, 6); a != 0) c.lhs.terms[v.name] = a;
    if (c.lhs.terms.empty()) c.lhs.terms[m.variables.front().name] = 1;
    c.sense = uni(0, 5) == 0 ? Sense::eq : (uni(0, 1) ? Sense::le : Sense::ge);
    c.rhs = uni(-6, 8);
    m.constraints.push_back(std::move(c));
  }
  return m;
}

// Generated-side variant of a truth model: a dropped row, a nudged objective
// coefficient and an extra variable, each with some probability.
inline Model perturb(std::mt19937_64& rng, Model m) {
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  if (!m.constraints.empty() && uni(0, 2) == 0) m.constraints.erase(m.constraints.begin() + uni(0, static_cast<int>(m.constraints.size()) - 1));
  if (!m.objective.expr.terms.empty() && uni(0, 2) == 0) {
    auto it = m.objective.expr.terms.begin();
    std::advance(it, uni(0, static_cast<int>(m.objective.expr.terms.size()) - 1));
    it->second += uni(1, 3);
    if (it->second == 0.0) m.objective.expr.terms.erase(it);
  }
  if (uni(0, 2) == 0) {
    m.variables.push_back(Variable{"zz", 0.0, static_cast<double>(uni(1, 9))});
    Constraint c{"extra_row", {}, Sense::le, static_cast<double>(uni(1, 9))};
    c.lhs.terms["zz"] = 1.0;
    c.lhs.terms[m.variables.front().name] = uni(1, 3);
    m.constraints.push_back(c);
  }
  return m;
}

// Pair totals at or above the match floor are pairwise distinct, so greedy
// matching never depends on declaration order.
inline bool unambiguous(const Model& truth, const Model& gen) {
  std::vector<double> totals;
  for (const auto& p : score_pairs(truth, gen))
    if (p.total >= kMatchFloor) totals.push_back(p.total);
  std::sort(totals.begin(), totals.end());
  for (std::size_t k = 1; k < totals.size(); ++k)
    if (totals[k] - totals[k - 1] < 1e-9) return false;
  return true;
}

inline Model shuffle_constraints(std::mt19937_64& rng, Model m) {
  std::shuffle(m.constraints.begin(), m.constraints.end(), rng);
  return m;
}

inline Model shuffle_variables(std::mt19937_64& rng, Model m) {
  std::shuffle(m.variables.begin(), m.variables.end(), rng);
  return m;
}

// Bijective renaming to fresh names; returns the model and old -> new map.
inline std::pair<Model, std::map<std::string, std::string>> rename_all(std::mt19937_64& rng, const Model& m) {
  std::vector<std::size_t> perm(m.variables.size());
  for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::map<std::string, std::string> to;
  for (std::size_t k = 0; k < perm.size(); ++k) to[m.variables[k].name] = "q" + std::to_string(perm[k]) + "_n";
  Model out = m;
  auto expr = [&](const LinExpr& e) {
    LinExpr r;
    r.constant = e.constant;
    for (const auto& [n, c] : e.terms) r.terms[to.at(n)] = c;
    return r;
  };
  for (auto& v : out.variables) v.name = to.at(v.name);
  for (auto& c : out.constraints) c.lhs = expr(c.lhs);
  out.objective.expr = expr(out.objective.expr);
  return {out, to};
}

inline Model scale_rows(std::mt19937_64& rng, Model m) {
  std::uniform_real_distribution<double> f(0.1, 10.0);
  for (auto& c : m.constraints) {
    double k = f(rng);
    for (auto& [n, a] : c.lhs.terms) a *= k;
    c.lhs.constant *= k;
    c.rhs *= k;
  }
  return m;
}

// Rewrites a.x <= b as -a.x >= -b (and back) on a random subset of rows.
inline Model flip_rows(std::mt19937_64& rng, Model m) {
  for (auto& c : m.constraints) {
    if (c.sense == Sense::eq || std::uniform_int_distribution<int>(0, 1)(rng) == 0) continue;
    for (auto& [n, a] : c.lhs.terms) a = -a;
    c.lhs.constant = -c.lhs.constant;
    c.rhs = -c.rhs;
    c.sense = c.sense == Sense::le ? Sense::ge : Sense::le;
  }
  return m;
}

// 2 scenarios: min x + E[2 y] s.t. y >= d - x, d in {1, 3}. Optimum 3.
inline TwoStageSpec toy_spec() {
  TwoStageSpec s;
  s.first_stage_vars = {"x"};
  s.c = {1.0};
  s.second_stage_vars = {"y"};
  s.second_stage_rows = {"cover"};
  s.second_stage_senses = {Sense::ge};
  s.scenarios = {Scenario{0.5, {2.0}, {{1.0}}, {{-1.0}}, {1.0}}, Scenario{0.5, {2.0}, {{1.0}}, {{-1.0}}, {3.0}}};
  return s;
}

inline ChanceSpec truck_spec() {
  ChanceSpec s;
  s.vars = {"x1", "x2"};
  s.c = {1.0, 1.0};
  s.chance_rows = {ChanceRow{"storeA", {1.0, 0.0}, Sense::ge, {"normal", {100.0, 10.0}}, 0.95},
                   ChanceRow{"storeB", {0.0, 1.0}, Sense::ge, {"normal", {150.0, 15.0}}, 0.90}};
  return s;
}

inline TwoStageSpec random_spec(std::mt19937_64& rng) {
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  TwoStageSpec s;
  int nx = uni(1, 4), ny = uni(0, 4), m1 = uni(0, 3), m2 = uni(0, 3), ns = std::array{1, 2, 4, 5}[uni(0, 3)];
  for (int j = 0; j < nx; ++j) {
    s.first_stage_vars.push_back("x" + std::to_string(j));
    s.c.push_back(uni(-3, 5));
  }
  for (int j = 0; j < ny; ++j) s.second_stage_vars.push_back("y" + std::to_string(j));
  for (int i = 0; i < m1; ++i) {
    Row r{"a" + std::to_string(i), {}, Sense::le, static_cast<double>(uni(0, 9))};
    for (int j = 0; j < nx; ++j) r.coefs.push_back(uni(-2, 2));
    s.first_stage_rows.push_back(r);
  }
  for (int i = 0; i < m2; ++i) s.second_stage_rows.push_back("t" + std::to_string(i));
  for (int k = 0; k < ns; ++k) {
    Scenario sc;
    sc.probability = 1.0 / ns;
    for (int j = 0; j < ny; ++j) sc.q.push_back(uni(0, 5));
    for (int i = 0; i < m2; ++i) {
      sc.D.emplace_back();
      sc.B.emplace_back();
      for (int j = 0; j < ny; ++j) sc.D.back().push_back(uni(-2, 2));
      for (int j = 0; j < nx; ++j) sc.B.back().push_back(uni(-2, 2));
      sc.d.push_back(uni(-5, 5));
    }
    s.scenarios.push_back(sc);
  }
  return s;
}

}  // namespace stochbench::testutil
