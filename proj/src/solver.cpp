#include "stochbench/solver.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <queue>
#include <unordered_map>
#include <vector>

#include "stochbench/errors.hpp"

namespace stochbench {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::node_limit: return "node_limit";
  }
  return "infeasible";
}

std::optional<SolveStatus> parse_status(std::string_view text) {
  std::string t(text);
  for (auto& ch : t) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (t == "optimal" || t == "2") return SolveStatus::optimal;
  if (t == "infeasible" || t == "3" || t == "4" || t == "inf_or_unbd") return SolveStatus::infeasible;
  if (t == "unbounded" || t == "5") return SolveStatus::unbounded;
  if (t == "node_limit" || t == "8") return SolveStatus::node_limit;
  return std::nullopt;
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kTinyPivot = 1e-12;
constexpr int kMaxTinyPivots = 3;
constexpr long kMaxIterations = 200000;

struct Bounds {
  double lower;
  double upper;
};

struct Relaxation {
  SolveStatus status = SolveStatus::infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

// Dense simplex tableau in minimization form. Row r of `rows_` holds the
// constraint coefficients followed by the right-hand side; `cost_` is the
// reduced-cost row whose last entry is minus the current objective.
class Tableau {
public:
  Tableau(std::vector<std::vector<double>> rows, std::vector<std::size_t> basis)
      : rows_(std::move(rows)), basis_(std::move(basis)) {}

  std::size_t width() const { return rows_.empty() ? cost_.size() - 1 : rows_.front().size() - 1; }
  std::size_t height() const { return rows_.size(); }
  const std::vector<std::size_t>& basis() const { return basis_; }
  double rhs(std::size_t r) const { return rows_[r].back(); }
  double value() const { return -cost_.back(); }

  // Reduced costs for `costs` (one per column) under the current basis.
  void price(const std::vector<double>& costs) {
    cost_.assign(costs.size() + 1, 0.0);
    std::copy(costs.begin(), costs.end(), cost_.begin());
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      double cb = costs[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < cost_.size(); ++j) cost_[j] -= cb * rows_[r][j];
    }
  }

  // Bland's rule: lowest-index improving column enters, ties in the ratio
  // test leave by lowest basic index. Returns false when unbounded.
  bool optimize(const std::vector<bool>& allowed) {
    for (long it = 0; it < kMaxIterations; ++it) {
      std::size_t enter = width();
      for (std::size_t j = 0; j < width(); ++j) {
        if (allowed[j] && cost_[j] < -kOptimalityTol) {
          enter = j;
          break;
        }
      }
      if (enter == width()) return true;

      std::size_t leave = height();
      double best = 0.0;
      for (std::size_t r = 0; r < height(); ++r) {
        double a = rows_[r][enter];
        if (a <= kPivotTol) continue;
        double ratio = rows_[r].back() / a;
        if (leave == height() || ratio < best - 1e-12 * std::max(1.0, std::abs(best)) ||
            (ratio <= best + 1e-12 * std::max(1.0, std::abs(best)) && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave == height()) return false;
      pivot(leave, enter);
    }
    throw NumericBreakdown("simplex iteration budget exhausted");
  }

  void pivot(std::size_t r, std::size_t c) {
    double p = rows_[r][c];
    if (std::abs(p) < kTinyPivot && ++tiny_pivots_ > kMaxTinyPivots)
      throw NumericBreakdown("repeated pivots below 1e-12");
    auto& prow = rows_[r];
    for (auto& v : prow) v /= p;
    prow[c] = 1.0;
    auto eliminate = [&](std::vector<double>& row) {
      double f = row[c];
      if (f == 0.0) return;
      for (std::size_t j = 0; j < row.size(); ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    };
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (i != r) eliminate(rows_[i]);
    if (!cost_.empty()) eliminate(cost_);
    basis_[r] = c;
  }

  // Pivots basic columns flagged in `artificial` out of the basis; rows where
  // that is impossible are linearly dependent and are dropped.
  void expel(const std::vector<bool>& artificial) {
    for (std::size_t r = 0; r < rows_.size();) {
      if (!artificial[basis_[r]]) {
        ++r;
        continue;
      }
      std::size_t best = width();
      double mag = kPivotTol;
      for (std::size_t j = 0; j < width(); ++j) {
        if (!artificial[j] && std::abs(rows_[r][j]) > mag) {
          mag = std::abs(rows_[r][j]);
          best = j;
        }
      }
      if (best == width()) {
        rows_.erase(rows_.begin() + static_cast<long>(r));
        basis_.erase(basis_.begin() + static_cast<long>(r));
        continue;
      }
      pivot(r, best);
      ++r;
    }
  }

private:
  std::vector<std::vector<double>> rows_;
  std::vector<std::size_t> basis_;
  std::vector<double> cost_;
  int tiny_pivots_ = 0;
};

Relaxation solve_relaxation(const Model& m, const std::vector<Bounds>& bounds) {
  const std::size_t nv = m.variables.size();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < nv; ++j) index.emplace(m.variables[j].name, j);

  // x_j = offset_j + sum(sign * column) with every column >= 0.
  std::vector<double> offset(nv, 0.0);
  std::vector<std::vector<std::pair<std::size_t, double>>> columns(nv);
  std::vector<std::pair<std::size_t, double>> upper_rows;
  std::size_t ncols = 0;
  for (std::size_t j = 0; j < nv; ++j) {
    auto [lo, hi] = bounds[j];
    if (lo > hi + kFeasibilityTol) return {};
    if (std::isfinite(lo)) {
      offset[j] = lo;
      columns[j] = {{ncols, 1.0}};
      if (std::isfinite(hi)) upper_rows.emplace_back(ncols, hi - lo);
      ++ncols;
    } else if (std::isfinite(hi)) {
      offset[j] = hi;
      columns[j] = {{ncols, -1.0}};
      ++ncols;
    } else {
      columns[j] = {{ncols, 1.0}, {ncols + 1, -1.0}};
      ncols += 2;
    }
  }

  struct RawRow {
    std::vector<double> a;
    Sense sense;
    double b;
  };
  std::vector<RawRow> raw;
  for (const auto& c : m.constraints) {
    RawRow row{std::vector<double>(ncols, 0.0), c.sense, c.rhs - c.lhs.constant};
    for (const auto& [name, coef] : c.lhs.terms) {
      std::size_t j = index.at(name);
      row.b -= coef * offset[j];
      for (auto [col, sign] : columns[j]) row.a[col] += coef * sign;
    }
    raw.push_back(std::move(row));
  }
  for (auto [col, ub] : upper_rows) {
    RawRow row{std::vector<double>(ncols, 0.0), Sense::le, ub};
    row.a[col] = 1.0;
    raw.push_back(std::move(row));
  }

  const double sgn = m.objective.sense == ObjSense::minimize ? 1.0 : -1.0;
  std::vector<double> structural_cost(ncols, 0.0);
  for (const auto& [name, coef] : m.objective.expr.terms) {
    std::size_t j = index.at(name);
    for (auto [col, sign] : columns[j]) structural_cost[col] += sgn * coef * sign;
  }

  // Standard form with b >= 0: slack for <=, surplus + artificial for >=,
  // artificial for =.
  std::size_t nslack = 0, nart = 0;
  double max_b = 1.0;
  for (auto& row : raw) {
    if (row.b < 0) {
      for (auto& v : row.a) v = -v;
      row.b = -row.b;
      if (row.sense != Sense::eq) row.sense = row.sense == Sense::le ? Sense::ge : Sense::le;
    }
    max_b = std::max(max_b, row.b);
    if (row.sense != Sense::eq) ++nslack;
    if (row.sense != Sense::le) ++nart;
  }
  const std::size_t width = ncols + nslack + nart;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> basis;
  std::vector<bool> artificial(width, false);
  std::size_t next_slack = ncols, next_art = ncols + nslack;
  for (const auto& row : raw) {
    std::vector<double> t(width + 1, 0.0);
    std::copy(row.a.begin(), row.a.end(), t.begin());
    t[width] = row.b;
    if (row.sense == Sense::le) {
      t[next_slack] = 1.0;
      basis.push_back(next_slack++);
    } else {
      if (row.sense == Sense::ge) t[next_slack++] = -1.0;
      t[next_art] = 1.0;
      artificial[next_art] = true;
      basis.push_back(next_art++);
    }
    rows.push_back(std::move(t));
  }

  Tableau tab(std::move(rows), std::move(basis));
  std::vector<bool> all(width, true);
  if (nart > 0) {
    std::vector<double> phase1(width, 0.0);
    for (std::size_t j = ncols + nslack; j < width; ++j) phase1[j] = 1.0;
    tab.price(phase1);
    tab.optimize(all);
    if (tab.value() > kFeasibilityTol * max_b) return {};
    tab.expel(artificial);
  }

  std::vector<double> phase2(width, 0.0);
  std::copy(structural_cost.begin(), structural_cost.end(), phase2.begin());
  std::vector<bool> allowed(width);
  for (std::size_t j = 0; j < width; ++j) allowed[j] = !artificial[j];
  tab.price(phase2);
  if (!tab.optimize(allowed)) return {SolveStatus::unbounded, {}, 0.0};

  std::vector<double> colval(width, 0.0);
  for (std::size_t r = 0; r < tab.height(); ++r) colval[tab.basis()[r]] = tab.rhs(r);
  Relaxation out;
  out.status = SolveStatus::optimal;
  out.x.resize(nv);
  for (std::size_t j = 0; j < nv; ++j) {
    double v = offset[j];
    for (auto [col, sign] : columns[j]) v += sign * colval[col];
    if (std::abs(v) < kTinyPivot) v = 0.0;
    out.x[j] = v;
  }
  std::map<std::string, double> values;
  for (std::size_t j = 0; j < nv; ++j) values[m.variables[j].name] = out.x[j];
  out.objective = m.objective.expr.evaluate(values);
  return out;
}

std::vector<Bounds> declared_bounds(const Model& m) {
  std::vector<Bounds> b;
  for (const auto& v : m.variables) b.push_back({v.lower, v.upper});
  return b;
}

Solution to_solution(const Model& m, SolveStatus status, const std::vector<double>& x) {
  Solution s;
  s.status = status;
  if (x.empty()) return s;
  for (std::size_t j = 0; j < m.variables.size(); ++j) s.values[m.variables[j].name] = x[j];
  s.objective = m.objective.expr.evaluate(s.values);
  return s;
}

}  // namespace

Solution solve_lp(const Model& model) {
  validate(model);
  if (model.has_integers()) throw ValidationError("solve_lp needs a continuous model; use solve_mip");
  auto r = solve_relaxation(model, declared_bounds(model));
  return to_solution(model, r.status, r.status == SolveStatus::optimal ? r.x : std::vector<double>{});
}

Solution solve_mip(const Model& model, int node_limit) {
  validate(model);
  auto root_bounds = declared_bounds(model);
  auto root = solve_relaxation(model, root_bounds);
  if (!model.has_integers() || root.status != SolveStatus::optimal)
    return to_solution(model, root.status, root.status == SolveStatus::optimal ? root.x : std::vector<double>{});

  const double sgn = model.objective.sense == ObjSense::minimize ? 1.0 : -1.0;
  struct Node {
    double key;
    long id;
    std::vector<Bounds> bounds;
    std::vector<double> x;
  };
  auto worse = [](const Node& a, const Node& b) { return a.key != b.key ? a.key > b.key : a.id > b.id; };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
  long next_id = 0;
  open.push({sgn * root.objective, next_id++, root_bounds, root.x});

  std::vector<double> incumbent;
  double incumbent_key = kInfinity;
  int processed = 0;
  bool exhausted = false;
  auto prune_level = [&] {
    if (incumbent.empty()) return kInfinity;
    return incumbent_key - 1e-9 * std::max(1.0, std::abs(incumbent_key));
  };

  while (!open.empty()) {
    if (processed >= node_limit) {
      exhausted = true;
      break;
    }
    Node node = open.top();
    open.pop();
    ++processed;
    if (node.key >= prune_level()) continue;

    std::size_t branch = model.variables.size();
    double best_frac = kIntegralityTol;
    for (std::size_t j = 0; j < model.variables.size(); ++j) {
      if (model.variables[j].kind == VarKind::continuous) continue;
      double v = node.x[j];
      double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > best_frac) {
        best_frac = frac;
        branch = j;
      }
    }
    if (branch == model.variables.size()) {
      std::vector<double> x = node.x;
      for (std::size_t j = 0; j < x.size(); ++j)
        if (model.variables[j].kind != VarKind::continuous) x[j] = std::round(x[j]);
      std::map<std::string, double> values;
      for (std::size_t j = 0; j < x.size(); ++j) values[model.variables[j].name] = x[j];
      double key = sgn * model.objective.expr.evaluate(values);
      if (key < incumbent_key) {
        incumbent_key = key;
        incumbent = std::move(x);
      }
      continue;
    }

    const double v = node.x[branch];
    for (int side = 0; side < 2; ++side) {
      auto b = node.bounds;
      if (side == 0) {
        b[branch].upper = std::floor(v);
      } else {
        b[branch].lower = std::ceil(v);
      }
      if (b[branch].lower > b[branch].upper) continue;
      auto r = solve_relaxation(model, b);
      if (r.status == SolveStatus::unbounded) return to_solution(model, SolveStatus::unbounded, {});
      if (r.status != SolveStatus::optimal) continue;
      double key = sgn * r.objective;
      if (key < prune_level()) open.push({key, next_id++, std::move(b), std::move(r.x)});
    }
  }

  if (exhausted) return to_solution(model, SolveStatus::node_limit, incumbent);
  if (incumbent.empty()) return to_solution(model, SolveStatus::infeasible, {});
  return to_solution(model, SolveStatus::optimal, incumbent);
}

Solution solve(const Model& model) { return model.has_integers() ? solve_mip(model) : solve_lp(model); }

double max_violation(const Model& model, const std::map<std::string, double>& values) {
  auto value = [&](const std::string& n) {
    auto it = values.find(n);
    return it == values.end() ? 0.0 : it->second;
  };
  double worst = 0.0;
  for (const auto& v : model.variables) {
    double x = value(v.name);
    worst = std::max({worst, v.lower - x, x - v.upper});
  }
  for (const auto& c : model.constraints) {
    double lhs = c.lhs.evaluate(values);
    switch (c.sense) {
      case Sense::le: worst = std::max(worst, lhs - c.rhs); break;
      case Sense::ge: worst = std::max(worst, c.rhs - lhs); break;
      case Sense::eq: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
    }
  }
  return worst;
}

}  // namespace stochbench
