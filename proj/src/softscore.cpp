#include "stochbench/softscore.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "stochbench/errors.hpp"

namespace stochbench {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::none: return "none";
    case ErrorKind::runtime: return "runtime";
    case ErrorKind::compile: return "compile";
  }
  return "none";
}

ErrorKind parse_error_kind(std::string_view text) {
  if (text == "none") return ErrorKind::none;
  if (text == "runtime") return ErrorKind::runtime;
  if (text == "compile") return ErrorKind::compile;
  throw ValidationError("unknown error kind '" + std::string(text) + "'");
}

namespace {

using Shape = std::tuple<int, int, int, int>;  // sense, own sign, #positive others, #negative others
using Incidence = std::pair<int, double>;      // sense, canonical coefficient

struct CanonicalRow {
  Constraint row;
  bool contradiction = false;
};

struct Profile {
  std::vector<Shape> shapes;
  std::vector<Incidence> incidences;
  std::optional<double> objective;
  int frequency = 0;
};

bool close(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<CanonicalRow> canonical_rows(const Model& m) {
  std::vector<CanonicalRow> out;
  for (const auto& c : m.constraints) {
    try {
      out.push_back({canonicalize_constraint(c), false});
    } catch (const InfeasibleTautology&) {
      out.push_back({Constraint{c.name, {}, Sense::le, -1.0}, true});
    }
  }
  return out;
}

bool canonical_equal(const CanonicalRow& a, const CanonicalRow& b, double rel_tol) {
  if (a.contradiction || b.contradiction) return a.contradiction && b.contradiction;
  if (a.row.sense != b.row.sense || a.row.lhs.terms.size() != b.row.lhs.terms.size()) return false;
  if (!close(a.row.rhs, b.row.rhs, rel_tol)) return false;
  auto ia = a.row.lhs.terms.begin();
  auto ib = b.row.lhs.terms.begin();
  for (; ia != a.row.lhs.terms.end(); ++ia, ++ib)
    if (ia->first != ib->first || !close(ia->second, ib->second, rel_tol)) return false;
  return true;
}

// Objective coefficients divided by the largest magnitude in the objective.
std::map<std::string, double> normalized_objective(const Model& m, bool to_min_sense) {
  double scale = 0.0;
  for (const auto& [n, c] : m.objective.expr.terms) scale = std::max(scale, std::abs(c));
  std::map<std::string, double> out;
  if (scale == 0.0) return out;
  const double sgn = to_min_sense && m.objective.sense == ObjSense::maximize ? -1.0 : 1.0;
  for (const auto& [n, c] : m.objective.expr.terms)
    if (c != 0.0) out[n] = sgn * c / scale;
  return out;
}

std::map<std::string, Profile> profiles(const Model& m) {
  std::map<std::string, Profile> out;
  for (const auto& v : m.variables) out[v.name];
  for (const auto& cr : canonical_rows(m)) {
    const auto& terms = cr.row.lhs.terms;
    const int sense = static_cast<int>(cr.row.sense);
    for (const auto& [name, coef] : terms) {
      auto it = out.find(name);
      if (it == out.end()) continue;
      // equality rows are oriented so the variable's own coefficient is positive
      const double orient = cr.row.sense == Sense::eq && coef < 0 ? -1.0 : 1.0;
      int pos = 0, neg = 0;
      for (const auto& [other, k] : terms) {
        if (other == name) continue;
        (orient * k > 0 ? pos : neg)++;
      }
      it->second.shapes.emplace_back(sense, coef * orient > 0 ? 1 : -1, pos, neg);
      it->second.incidences.emplace_back(sense, orient * coef);
      ++it->second.frequency;
    }
  }
  for (const auto& [name, c] : normalized_objective(m, true)) {
    auto it = out.find(name);
    if (it == out.end()) continue;
    it->second.objective = c;
    ++it->second.frequency;
  }
  for (auto& [n, p] : out) {
    std::sort(p.shapes.begin(), p.shapes.end());
    std::sort(p.incidences.begin(), p.incidences.end());
  }
  return out;
}

double bounds_score(const Variable& a, const Variable& b) {
  double s = a.kind == b.kind ? 1.0 : 0.0;
  auto same = [](double x, double y) { return x == y || close(x, y, kCompareTol); };
  if (!same(a.lower, b.lower)) s -= 0.25;
  if (!same(a.upper, b.upper)) s -= 0.25;
  return std::max(0.0, s);
}

double jaccard(const std::vector<Shape>& a, const std::vector<Shape>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::vector<Shape> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  const double inter = static_cast<double>(common.size());
  return inter / (static_cast<double>(a.size() + b.size()) - inter);
}

double objective_score(const std::optional<double>& t, const std::optional<double>& g) {
  if (!t && !g) return 1.0;
  if (!t || !g) return 0.0;
  return std::clamp(1.0 - std::abs(*t - *g), 0.0, 1.0);
}

double frequency_score(int t, int g) {
  if (t == 0 && g == 0) return 1.0;
  return static_cast<double>(std::min(t, g)) / static_cast<double>(std::max(t, g));
}

double overlap_score(const std::vector<Incidence>& t, const std::vector<Incidence>& g) {
  if (t.empty()) return g.empty() ? 1.0 : 0.0;
  std::vector<bool> used(g.size(), false);
  int hit = 0;
  for (const auto& [sense, coef] : t) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!used[k] && g[k].first == sense && close(g[k].second, coef, kCompareTol)) {
        used[k] = true;
        ++hit;
        break;
      }
    }
  }
  return static_cast<double>(hit) / static_cast<double>(t.size());
}

PairScore combine(const Variable& vt, const Variable& vg, const Profile& pt, const Profile& pg) {
  PairScore p;
  p.truth_var = vt.name;
  p.gen_var = vg.name;
  p.subscores = {bounds_score(vt, vg), jaccard(pt.shapes, pg.shapes), objective_score(pt.objective, pg.objective),
                 frequency_score(pt.frequency, pg.frequency), overlap_score(pt.incidences, pg.incidences)};
  double sum = 0.0;
  for (double s : p.subscores) sum += s;
  p.total = sum / 5.0;
  return p;
}

double percent(std::size_t num, std::size_t den) {
  return den == 0 ? 100.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::array<double, 8> metric_values(const ScoreReport& r) {
  return {r.accuracy, r.partial_score, r.match_vars, r.match_cons, r.match_obj, r.extra_gen, r.runtime_err(),
          r.compile_err()};
}

nlohmann::json to_json(const ScoreReport& r) {
  nlohmann::json j = nlohmann::json::object();
  auto values = metric_values(r);
  for (std::size_t k = 0; k < kMetricNames.size(); ++k) j[std::string(kMetricNames[k])] = values[k];
  j["error_kind"] = std::string(to_string(r.error_kind));
  j["var_mapping"] = r.var_mapping;
  j["matched_constraints"] = r.matched_constraints;
  j["extra_variables"] = r.extra_variables;
  j["extra_constraints"] = r.extra_constraints;
  j["extra_objective_terms"] = r.extra_objective_terms;
  return j;
}

ScoreReport score_report_from_json(const nlohmann::json& j) {
  ScoreReport r;
  r.accuracy = j.at("accuracy").get<double>();
  r.partial_score = j.at("partial_score").get<double>();
  r.match_vars = j.at("match_vars").get<double>();
  r.match_cons = j.at("match_cons").get<double>();
  r.match_obj = j.at("match_obj").get<double>();
  r.extra_gen = j.at("extra_gen").get<double>();
  r.error_kind = parse_error_kind(j.at("error_kind").get<std::string>());
  r.var_mapping = j.value("var_mapping", VarMapping{});
  r.matched_constraints = j.value("matched_constraints", std::vector<std::string>{});
  r.extra_variables = j.value("extra_variables", std::vector<std::string>{});
  r.extra_constraints = j.value("extra_constraints", std::vector<std::string>{});
  r.extra_objective_terms = j.value("extra_objective_terms", std::vector<std::string>{});
  return r;
}

double exact_accuracy(const Solution& truth_out, const Solution& gen_out) {
  if (truth_out.status != gen_out.status) return 0.0;
  if (truth_out.status != SolveStatus::optimal) return 100.0;
  const double t = truth_out.objective;
  return std::abs(t - gen_out.objective) <= 1e-6 * std::max(1.0, std::abs(t)) ? 100.0 : 0.0;
}

PairScore pair_score(const Variable& vt, const Variable& vg, const Model& truth, const Model& gen) {
  return combine(vt, vg, profiles(truth).at(vt.name), profiles(gen).at(vg.name));
}

std::vector<PairScore> score_pairs(const Model& truth, const Model& gen) {
  auto pt = profiles(truth);
  auto pg = profiles(gen);
  std::vector<PairScore> out;
  out.reserve(truth.variables.size() * gen.variables.size());
  for (std::size_t i = 0; i < truth.variables.size(); ++i) {
    const auto& vt = truth.variables[i];
    for (std::size_t k = 0; k < gen.variables.size(); ++k) {
      const auto& vg = gen.variables[k];
      auto p = combine(vt, vg, pt.at(vt.name), pg.at(vg.name));
      p.truth_index = i;
      p.gen_index = k;
      out.push_back(std::move(p));
    }
  }
  return out;
}

VarMapping greedy_match(std::vector<PairScore> scores, double floor) {
  std::stable_sort(scores.begin(), scores.end(), [](const PairScore& a, const PairScore& b) {
    if (a.total != b.total) return a.total > b.total;
    if (a.truth_index != b.truth_index) return a.truth_index < b.truth_index;
    return a.gen_index < b.gen_index;
  });
  VarMapping mapping;
  std::set<std::string> taken;
  for (const auto& p : scores) {
    if (p.total < floor) break;
    if (mapping.count(p.gen_var) || taken.count(p.truth_var)) continue;
    mapping[p.gen_var] = p.truth_var;
    taken.insert(p.truth_var);
  }
  return mapping;
}

Model rename_generated(const Model& gen, const VarMapping& mapping) {
  std::map<std::string, std::string> to;
  std::set<std::string> results;
  for (const auto& v : gen.variables) {
    auto it = mapping.find(v.name);
    std::string name = it == mapping.end() ? "extra__" + v.name : it->second;
    if (!results.insert(name).second)
      throw CollisionError("renaming '" + v.name + "' to '" + name + "' collides with another variable");
    to[v.name] = name;
  }
  for (const auto& [from, target] : mapping)
    if (!to.count(from)) throw CollisionError("mapping names unknown generated variable '" + from + "'");

  auto rename_expr = [&](const LinExpr& e) {
    LinExpr out;
    out.constant = e.constant;
    for (const auto& [n, c] : e.terms) {
      auto it = to.find(n);
      out.add(it == to.end() ? n : it->second, c);
    }
    return out;
  };
  Model out = gen;
  for (auto& v : out.variables) v.name = to.at(v.name);
  for (auto& c : out.constraints) c.lhs = rename_expr(c.lhs);
  out.objective.expr = rename_expr(gen.objective.expr);
  return out;
}

bool constraints_equivalent(const Constraint& a, const Constraint& b, double rel_tol) {
  Model ma, mb;
  ma.constraints = {a};
  mb.constraints = {b};
  return canonical_equal(canonical_rows(ma).front(), canonical_rows(mb).front(), rel_tol);
}

ScoreReport score_models(const Model& truth, const Model& gen, const std::optional<Solution>& truth_out,
                         const std::optional<Solution>& gen_out) {
  ScoreReport r;
  if (truth_out && gen_out) r.accuracy = exact_accuracy(*truth_out, *gen_out);

  r.var_mapping = greedy_match(score_pairs(truth, gen));
  const Model renamed = rename_generated(gen, r.var_mapping);
  std::map<std::string, std::string> original;
  for (std::size_t k = 0; k < gen.variables.size(); ++k)
    original[renamed.variables[k].name] = gen.variables[k].name;

  for (const auto& v : gen.variables)
    if (!r.var_mapping.count(v.name)) r.extra_variables.push_back(v.name);

  const auto trows = canonical_rows(truth);
  const auto grows = canonical_rows(renamed);
  std::vector<bool> used(grows.size(), false);
  for (std::size_t i = 0; i < trows.size(); ++i) {
    for (std::size_t k = 0; k < grows.size(); ++k) {
      if (!used[k] && canonical_equal(trows[i], grows[k], kCompareTol)) {
        used[k] = true;
        r.matched_constraints.push_back(truth.constraints[i].name);
        break;
      }
    }
  }
  for (std::size_t k = 0; k < grows.size(); ++k)
    if (!used[k]) r.extra_constraints.push_back(gen.constraints[k].name);

  const auto tobj = normalized_objective(truth, false);
  const auto gobj = normalized_objective(renamed, false);
  const bool same_sense = truth.objective.sense == gen.objective.sense;
  std::size_t obj_hits = 0;
  std::set<std::string> gen_hit;
  if (same_sense) {
    for (const auto& [n, c] : tobj) {
      auto it = gobj.find(n);
      if (it != gobj.end() && close(c, it->second, kCompareTol)) {
        ++obj_hits;
        gen_hit.insert(n);
      }
    }
  }
  for (const auto& [n, c] : gobj)
    if (!gen_hit.count(n)) r.extra_objective_terms.push_back(original.count(n) ? original.at(n) : n);
  double obj_fraction;
  if (!same_sense) {
    obj_fraction = 0.0;
  } else if (tobj.empty()) {
    obj_fraction = gobj.empty() ? 1.0 : 0.0;
  } else {
    obj_fraction = static_cast<double>(obj_hits) / static_cast<double>(tobj.size());
  }

  std::sort(r.extra_variables.begin(), r.extra_variables.end());
  std::sort(r.extra_constraints.begin(), r.extra_constraints.end());
  std::sort(r.extra_objective_terms.begin(), r.extra_objective_terms.end());

  const std::size_t nv = truth.variables.size(), nc = truth.constraints.size();
  r.match_vars = percent(r.var_mapping.size(), nv);
  r.match_cons = percent(r.matched_constraints.size(), nc);
  r.match_obj = 100.0 * obj_fraction;
  const std::size_t gen_total = gen.variables.size() + gen.constraints.size() + gobj.size();
  const std::size_t gen_extra = r.extra_variables.size() + r.extra_constraints.size() + r.extra_objective_terms.size();
  r.extra_gen = gen_total == 0 ? 0.0 : 100.0 * static_cast<double>(gen_extra) / static_cast<double>(gen_total);
  r.partial_score = 100.0 *
                    (static_cast<double>(r.var_mapping.size() + r.matched_constraints.size()) + obj_fraction) /
                    static_cast<double>(nv + nc + 1);
  return r;
}

ScoreReport error_report(ErrorKind kind) {
  ScoreReport r;
  r.error_kind = kind;
  return r;
}

}  // namespace stochbench
