#include "stochbench/detequiv.hpp"

#include <cmath>
#include <set>

#include "stochbench/errors.hpp"
#include "stochbench/normal.hpp"

namespace stochbench {

namespace {

constexpr double kProbabilityTol = 1e-9;

void check_names(const std::vector<std::string>& names, const std::string& what) {
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!is_identifier(n)) throw ValidationError(what + " name '" + n + "' is not an identifier");
    if (!seen.insert(n).second) throw ValidationError("duplicate " + what + " name '" + n + "'");
  }
}

void check_width(const std::vector<double>& row, std::size_t width, const std::string& what) {
  if (row.size() != width)
    throw DimensionMismatch(what + " has " + std::to_string(row.size()) + " entries, expected " +
                            std::to_string(width));
}

void check_rows(const std::vector<Row>& rows, std::size_t width, const std::string& what) {
  std::set<std::string> seen;
  for (const auto& r : rows) {
    if (!is_identifier(r.name)) throw ValidationError(what + " row name '" + r.name + "' is not an identifier");
    if (!seen.insert(r.name).second) throw ValidationError("duplicate " + what + " row '" + r.name + "'");
    check_width(r.coefs, width, what + " row '" + r.name + "'");
  }
}

void add_row(Model& m, std::string name, const std::vector<std::string>& vars, const std::vector<double>& coefs,
             Sense sense, double rhs) {
  Constraint c;
  c.name = std::move(name);
  for (std::size_t j = 0; j < vars.size(); ++j)
    if (coefs[j] != 0.0) c.lhs.add(vars[j], coefs[j]);
  c.sense = sense;
  c.rhs = rhs;
  m.constraints.push_back(std::move(c));
}

Model first_stage(const std::vector<std::string>& vars, const std::vector<double>& c, const std::vector<Row>& rows) {
  Model m;
  for (const auto& v : vars) m.variables.push_back(Variable{v});
  for (std::size_t j = 0; j < vars.size(); ++j)
    if (c[j] != 0.0) m.objective.expr.add(vars[j], c[j]);
  for (const auto& r : rows) add_row(m, r.name, vars, r.coefs, r.sense, r.rhs);
  return m;
}

// Appends the second-stage block of one scenario, naming copies with `rename`.
template <typename Rename>
void add_scenario(Model& m, const TwoStageSpec& spec, const Scenario& s, double weight, Rename rename) {
  const auto& xs = spec.first_stage_vars;
  std::vector<std::string> ys;
  for (const auto& y : spec.second_stage_vars) {
    ys.push_back(rename(y));
    m.variables.push_back(Variable{ys.back()});
  }
  for (std::size_t j = 0; j < ys.size(); ++j)
    if (double w = weight * s.q[j]; w != 0.0) m.objective.expr.add(ys[j], w);
  for (std::size_t r = 0; r < spec.second_stage_rows.size(); ++r) {
    Constraint c;
    c.name = rename(spec.second_stage_rows[r]);
    for (std::size_t j = 0; j < xs.size(); ++j)
      if (s.B[r][j] != 0.0) c.lhs.add(xs[j], -s.B[r][j]);
    for (std::size_t j = 0; j < ys.size(); ++j)
      if (s.D[r][j] != 0.0) c.lhs.add(ys[j], s.D[r][j]);
    c.sense = spec.second_stage_senses.empty() ? Sense::eq : spec.second_stage_senses[r];
    c.rhs = s.d[r];
    m.constraints.push_back(std::move(c));
  }
}

}  // namespace

NormalDist RhsDistribution::normal() const {
  if (family != "normal" || params.size() != 2)
    throw UnsupportedRandomness("right-hand side distribution '" + family + "' is not a normal(mu, sigma)");
  return NormalDist{params[0], params[1]};
}

void validate(const TwoStageSpec& spec) {
  const std::size_t nx = spec.first_stage_vars.size();
  const std::size_t ny = spec.second_stage_vars.size();
  const std::size_t m2 = spec.second_stage_rows.size();
  check_names(spec.first_stage_vars, "first-stage variable");
  check_names(spec.second_stage_vars, "second-stage variable");
  for (const auto& x : spec.first_stage_vars)
    for (const auto& y : spec.second_stage_vars)
      if (x == y) throw ValidationError("variable '" + x + "' appears in both stages");
  check_width(spec.c, nx, "first-stage cost vector");
  check_rows(spec.first_stage_rows, nx, "first-stage");
  check_names(spec.second_stage_rows, "second-stage row");
  if (!spec.second_stage_senses.empty() && spec.second_stage_senses.size() != m2)
    throw DimensionMismatch("second-stage senses do not match the number of second-stage rows");
  if (spec.scenarios.empty()) throw DimensionMismatch("at least one scenario is required");

  double total = 0.0;
  for (std::size_t i = 0; i < spec.scenarios.size(); ++i) {
    const auto& s = spec.scenarios[i];
    const std::string where = "scenario " + std::to_string(i + 1);
    if (!(s.probability >= 0.0)) throw ProbabilityError(where + " has a negative probability");
    total += s.probability;
    check_width(s.q, ny, where + " q");
    check_width(s.d, m2, where + " d");
    if (s.D.size() != m2) throw DimensionMismatch(where + " D has the wrong number of rows");
    if (s.B.size() != m2) throw DimensionMismatch(where + " B has the wrong number of rows");
    for (const auto& r : s.D) check_width(r, ny, where + " D row");
    for (const auto& r : s.B) check_width(r, nx, where + " B row");
  }
  if (std::abs(total - 1.0) > kProbabilityTol)
    throw ProbabilityError("scenario probabilities sum to " + format_number(total) + ", not 1");
  if (spec.deterministic && spec.scenarios.size() != 1)
    throw ProbabilityError("a deterministic two-stage spec has exactly one scenario");
}

void validate(const ChanceSpec& spec) {
  check_names(spec.vars, "variable");
  check_width(spec.c, spec.vars.size(), "cost vector");
  check_rows(spec.rows, spec.vars.size(), "deterministic");
  std::set<std::string> seen;
  for (const auto& r : spec.rows) seen.insert(r.name);
  for (const auto& r : spec.chance_rows) {
    if (!is_identifier(r.name)) throw ValidationError("chance row name '" + r.name + "' is not an identifier");
    if (!seen.insert(r.name).second) throw ValidationError("duplicate row '" + r.name + "'");
    check_width(r.coefs, spec.vars.size(), "chance row '" + r.name + "'");
    if (!(r.alpha > 0.0 && r.alpha < 1.0)) throw DomainError("chance row '" + r.name + "' needs 0 < alpha < 1");
    if (r.rhs.family == "normal" && (r.rhs.params.size() != 2 || !(r.rhs.params[1] > 0.0)))
      throw DomainError("chance row '" + r.name + "' needs normal(mu, sigma) with sigma > 0");
  }
  if (spec.joint && !(spec.joint_alpha > 0.0 && spec.joint_alpha < 1.0))
    throw DomainError("joint chance level needs 0 < alpha < 1");
}

std::string scenario_name(const std::string& base, std::size_t scenario_index) {
  return base + "__s" + std::to_string(scenario_index);
}

Model build_extensive_form(const TwoStageSpec& spec) {
  validate(spec);
  if (spec.deterministic) throw ValidationError("build_extensive_form expects a stochastic spec; use flatten_dlp2");
  Model m = first_stage(spec.first_stage_vars, spec.c, spec.first_stage_rows);
  for (std::size_t i = 0; i < spec.scenarios.size(); ++i) {
    const auto& s = spec.scenarios[i];
    add_scenario(m, spec, s, s.probability, [i](const std::string& n) { return scenario_name(n, i + 1); });
  }
  return m;
}

Model flatten_dlp2(const TwoStageSpec& spec) {
  validate(spec);
  if (!spec.deterministic) throw ValidationError("flatten_dlp2 expects a deterministic spec");
  Model m = first_stage(spec.first_stage_vars, spec.c, spec.first_stage_rows);
  add_scenario(m, spec, spec.scenarios.front(), 1.0, [](const std::string& n) { return n; });
  return m;
}

Model reformulate_individual_chance(const ChanceSpec& spec) {
  if (spec.joint) throw JointNotSupported("joint chance constraints are representable but not reformulated");
  validate(spec);
  Model m = first_stage(spec.vars, spec.c, spec.rows);
  for (const auto& r : spec.chance_rows) {
    if (r.random_coefficients)
      throw UnsupportedRandomness("chance row '" + r.name + "' has random coefficients");
    NormalDist dist = r.rhs.normal();
    const double z = normal_quantile(r.alpha);
    switch (r.sense) {
      case Sense::ge: add_row(m, r.name, spec.vars, r.coefs, Sense::ge, dist.mu + z * dist.sigma); break;
      case Sense::le: add_row(m, r.name, spec.vars, r.coefs, Sense::le, dist.mu - z * dist.sigma); break;
      case Sense::eq:
        throw UnsupportedRandomness("chance row '" + r.name + "' is an equality with a continuous right-hand side");
    }
  }
  return m;
}

Model compile_spec(const CompactSpec& spec) {
  if (const auto* ts = std::get_if<TwoStageSpec>(&spec))
    return ts->deterministic ? flatten_dlp2(*ts) : build_extensive_form(*ts);
  return reformulate_individual_chance(std::get<ChanceSpec>(spec));
}

}  // namespace stochbench
