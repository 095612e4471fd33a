#pragma once

#include <string>
#include <variant>
#include <vector>

#include "stochbench/model.hpp"

namespace stochbench {

using Matrix = std::vector<std::vector<double>>;

// One deterministic row over a fixed variable list: coefs . vars (sense) rhs.
struct Row {
  std::string name;
  std::vector<double> coefs;
  Sense sense = Sense::le;
  double rhs = 0.0;

  friend bool operator==(const Row&, const Row&) = default;
};

// One realization of (q, D, B, d) with its probability. Second-stage rows
// read  -B x + D y (sense) d.
struct Scenario {
  double probability = 1.0;
  std::vector<double> q;
  Matrix D;
  Matrix B;
  std::vector<double> d;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Two-stage linear program with a finite scenario set. With `deterministic`
// set it describes the perfect-information counterpart (a single scenario of
// probability one).
struct TwoStageSpec {
  std::vector<std::string> first_stage_vars;
  std::vector<double> c;
  std::vector<Row> first_stage_rows;

  std::vector<std::string> second_stage_vars;
  std::vector<std::string> second_stage_rows;
  // Empty means every second-stage row is an equality.
  std::vector<Sense> second_stage_senses;
  std::vector<Scenario> scenarios;

  bool deterministic = false;

  friend bool operator==(const TwoStageSpec&, const TwoStageSpec&) = default;
};

struct NormalDist {
  double mu = 0.0;
  double sigma = 1.0;

  friend bool operator==(const NormalDist&, const NormalDist&) = default;
};

// Distribution of a random right-hand side. Only the "normal" family (params
// mu, sigma) can be reformulated; other families are representable so that
// the error is raised at reformulation time, not at read time.
struct RhsDistribution {
  std::string family = "normal";
  std::vector<double> params;

  NormalDist normal() const;

  friend bool operator==(const RhsDistribution&, const RhsDistribution&) = default;
};

// coefs . x (sense) d~ must hold with probability >= alpha.
struct ChanceRow {
  std::string name;
  std::vector<double> coefs;
  Sense sense = Sense::ge;
  RhsDistribution rhs;
  double alpha = 0.95;
  bool random_coefficients = false;

  friend bool operator==(const ChanceRow&, const ChanceRow&) = default;
};

struct ChanceSpec {
  std::vector<std::string> vars;
  std::vector<double> c;
  std::vector<Row> rows;
  std::vector<ChanceRow> chance_rows;
  bool joint = false;
  // Used instead of the per-row levels when `joint` is set.
  double joint_alpha = 0.95;

  friend bool operator==(const ChanceSpec&, const ChanceSpec&) = default;
};

using CompactSpec = std::variant<TwoStageSpec, ChanceSpec>;

// Throws DimensionMismatch / ProbabilityError / ValidationError.
void validate(const TwoStageSpec& spec);
// Throws DimensionMismatch / DomainError / ValidationError.
void validate(const ChanceSpec& spec);

// Name of the scenario copy of a second-stage variable or row.
std::string scenario_name(const std::string& base, std::size_t scenario_index);

// Deterministic equivalent: first-stage variables unchanged, one copy
// `<y>__s<i>` of every second-stage variable per scenario (i counted from 1),
// objective c.x + sum_i p_i q_i . y_i, first-stage rows, and per scenario the
// rows -B_i x + D_i y_i (sense) d_i named `<row>__s<i>`.
Model build_extensive_form(const TwoStageSpec& spec);

// min c.x + q.y  s.t.  A x (sense) b,  -B x + D y (sense) d,  x, y >= 0.
Model flatten_dlp2(const TwoStageSpec& spec);

// Replaces each P(a.x >= d~) >= alpha by a.x >= mu + z(alpha) sigma (and the
// mirrored form for <=). Throws JointNotSupported or UnsupportedRandomness.
Model reformulate_individual_chance(const ChanceSpec& spec);

// Dispatches on the spec kind: flatten_dlp2, build_extensive_form or
// reformulate_individual_chance.
Model compile_spec(const CompactSpec& spec);

}  // namespace stochbench
