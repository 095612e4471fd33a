#pragma once

#include <string>
#include <string_view>

#include "stochbench/detequiv.hpp"

namespace stochbench {

// Compact stochastic specification files ("truth.spec"). Line oriented, '#'
// starts a comment, numbers are decimal or scientific.
//
//   problem two_stage
//   deterministic false
//   first_stage_vars x1 x2
//   cost 1 1
//   row budget: 1 1 <= 100            # coefficients follow first_stage_vars
//   second_stage_vars y1 y2
//   second_stage_rows dem1 dem2
//   second_stage_senses = >=          # optional, defaults to all '='
//   scenario 0.5                      # probability
//     q 2 2
//     D 1 0                           # one line per matrix row
//     D 0 1
//     B 1 0
//     B 0 1
//     d 10 20
//   end
//
//   problem chance
//   vars x1 x2
//   cost 1 1
//   row cap: 1 1 <= 500
//   chance storeA: 1 0 >= normal 100 10 alpha 0.95 [random_coefficients]
//   joint false
//   joint_alpha 0.95
//
// Throws ParseError with the offending line.
CompactSpec parse_spec(std::string_view text);

// Canonical writer; parse_spec(emit_spec(s)) == s for specs whose numbers
// survive 12 significant digits.
std::string emit_spec(const CompactSpec& spec);

CompactSpec read_spec_file(const std::string& path);

}  // namespace stochbench
