#pragma once

#include <string>
#include <string_view>

#include "stochbench/model.hpp"

namespace stochbench {

// Reads the LP-format subset:
//
//   Minimize | Maximize         objective, optionally prefixed by "name:"
//   Subject To                  [name:] expr (<=|=|>=) number
//   Bounds                      l <= x <= u | x >= l | x <= u | x = v | x free
//   Generals / Binaries         whitespace separated names
//   End
//
// Keywords are case-insensitive, "\" starts a comment, statements may span
// lines. Names carrying LP punctuation such as x[1,2] are mapped onto
// identifiers by replacing every other character with '_'.
//
// Throws ParseError (with line/column) or DuplicateName.
Model parse_lp(std::string_view text);

// Deterministic writer: Minimize/Maximize, Subject To, Bounds, Generals,
// Binaries, End; variables and constraints in declaration order; numbers with
// 12 significant digits. Variables that would otherwise not appear get an
// explicit Bounds line so that every declared variable survives a re-read.
std::string emit_lp(const Model& model);

Model read_lp_file(const std::string& path);
void write_lp_file(const std::string& path, const Model& model);

}  // namespace stochbench
