#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "stochbench/model.hpp"
#include "stochbench/softscore.hpp"
#include "stochbench/solver.hpp"

namespace stochbench {

enum class RunClass { ok, compile_error, runtime_error, timeout };

std::string_view to_string(RunClass c);
RunClass parse_run_class(std::string_view text);
// timeout counts as a runtime error
ErrorKind error_kind_of(RunClass c);

// Shell command templates; "{file}" expands to the quoted absolute path of the
// candidate script. Commands run through /bin/sh with the workdir as cwd.
// Resource limits beyond the wall clock belong in these commands.
struct RunnerConfig {
  std::string check_cmd = "python3 -m py_compile {file}";
  std::string run_cmd = "python3 {file}";
  double timeout_s = 60.0;
  std::string script_name = "candidate.py";
};

struct RunOutcome {
  RunClass classification = RunClass::runtime_error;
  std::optional<std::filesystem::path> lp_artifact;
  std::optional<std::filesystem::path> solution_artifact;
  std::string stdout_text;
  std::string stderr_text;
  double duration = 0.0;
  std::string detail;

  std::optional<Model> model;
  std::optional<Solution> solution;
};

// Parses solution.json: {"status": name or Gurobi code, "objective": number
// or null, "values": {name: number}}. Throws ParseError.
Solution parse_solution_json(std::string_view text);

// Two phases: check_cmd (failure => compile_error), then run_cmd under the
// timeout (nonzero exit or a broken model.lp / solution.json =>
// runtime_error). `workdir` is wiped and recreated. Candidate failures are
// reported in the outcome, never thrown; ConfigError when run_cmd is empty.
RunOutcome execute_candidate(const std::string& code, const std::filesystem::path& workdir, const RunnerConfig& cfg);

}  // namespace stochbench
