#include "stochbench/runner.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "stochbench/errors.hpp"
#include "stochbench/lp_format.hpp"

namespace stochbench {

namespace fs = std::filesystem;

std::string_view to_string(RunClass c) {
  switch (c) {
    case RunClass::ok: return "ok";
    case RunClass::compile_error: return "compile_error";
    case RunClass::runtime_error: return "runtime_error";
    case RunClass::timeout: return "timeout";
  }
  return "runtime_error";
}

RunClass parse_run_class(std::string_view text) {
  for (auto c : {RunClass::ok, RunClass::compile_error, RunClass::runtime_error, RunClass::timeout})
    if (to_string(c) == text) return c;
  throw ValidationError("unknown run classification '" + std::string(text) + "'");
}

ErrorKind error_kind_of(RunClass c) {
  switch (c) {
    case RunClass::ok: return ErrorKind::none;
    case RunClass::compile_error: return ErrorKind::compile;
    case RunClass::runtime_error:
    case RunClass::timeout: return ErrorKind::runtime;
  }
  return ErrorKind::runtime;
}

namespace {

constexpr std::size_t kMaxCapture = 1 << 20;

struct ProcResult {
  bool timed_out = false;
  int exit_code = -1;
};

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') {
      out += "'\\''";
    } else {
      out.push_back(ch);
    }
  }
  return out + "'";
}

std::string expand(const std::string& tmpl, const fs::path& file) {
  std::string out;
  const std::string key = "{file}";
  std::size_t pos = 0;
  for (std::size_t hit; (hit = tmpl.find(key, pos)) != std::string::npos; pos = hit + key.size())
    out += tmpl.substr(pos, hit - pos) + shell_quote(file.string());
  return out + tmpl.substr(pos);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  std::string out(kMaxCapture, '\0');
  in.read(out.data(), static_cast<std::streamsize>(out.size()));
  out.resize(static_cast<std::size_t>(in.gcount()));
  return out;
}

ProcResult run_shell(const std::string& cmd, const fs::path& cwd, const fs::path& out, const fs::path& err,
                     double timeout_s) {
  const std::string cwd_s = cwd.string(), out_s = out.string(), err_s = err.string();
  pid_t pid = fork();
  if (pid < 0) throw Error("fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    if (chdir(cwd_s.c_str()) != 0) _exit(127);
    int in = open("/dev/null", O_RDONLY);
    int fo = open(out_s.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    int fe = open(err_s.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (in < 0 || fo < 0 || fe < 0) _exit(127);
    dup2(in, 0);
    dup2(fo, 1);
    dup2(fe, 2);
    execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);

  ProcResult r;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
  int status = 0;
  for (;;) {
    pid_t w = waitpid(pid, &status, WNOHANG);
    if (w == pid) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      killpg(pid, SIGKILL);
      waitpid(pid, &status, 0);
      r.timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  killpg(pid, SIGKILL);
  if (!r.timed_out) r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return r;
}

}  // namespace

Solution parse_solution_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("solution.json: ") + e.what(), 1, 1);
  }
  if (!j.is_object()) throw ParseError("solution.json: expected an object", 1, 1);
  Solution s;
  const auto& st = j.contains("status") ? j["status"] : nlohmann::json();
  std::optional<SolveStatus> status;
  if (st.is_string()) status = parse_status(st.get<std::string>());
  if (st.is_number_integer()) status = parse_status(std::to_string(st.get<long>()));
  if (!status) throw ParseError("solution.json: missing or unknown status", 1, 1);
  s.status = *status;
  if (!j.contains("objective")) throw ParseError("solution.json: missing objective", 1, 1);
  if (j["objective"].is_number()) {
    s.objective = j["objective"].get<double>();
  } else if (!j["objective"].is_null()) {
    throw ParseError("solution.json: objective must be a number or null", 1, 1);
  }
  if (!j.contains("values") || !j["values"].is_object()) throw ParseError("solution.json: missing values object", 1, 1);
  for (const auto& [name, v] : j["values"].items()) {
    if (!v.is_number()) throw ParseError("solution.json: value of '" + name + "' is not a number", 1, 1);
    s.values[name] = v.get<double>();
  }
  return s;
}

RunOutcome execute_candidate(const std::string& code, const fs::path& workdir, const RunnerConfig& cfg) {
  if (cfg.run_cmd.empty()) throw ConfigError("runner run_cmd is not configured");
  const auto start = std::chrono::steady_clock::now();
  RunOutcome out;
  auto finish = [&](RunClass c, std::string detail) {
    out.classification = c;
    out.detail = std::move(detail);
    out.duration = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  };

  fs::remove_all(workdir);
  fs::create_directories(workdir);
  const fs::path dir = fs::absolute(workdir);
  const fs::path script = dir / cfg.script_name;
  {
    std::ofstream f(script, std::ios::binary);
    f << code;
  }
  if (code.find_first_not_of(" \t\r\n") == std::string::npos) return finish(RunClass::compile_error, "empty program");

  if (!cfg.check_cmd.empty()) {
    auto r = run_shell(expand(cfg.check_cmd, script), dir, dir / "check.stdout", dir / "check.stderr", cfg.timeout_s);
    if (r.timed_out || r.exit_code != 0) {
      out.stdout_text = slurp(dir / "check.stdout");
      out.stderr_text = slurp(dir / "check.stderr");
      return finish(RunClass::compile_error, r.timed_out ? "check timed out" : "check exited with " + std::to_string(r.exit_code));
    }
  }

  auto r = run_shell(expand(cfg.run_cmd, script), dir, dir / "run.stdout", dir / "run.stderr", cfg.timeout_s);
  out.stdout_text = slurp(dir / "run.stdout");
  out.stderr_text = slurp(dir / "run.stderr");
  if (r.timed_out) return finish(RunClass::timeout, "wall clock limit reached");
  if (r.exit_code != 0) return finish(RunClass::runtime_error, "exited with " + std::to_string(r.exit_code));

  const fs::path lp = dir / "model.lp", sol = dir / "solution.json";
  if (!fs::exists(lp)) return finish(RunClass::runtime_error, "model.lp was not written");
  if (!fs::exists(sol)) return finish(RunClass::runtime_error, "solution.json was not written");
  try {
    out.model = read_lp_file(lp.string());
    validate(*out.model);
  } catch (const Error& e) {
    out.model.reset();
    return finish(RunClass::runtime_error, std::string("model.lp: ") + e.what());
  }
  try {
    out.solution = parse_solution_json(slurp(sol));
  } catch (const Error& e) {
    return finish(RunClass::runtime_error, e.what());
  }
  out.lp_artifact = lp;
  out.solution_artifact = sol;
  return finish(RunClass::ok, "");
}

}  // namespace stochbench
