#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <unistd.h>

#include "stochbench/detequiv.hpp"
#include "stochbench/errors.hpp"
#include "stochbench/harness.hpp"
#include "stochbench/lp_format.hpp"
#include "stochbench/softscore.hpp"
#include "stochbench/solver.hpp"
#include "stochbench/spec_format.hpp"

using namespace stochbench;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json solution_json(const Solution& s) {
  json j = {{"status", std::string(to_string(s.status))}, {"values", s.values}};
  j["objective"] = s.values.empty() ? json(nullptr) : json(s.objective);
  return j;
}

std::vector<RunRecord> run_once(ExperimentConfig cfg, const fs::path& report_dir) {
  auto corpus = ingest_corpus(cfg.corpus_dir);
  auto templates = TemplateRegistry::load_default();
  auto client = make_client(cfg.client);
  auto records = run_experiment(cfg, corpus, *client, templates);
  emit_report(records, report_dir);
  return records;
}

bool same_file(const fs::path& a, const fs::path& b) {
  return fs::exists(a) && fs::exists(b) && read_text_file(a) == read_text_file(b);
}

int cmd_replay_verify(const fs::path& config_path) {
  auto cfg = load_config(config_path);
  cfg.client.mode = ClientMode::replay;
  const auto base = fs::temp_directory_path() / ("stochbench_verify_" + std::to_string(::getpid()));
  fs::remove_all(base);
  std::vector<std::vector<RunRecord>> passes;
  for (const char* pass : {"a", "b"}) {
    auto c = cfg;
    c.output_dir = base / pass;
    passes.push_back(run_once(c, experiment_dir(c) / "report"));
  }
  bool ok = passes[0].size() == passes[1].size();
  for (std::size_t i = 0; ok && i < passes[0].size(); ++i)
    ok = to_json(passes[0][i], false) == to_json(passes[1][i], false);
  std::cout << (ok ? "records identical" : "records differ") << " (" << passes[0].size() << " cells)\n";
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(base / "a" / cfg.name / "report")) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    bool same = same_file(f, base / "b" / cfg.name / "report" / f.filename());
    ok = ok && same;
    std::cout << (same ? "same   " : "DIFFERS") << "  " << f.filename().string() << '\n';
  }
  fs::remove_all(base);
  std::cout << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluation harness for LLM formulations of stochastic optimization problems"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment and write its report");
  std::string config, mode;
  run->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--mode", mode, "Chat client mode")->check(CLI::IsMember({"live", "record", "replay"}));

  auto* score = app.add_subcommand("score", "Score a generated LP against a ground-truth LP");
  std::string truth_lp, gen_lp;
  score->add_option("--truth", truth_lp)->required()->check(CLI::ExistingFile);
  score->add_option("--generated", gen_lp)->required()->check(CLI::ExistingFile);

  auto* reform = app.add_subcommand("reformulate", "Compile a compact spec to an LP file");
  std::string spec_path, out_lp;
  reform->add_option("--spec", spec_path)->required()->check(CLI::ExistingFile);
  reform->add_option("--out", out_lp)->required();

  auto* solve_cmd = app.add_subcommand("solve", "Solve an LP file with the embedded solver");
  std::string lp_path;
  solve_cmd->add_option("--lp", lp_path)->required()->check(CLI::ExistingFile);

  auto* report = app.add_subcommand("report", "Aggregate a records file");
  std::string records_path, group_by = "model", out_dir;
  report->add_option("--records", records_path)->required()->check(CLI::ExistingFile);
  report->add_option("--group-by", group_by, "Keys joined by '+': model, method, category, instance, run");
  report->add_option("--out", out_dir, "Also write the full report into this directory");

  auto* verify = app.add_subcommand("replay-verify", "Run twice in replay mode and compare the outputs");
  std::string verify_config = "configs/replay_demo.json";
  verify->add_option("--config", verify_config)->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      auto cfg = load_config(config);
      if (!mode.empty()) cfg.client.mode = parse_client_mode(mode);
      auto dir = experiment_dir(cfg);
      auto records = run_once(cfg, dir / "report");
      std::map<std::string, int> kinds;
      for (const auto& r : records) ++kinds[std::string(to_string(r.score.error_kind))];
      std::cout << records.size() << " records in " << (dir / "records.jsonl").string() << '\n';
      for (const auto& [k, n] : kinds) std::cout << "  error_kind " << k << ": " << n << '\n';
      std::cout << to_csv(aggregate(records, {"method"}));
    } else if (score->parsed()) {
      auto truth = read_lp_file(truth_lp);
      auto gen = read_lp_file(gen_lp);
      validate(truth);
      validate(gen);
      std::optional<Solution> ts, gs;
      try {
        ts = solve(truth);
        gs = solve(gen);
      } catch (const NumericBreakdown& e) {
        std::cerr << "warning: " << e.what() << '\n';
      }
      std::cout << to_json(score_models(truth, gen, ts, gs)).dump(2) << '\n';
    } else if (reform->parsed()) {
      write_lp_file(out_lp, compile_spec(read_spec_file(spec_path)));
    } else if (solve_cmd->parsed()) {
      auto m = read_lp_file(lp_path);
      validate(m);
      std::cout << solution_json(solve(m)).dump(2) << '\n';
    } else if (report->parsed()) {
      auto records = read_records(records_path);
      std::cout << to_csv(aggregate(records, parse_group_keys(group_by)));
      if (!out_dir.empty()) emit_report(records, out_dir);
    } else if (verify->parsed()) {
      return cmd_replay_verify(verify_config);
    }
  } catch (const CorpusError& e) {
    std::cerr << "corpus error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
