#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "stochbench/model.hpp"
#include "stochbench/pipeline.hpp"
#include "stochbench/runner.hpp"
#include "stochbench/softscore.hpp"
#include "stochbench/solver.hpp"

namespace stochbench {

inline const std::array<std::string_view, 4> kCategories{"SLP-2", "DLP-2", "JointChance", "IndividualChance"};

struct ProblemInstance {
  std::string id;
  std::string category;
  int instance_index = 1;
  std::string description;
  std::filesystem::path dir;
  std::string truth_file;  // "truth.lp" or "truth.spec"
  Model truth;
  Solution reference;
};

// problems/<category>/<id>/{description.md, truth.lp | truth.spec, meta.json}.
// Sorted by category order, instance index, then id. Throws CorpusError.
std::vector<ProblemInstance> ingest_corpus(const std::filesystem::path& root);
ProblemInstance load_problem(const std::filesystem::path& dir);

struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<std::string> models;
  std::vector<Method> methods;
  int runs = 10;
  double temperature = 0.0;
  bool allow_nonzero_temperature = false;
  int max_tokens = 4096;
  int n_reviewers = 4;
  int workers = 4;
  std::vector<std::string> problems;  // empty selects the whole corpus
  std::filesystem::path corpus_dir = "problems";
  std::filesystem::path output_dir = "runs";
  std::filesystem::path code_example;  // empty uses the shipped starter
  RunnerConfig runner;
  ClientConfig client;
};

// Relative paths are resolved against the directory of the config file.
// Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& cfg);

struct RunRecord {
  std::string problem;
  std::string category;
  int instance_index = 1;
  std::string model;
  std::string method;
  int run = 1;

  RunClass classification = RunClass::runtime_error;
  std::string detail;
  std::string pipeline_error;
  std::string transcript;  // relative to the experiment directory
  ScoreReport score;
  double pipeline_seconds = 0.0;
  double execute_seconds = 0.0;

  std::string cell_key() const;
};

nlohmann::json to_json(const RunRecord& r);
// Timings are omitted when `with_timings` is false.
nlohmann::json to_json(const RunRecord& r, bool with_timings);
RunRecord run_record_from_json(const nlohmann::json& j);
// Skips a truncated final line; throws ParseError on other malformed lines.
std::vector<RunRecord> read_records(const std::filesystem::path& jsonl);

std::filesystem::path experiment_dir(const ExperimentConfig& cfg);

// Description, starter code (the shipped one when `code_example` is empty) and
// the category instruction text, each without trailing whitespace.
PromptInputs prompt_inputs(const ProblemInstance& p, const std::filesystem::path& code_example = {});

// Every (problem, model, method, run) cell. Cells already present in
// records.jsonl are skipped; new records are appended in cell order by a
// single writer. Per-cell failures become records; only config and corpus
// problems are thrown. Returns all records of the experiment in cell order.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, const std::vector<ProblemInstance>& corpus,
                                      ChatClient& client, const TemplateRegistry& templates);

inline const std::array<std::string_view, 5> kGroupKeys{"model", "method", "category", "instance", "run"};

// Metrics are summed as integers in units of 1e-9, so combining groups is
// exact and independent of order.
inline constexpr double kQuantum = 1e-9;

struct GroupRow {
  std::vector<std::string> key;
  std::int64_t count = 0;
  std::array<std::int64_t, 8> sums{};

  std::array<double, 8> means() const;
  friend bool operator==(const GroupRow&, const GroupRow&) = default;
};

struct MetricAggregate {
  std::vector<std::string> keys;
  std::vector<GroupRow> rows;  // sorted by key

  friend bool operator==(const MetricAggregate&, const MetricAggregate&) = default;
};

std::string group_value(const RunRecord& r, std::string_view key);
// Throws ConfigError for unknown keys and ValidationError on empty input.
MetricAggregate aggregate(const std::vector<RunRecord>& records, const std::vector<std::string>& keys);
// Count-weighted union of two aggregates over the same keys.
MetricAggregate combine(const MetricAggregate& a, const MetricAggregate& b);

std::string to_csv(const MetricAggregate& agg);
nlohmann::json to_json(const MetricAggregate& agg);
MetricAggregate aggregate_from_json(const nlohmann::json& j);

// Writes <name>.csv and <name>.json for the standard groupings plus
// plot_data.json into `dir`. Returns the written files.
std::vector<std::filesystem::path> emit_report(const std::vector<RunRecord>& records, const std::filesystem::path& dir);

// Parses "model", "method+category" and similar.
std::vector<std::string> parse_group_keys(std::string_view text);

}  // namespace stochbench
