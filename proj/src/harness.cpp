#include "stochbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "stochbench/errors.hpp"
#include "stochbench/lp_format.hpp"
#include "stochbench/spec_format.hpp"

namespace stochbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim_trailing(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

bool known_category(std::string_view c) {
  return std::find(kCategories.begin(), kCategories.end(), c) != kCategories.end();
}

int category_rank(std::string_view c) {
  return static_cast<int>(std::find(kCategories.begin(), kCategories.end(), c) - kCategories.begin());
}

}  // namespace

ProblemInstance load_problem(const fs::path& dir) {
  ProblemInstance p;
  p.dir = dir;
  p.id = dir.filename().string();

  const auto desc = dir / "description.md";
  if (!fs::is_regular_file(desc)) throw CorpusError(desc.string(), "missing description");
  p.description = trim_trailing(read_text_file(desc));
  if (p.description.empty()) throw CorpusError(desc.string(), "empty description");

  const auto meta_path = dir / "meta.json";
  if (!fs::is_regular_file(meta_path)) throw CorpusError(meta_path.string(), "missing meta.json");
  try {
    auto meta = json::parse(read_text_file(meta_path));
    p.category = meta.at("category").get<std::string>();
    p.instance_index = meta.at("instance_index").get<int>();
  } catch (const json::exception& e) {
    throw CorpusError(meta_path.string(), e.what());
  }
  if (!known_category(p.category)) throw CorpusError(meta_path.string(), "unknown category '" + p.category + "'");
  if (p.instance_index < 1) throw CorpusError(meta_path.string(), "instance_index must be positive");
  if (known_category(dir.parent_path().filename().string()) && dir.parent_path().filename() != p.category)
    throw CorpusError(meta_path.string(), "category does not match the directory");

  const bool has_lp = fs::is_regular_file(dir / "truth.lp");
  const bool has_spec = fs::is_regular_file(dir / "truth.spec");
  if (has_lp == has_spec)
    throw CorpusError(dir.string(), has_lp ? "both truth.lp and truth.spec present" : "missing truth.lp or truth.spec");
  p.truth_file = has_lp ? "truth.lp" : "truth.spec";
  const auto truth_path = dir / p.truth_file;
  try {
    p.truth = has_lp ? read_lp_file(truth_path.string()) : compile_spec(read_spec_file(truth_path.string()));
    validate(p.truth);
    p.reference = solve(p.truth);
  } catch (const Error& e) {
    throw CorpusError(truth_path.string(), e.what());
  }
  if (p.reference.status != SolveStatus::optimal)
    throw CorpusError(truth_path.string(), "ground truth is " + std::string(to_string(p.reference.status)));
  return p;
}

std::vector<ProblemInstance> ingest_corpus(const fs::path& root) {
  if (!fs::is_directory(root)) throw CorpusError(root.string(), "not a directory");
  std::vector<ProblemInstance> out;
  std::set<std::string> ids;
  std::vector<fs::path> dirs;
  for (const auto& cat : fs::directory_iterator(root)) {
    if (!cat.is_directory()) continue;
    if (!known_category(cat.path().filename().string()))
      throw CorpusError(cat.path().string(), "unknown category directory");
    for (const auto& inst : fs::directory_iterator(cat.path()))
      if (inst.is_directory()) dirs.push_back(inst.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) {
    auto p = load_problem(d);
    if (!ids.insert(p.id).second) throw CorpusError(d.string(), "duplicate problem id '" + p.id + "'");
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(), [](const ProblemInstance& a, const ProblemInstance& b) {
    return std::tuple(category_rank(a.category), a.instance_index, a.id) <
           std::tuple(category_rank(b.category), b.instance_index, b.id);
  });
  return out;
}

namespace {

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return (base / p).lexically_normal();
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [k, v] : j.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError("unknown key '" + k + "' in " + where);
}

}  // namespace

ExperimentConfig parse_config(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  check_keys(j,
             {"name", "models", "methods", "runs", "temperature", "allow_nonzero_temperature", "max_tokens",
              "n_reviewers", "workers", "problems", "corpus", "output_dir", "code_example", "mode", "client", "runner"},
             "config");
  ExperimentConfig cfg;
  try {
    cfg.name = j.value("name", cfg.name);
    cfg.models = j.at("models").get<std::vector<std::string>>();
    for (const auto& m : j.at("methods").get<std::vector<std::string>>()) cfg.methods.push_back(parse_method(m));
    cfg.runs = j.value("runs", cfg.runs);
    cfg.temperature = j.value("temperature", cfg.temperature);
    cfg.allow_nonzero_temperature = j.value("allow_nonzero_temperature", false);
    cfg.max_tokens = j.value("max_tokens", cfg.max_tokens);
    cfg.n_reviewers = j.value("n_reviewers", cfg.n_reviewers);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.problems = j.value("problems", cfg.problems);
    cfg.corpus_dir = resolve(base_dir, j.value("corpus", cfg.corpus_dir.string()));
    cfg.output_dir = resolve(base_dir, j.value("output_dir", cfg.output_dir.string()));
    if (j.contains("code_example")) cfg.code_example = resolve(base_dir, j["code_example"].get<std::string>());
    if (j.contains("mode")) cfg.client.mode = parse_client_mode(j["mode"].get<std::string>());
    if (j.contains("client")) {
      const auto& c = j["client"];
      check_keys(c,
                 {"endpoint", "api_key_env", "fixtures", "max_attempts", "backoff_s", "requests_per_minute",
                  "timeout_s"},
                 "client");
      cfg.client.endpoint = c.value("endpoint", cfg.client.endpoint);
      cfg.client.api_key_env = c.value("api_key_env", cfg.client.api_key_env);
      cfg.client.max_attempts = c.value("max_attempts", cfg.client.max_attempts);
      cfg.client.backoff_s = c.value("backoff_s", cfg.client.backoff_s);
      cfg.client.requests_per_minute = c.value("requests_per_minute", cfg.client.requests_per_minute);
      cfg.client.timeout_s = c.value("timeout_s", cfg.client.timeout_s);
      if (c.contains("fixtures")) cfg.client.fixture_dir = c["fixtures"].get<std::string>();
    }
    cfg.client.fixture_dir = resolve(base_dir, cfg.client.fixture_dir);
    if (j.contains("runner")) {
      const auto& r = j["runner"];
      check_keys(r, {"check_cmd", "run_cmd", "timeout_s", "script_name"}, "runner");
      cfg.runner.check_cmd = r.value("check_cmd", cfg.runner.check_cmd);
      cfg.runner.run_cmd = r.value("run_cmd", cfg.runner.run_cmd);
      cfg.runner.timeout_s = r.value("timeout_s", cfg.runner.timeout_s);
      cfg.runner.script_name = r.value("script_name", cfg.runner.script_name);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.name.empty() || cfg.name.find('/') != std::string::npos) throw ConfigError("name must be a plain file name");
  if (cfg.models.empty()) throw ConfigError("at least one model is required");
  if (cfg.methods.empty()) throw ConfigError("at least one prompting method is required");
  if (cfg.runs < 1) throw ConfigError("runs must be at least 1");
  if (cfg.workers < 1) throw ConfigError("workers must be at least 1");
  if (cfg.n_reviewers < 1) throw ConfigError("n_reviewers must be at least 1");
  if (cfg.temperature != 0.0 && !cfg.allow_nonzero_temperature)
    throw ConfigError("temperature must be 0 unless allow_nonzero_temperature is set");
  if (cfg.runner.run_cmd.empty()) throw ConfigError("runner.run_cmd is empty");
  if (cfg.runner.timeout_s <= 0) throw ConfigError("runner.timeout_s must be positive");
}

std::string RunRecord::cell_key() const {
  return problem + "/" + model + "/" + method + "/" + std::to_string(run);
}

json to_json(const RunRecord& r, bool with_timings) {
  json j = {{"problem", r.problem},
            {"category", r.category},
            {"instance_index", r.instance_index},
            {"model", r.model},
            {"method", r.method},
            {"run", r.run},
            {"classification", std::string(to_string(r.classification))},
            {"detail", r.detail},
            {"pipeline_error", r.pipeline_error},
            {"transcript", r.transcript},
            {"score", to_json(r.score)}};
  if (with_timings) j["timings"] = {{"pipeline_s", r.pipeline_seconds}, {"execute_s", r.execute_seconds}};
  return j;
}

json to_json(const RunRecord& r) { return to_json(r, true); }

RunRecord run_record_from_json(const json& j) {
  RunRecord r;
  r.problem = j.at("problem").get<std::string>();
  r.category = j.at("category").get<std::string>();
  r.instance_index = j.at("instance_index").get<int>();
  r.model = j.at("model").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.run = j.at("run").get<int>();
  r.classification = parse_run_class(j.at("classification").get<std::string>());
  r.detail = j.value("detail", "");
  r.pipeline_error = j.value("pipeline_error", "");
  r.transcript = j.value("transcript", "");
  r.score = score_report_from_json(j.at("score"));
  if (j.contains("timings")) {
    r.pipeline_seconds = j["timings"].value("pipeline_s", 0.0);
    r.execute_seconds = j["timings"].value("execute_s", 0.0);
  }
  return r;
}

std::vector<RunRecord> read_records(const fs::path& jsonl) {
  std::ifstream in(jsonl, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + jsonl.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  const bool complete_last = [&] {
    std::ifstream tail(jsonl, std::ios::binary | std::ios::ate);
    auto size = tail.tellg();
    if (size <= 0) return true;
    tail.seekg(-1, std::ios::end);
    return tail.get() == '\n';
  }();
  std::vector<RunRecord> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::string why;
    try {
      out.push_back(run_record_from_json(json::parse(lines[i])));
      continue;
    } catch (const json::exception& e) {
      why = e.what();
    } catch (const Error& e) {
      why = e.what();
    }
    if (i + 1 == lines.size() && !complete_last) break;
    throw ParseError(jsonl.string() + ": " + why, static_cast<int>(i + 1), 1);
  }
  return out;
}

fs::path experiment_dir(const ExperimentConfig& cfg) { return cfg.output_dir / cfg.name; }

PromptInputs prompt_inputs(const ProblemInstance& p, const fs::path& code_example) {
  PromptInputs in;
  in.problem_description = p.description;
  in.code_example =
      trim_trailing(read_text_file(code_example.empty() ? asset_dir() / "prompts" / "code_example.py" : code_example));
  in.instructions = trim_trailing(read_text_file(asset_dir() / "instructions" / (p.category + ".md")));
  return in;
}

namespace {

std::string safe_name(const std::string& s) {
  std::string out;
  for (char ch : s) out.push_back(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' ? ch : '_');
  return out;
}

struct Cell {
  const ProblemInstance* problem;
  std::string model;
  Method method;
  int run;

  std::string key() const {
    return problem->id + "/" + model + "/" + std::string(to_string(method)) + "/" + std::to_string(run);
  }
  std::string file_stem() const {
    return safe_name(problem->id) + "__" + safe_name(model) + "__" + std::string(to_string(method)) + "__r" +
           std::to_string(run);
  }
};

void write_atomic(const fs::path& p, const std::string& text) {
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << text;
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, p);
}

RunRecord run_cell(const Cell& cell, const ExperimentConfig& cfg, const fs::path& dir, ChatClient& client,
                   const TemplateRegistry& templates, const PromptInputs& inputs) {
  RunRecord rec;
  rec.problem = cell.problem->id;
  rec.category = cell.problem->category;
  rec.instance_index = cell.problem->instance_index;
  rec.model = cell.model;
  rec.method = std::string(to_string(cell.method));
  rec.run = cell.run;

  PipelineConfig pc{cell.model, cfg.temperature, cfg.max_tokens, cfg.n_reviewers};
  const auto t0 = std::chrono::steady_clock::now();
  MethodResult result;
  try {
    result = run_method(cell.method, inputs, client, pc, templates);
  } catch (const ClientError& e) {
    rec.pipeline_error = std::string("ClientError: ") + e.what();
  } catch (const FixtureMiss& e) {
    rec.pipeline_error = std::string("FixtureMiss: ") + e.what();
  } catch (const EmptyCompletion& e) {
    rec.pipeline_error = std::string("EmptyCompletion: ") + e.what();
  }
  rec.pipeline_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!rec.pipeline_error.empty()) {
    rec.classification = RunClass::runtime_error;
    rec.score = error_report(ErrorKind::runtime);
    return rec;
  }

  rec.transcript = "transcripts/" + cell.file_stem() + ".json";
  json tj = to_json(result.transcript);
  tj["final_code"] = result.final_code;
  write_atomic(dir / rec.transcript, tj.dump(2) + "\n");

  auto outcome = execute_candidate(result.final_code, dir / "work" / cell.file_stem(), cfg.runner);
  rec.execute_seconds = outcome.duration;
  rec.classification = outcome.classification;
  rec.detail = outcome.detail;
  if (outcome.classification != RunClass::ok) {
    rec.score = error_report(error_kind_of(outcome.classification));
    return rec;
  }
  try {
    rec.score = score_models(cell.problem->truth, *outcome.model, cell.problem->reference, outcome.solution);
  } catch (const Error& e) {
    rec.classification = RunClass::runtime_error;
    rec.detail = std::string("scoring failed: ") + e.what();
    rec.score = error_report(ErrorKind::runtime);
  }
  return rec;
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, const std::vector<ProblemInstance>& corpus,
                                      ChatClient& client, const TemplateRegistry& templates) {
  validate(cfg);
  if (cfg.temperature != 0.0)
    std::cerr << "warning: temperature " << cfg.temperature << " makes runs non-reproducible\n";

  std::vector<const ProblemInstance*> selected;
  if (cfg.problems.empty()) {
    for (const auto& p : corpus) selected.push_back(&p);
  } else {
    for (const auto& id : cfg.problems) {
      auto it = std::find_if(corpus.begin(), corpus.end(), [&](const ProblemInstance& p) { return p.id == id; });
      if (it == corpus.end()) throw ConfigError("problem '" + id + "' is not in the corpus");
      selected.push_back(&*it);
    }
  }

  std::map<std::string, PromptInputs> inputs;
  for (const auto* p : selected) inputs[p->id] = prompt_inputs(*p, cfg.code_example);

  std::vector<Cell> cells;
  for (const auto* p : selected)
    for (const auto& model : cfg.models)
      for (auto method : cfg.methods)
        for (int run = 1; run <= cfg.runs; ++run) cells.push_back({p, model, method, run});

  const fs::path dir = experiment_dir(cfg);
  fs::create_directories(dir / "transcripts");
  fs::create_directories(dir / "work");
  const fs::path records_path = dir / "records.jsonl";

  std::map<std::string, RunRecord> done;
  if (fs::exists(records_path)) {
    auto existing = read_records(records_path);
    std::string clean;
    for (const auto& r : existing) {
      clean += to_json(r).dump() + "\n";
      done.emplace(r.cell_key(), r);
    }
    write_atomic(records_path, clean);
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (!done.count(cells[i].key())) pending.push_back(i);

  std::ofstream sink(records_path, std::ios::binary | std::ios::app);
  if (!sink) throw Error("cannot open " + records_path.string());
  std::mutex write_mu;
  std::map<std::size_t, RunRecord> reorder;
  std::size_t next_to_write = 0;
  std::atomic<std::size_t> next_task{0};
  std::atomic<bool> abort{false};
  std::exception_ptr fatal;

  auto worker = [&] {
    for (;;) {
      if (abort) return;
      std::size_t slot = next_task++;
      if (slot >= pending.size()) return;
      const Cell& cell = cells[pending[slot]];
      RunRecord rec;
      try {
        rec = run_cell(cell, cfg, dir, client, templates, inputs.at(cell.problem->id));
      } catch (...) {
        std::lock_guard lock(write_mu);
        if (!fatal) fatal = std::current_exception();
        abort = true;
        return;
      }
      std::lock_guard lock(write_mu);
      reorder.emplace(slot, std::move(rec));
      while (!reorder.empty() && reorder.begin()->first == next_to_write) {
        auto& r = reorder.begin()->second;
        sink << to_json(r).dump() << '\n';
        sink.flush();
        done.emplace(r.cell_key(), std::move(r));
        reorder.erase(reorder.begin());
        ++next_to_write;
      }
    }
  };

  const int n = std::max(1, std::min<int>(cfg.workers, static_cast<int>(pending.size())));
  std::vector<std::thread> pool;
  for (int k = 0; k < n; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (fatal) std::rethrow_exception(fatal);

  std::vector<RunRecord> out;
  for (const auto& c : cells) out.push_back(done.at(c.key()));
  return out;
}

std::array<double, 8> GroupRow::means() const {
  std::array<double, 8> m{};
  for (std::size_t k = 0; k < m.size(); ++k)
    m[k] = count ? static_cast<double>(sums[k]) / static_cast<double>(count) / 1e9 : 0.0;
  return m;
}

std::string group_value(const RunRecord& r, std::string_view key) {
  if (key == "model") return r.model;
  if (key == "method") return r.method;
  if (key == "category") return r.category;
  if (key == "instance") return r.problem;
  if (key == "run") return std::to_string(r.run);
  throw ConfigError("unknown grouping key '" + std::string(key) + "'");
}

namespace {

bool key_less(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
    if (a[k] == b[k]) continue;
    auto numeric = [](const std::string& s) {
      return !s.empty() && s.size() < 18 && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if (numeric(a[k]) && numeric(b[k])) return std::stoll(a[k]) < std::stoll(b[k]);
    return a[k] < b[k];
  }
  return a.size() < b.size();
}

void sort_rows(MetricAggregate& agg) {
  std::sort(agg.rows.begin(), agg.rows.end(), [](const GroupRow& x, const GroupRow& y) { return key_less(x.key, y.key); });
}

}  // namespace

MetricAggregate aggregate(const std::vector<RunRecord>& records, const std::vector<std::string>& keys) {
  for (const auto& k : keys)
    if (std::find(kGroupKeys.begin(), kGroupKeys.end(), k) == kGroupKeys.end())
      throw ConfigError("unknown grouping key '" + k + "'");
  if (records.empty()) throw ValidationError("cannot aggregate an empty record set");
  std::map<std::vector<std::string>, GroupRow> groups;
  for (const auto& r : records) {
    std::vector<std::string> key;
    for (const auto& k : keys) key.push_back(group_value(r, k));
    auto& row = groups[key];
    row.key = key;
    ++row.count;
    auto values = metric_values(r.score);
    for (std::size_t m = 0; m < values.size(); ++m) row.sums[m] += std::llround(values[m] / kQuantum);
  }
  MetricAggregate agg;
  agg.keys = keys;
  for (auto& [k, row] : groups) agg.rows.push_back(std::move(row));
  sort_rows(agg);
  return agg;
}

MetricAggregate combine(const MetricAggregate& a, const MetricAggregate& b) {
  if (a.keys != b.keys) throw ValidationError("cannot combine aggregates over different keys");
  std::map<std::vector<std::string>, GroupRow> groups;
  for (const auto* agg : {&a, &b})
    for (const auto& row : agg->rows) {
      auto& g = groups[row.key];
      g.key = row.key;
      g.count += row.count;
      for (std::size_t m = 0; m < g.sums.size(); ++m) g.sums[m] += row.sums[m];
    }
  MetricAggregate out;
  out.keys = a.keys;
  for (auto& [k, row] : groups) out.rows.push_back(std::move(row));
  sort_rows(out);
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const MetricAggregate& agg) {
  std::ostringstream out;
  for (const auto& k : agg.keys) out << k << ',';
  out << "count";
  for (auto name : kMetricNames) out << ',' << name;
  out << '\n';
  for (const auto& row : agg.rows) {
    for (const auto& v : row.key) out << csv_field(v) << ',';
    out << row.count;
    for (double m : row.means()) out << ',' << format_number(m);
    out << '\n';
  }
  return out.str();
}

json to_json(const MetricAggregate& agg) {
  json rows = json::array();
  for (const auto& row : agg.rows) {
    json means = json::object();
    auto m = row.means();
    for (std::size_t k = 0; k < m.size(); ++k) means[std::string(kMetricNames[k])] = m[k];
    rows.push_back({{"key", row.key}, {"count", row.count}, {"sums", row.sums}, {"means", means}});
  }
  json metrics = json::array();
  for (auto name : kMetricNames) metrics.push_back(std::string(name));
  return {{"keys", agg.keys}, {"metrics", metrics}, {"quantum", kQuantum}, {"rows", rows}};
}

MetricAggregate aggregate_from_json(const json& j) {
  MetricAggregate agg;
  try {
    agg.keys = j.at("keys").get<std::vector<std::string>>();
    for (const auto& r : j.at("rows")) {
      GroupRow row;
      row.key = r.at("key").get<std::vector<std::string>>();
      row.count = r.at("count").get<std::int64_t>();
      row.sums = r.at("sums").get<std::array<std::int64_t, 8>>();
      agg.rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("aggregate: ") + e.what(), 1, 1);
  }
  return agg;
}

std::vector<std::string> parse_group_keys(std::string_view text) {
  std::vector<std::string> keys;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t sep = text.find_first_of("+,", pos);
    if (sep == std::string_view::npos) sep = text.size();
    std::string k(text.substr(pos, sep - pos));
    if (std::find(kGroupKeys.begin(), kGroupKeys.end(), k) == kGroupKeys.end())
      throw ConfigError("unknown grouping key '" + k + "'");
    keys.push_back(k);
    pos = sep + 1;
  }
  return keys;
}

std::vector<fs::path> emit_report(const std::vector<RunRecord>& records, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  auto put = [&](const std::string& name, const std::string& text) {
    write_atomic(dir / name, text);
    written.push_back(dir / name);
  };
  const std::vector<std::vector<std::string>> groupings{
      {"model"}, {"method"}, {"category"}, {"instance"}, {"run"}, {"model", "category"}, {"method", "category"}};
  for (const auto& g : groupings) {
    std::string name = "by";
    for (const auto& k : g) name += "_" + k;
    auto agg = aggregate(records, g);
    put(name + ".csv", to_csv(agg));
    put(name + ".json", to_json(agg).dump(2) + "\n");
  }
  json plot = {{"per_model_per_category", to_json(aggregate(records, {"model", "category"}))},
               {"per_method_per_category", to_json(aggregate(records, {"method", "category"}))},
               {"per_instance", to_json(aggregate(records, {"category", "instance"}))},
               {"per_method_trend", to_json(aggregate(records, {"method", "run"}))},
               {"per_model_trend", to_json(aggregate(records, {"model", "run"}))}};
  put("plot_data.json", plot.dump(2) + "\n");
  return written;
}

}  // namespace stochbench
