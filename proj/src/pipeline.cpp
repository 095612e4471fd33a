#include "stochbench/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <future>
#include <sstream>

#include "stochbench/errors.hpp"

namespace stochbench {

namespace fs = std::filesystem;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::standard_s: return "standard_s";
    case Method::cot_s: return "cot_s";
    case Method::cot_s2: return "cot_s2";
    case Method::cot_s_instructions: return "cot_s_instructions";
    case Method::agentic: return "agentic";
  }
  return "standard_s";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::standard_s, Method::cot_s, Method::cot_s2,
                                           Method::cot_s_instructions, Method::agentic};
  return methods;
}

Method parse_method(std::string_view text) {
  if (text == "cot_s_instruction") return Method::cot_s_instructions;
  for (auto m : all_methods())
    if (to_string(m) == text) return m;
  throw ConfigError("unknown prompting method '" + std::string(text) + "'");
}

namespace {

bool ident_char(char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; }

// Length of the identifier placeholder starting at `pos` (which holds '{'),
// including both braces, or 0.
std::size_t placeholder_at(std::string_view s, std::size_t pos) {
  std::size_t j = pos + 1;
  if (j >= s.size() || !(std::isalpha(static_cast<unsigned char>(s[j])) || s[j] == '_')) return 0;
  while (j < s.size() && ident_char(s[j])) ++j;
  if (j >= s.size() || s[j] != '}') return 0;
  return j - pos + 1;
}

struct TemplateInfo {
  const char* id;
  Method method;
  const char* role;
};

const std::vector<TemplateInfo>& known_templates() {
  static const std::vector<TemplateInfo> info{
      {"standard_s", Method::standard_s, "standard_s"},
      {"cot_s", Method::cot_s, "cot_s"},
      {"cot_s2.extract", Method::cot_s2, "extract"},
      {"cot_s2.formulate", Method::cot_s2, "formulate"},
      {"cot_s2.extensive", Method::cot_s2, "extensive"},
      {"cot_s_instructions.extract", Method::cot_s_instructions, "extract"},
      {"cot_s_instructions.formulate", Method::cot_s_instructions, "formulate"},
      {"cot_s_instructions.extensive", Method::cot_s_instructions, "extensive"},
      {"agentic.extractor", Method::agentic, "extractor"},
      {"agentic.formulator", Method::agentic, "formulator"},
      {"agentic.reviewer", Method::agentic, "reviewer"},
      {"agentic.updater", Method::agentic, "updater"},
  };
  return info;
}

}  // namespace

std::vector<std::string> placeholders(std::string_view body) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '{') continue;
    if (auto n = placeholder_at(body, i)) {
      std::string name(body.substr(i + 1, n - 2));
      if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
      i += n - 1;
    }
  }
  return out;
}

std::string render(const PromptTemplate& t, const std::map<std::string, std::string>& bindings) {
  std::string out;
  const std::string_view body = t.body;
  std::size_t i = 0;
  while (i < body.size()) {
    std::size_t n = body[i] == '{' ? placeholder_at(body, i) : 0;
    if (!n) {
      out.push_back(body[i++]);
      continue;
    }
    std::string name(body.substr(i + 1, n - 2));
    auto it = bindings.find(name);
    if (it == bindings.end()) throw UnboundPlaceholder(t.id + ": {" + name + "} is not bound");
    out += it->second;
    i += n;
  }
  return out;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path asset_dir() {
  if (const char* env = std::getenv("STOCHBENCH_ASSETS"); env && *env) return env;
  return STOCHBENCH_ASSET_DIR;
}

TemplateRegistry TemplateRegistry::load(const fs::path& dir) {
  TemplateRegistry reg;
  for (const auto& k : known_templates()) {
    std::string body = read_text_file(dir / (std::string(k.id) + ".txt"));
    if (!body.empty() && body.back() == '\n') body.pop_back();
    reg.templates_[k.id] = PromptTemplate{k.id, k.method, k.role, std::move(body)};
  }
  return reg;
}

TemplateRegistry TemplateRegistry::load_default() { return load(asset_dir() / "prompts"); }

const PromptTemplate& TemplateRegistry::get(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw ConfigError("unknown prompt template '" + id + "'");
  return it->second;
}

std::vector<std::string> TemplateRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& k : known_templates()) out.push_back(k.id);
  return out;
}

std::vector<std::string> TemplateRegistry::stages(Method m) {
  switch (m) {
    case Method::standard_s: return {"standard_s"};
    case Method::cot_s: return {"cot_s"};
    case Method::cot_s2: return {"cot_s2.extract", "cot_s2.formulate", "cot_s2.extensive"};
    case Method::cot_s_instructions:
      return {"cot_s_instructions.extract", "cot_s_instructions.formulate", "cot_s_instructions.extensive"};
    case Method::agentic: return {"agentic.extractor", "agentic.formulator", "agentic.reviewer", "agentic.updater"};
  }
  return {};
}

nlohmann::json to_json(const Transcript& t) {
  nlohmann::json ex = nlohmann::json::array();
  for (const auto& e : t.exchanges) ex.push_back({{"role", e.role}, {"prompt", e.prompt}, {"response", e.response}});
  return {{"exchanges", ex}, {"n_reviewers", t.n_reviewers}};
}

Transcript transcript_from_json(const nlohmann::json& j) {
  Transcript t;
  for (const auto& e : j.at("exchanges"))
    t.exchanges.push_back({e.at("role").get<std::string>(), e.at("prompt").get<std::string>(),
                           e.at("response").get<std::string>()});
  t.n_reviewers = j.at("n_reviewers").get<int>();
  return t;
}

std::string extract_code(std::string_view response) {
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos <= response.size();) {
    std::size_t nl = response.find('\n', pos);
    if (nl == std::string_view::npos) nl = response.size();
    lines.push_back(response.substr(pos, nl - pos));
    pos = nl + 1;
  }
  auto is_fence = [](std::string_view l) {
    std::size_t k = l.find_first_not_of(" \t");
    return k != std::string_view::npos && l.substr(k, 3) == "```";
  };
  std::optional<std::string> last;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!is_fence(lines[i])) continue;
    std::size_t j = i + 1;
    while (j < lines.size() && !is_fence(lines[j])) ++j;
    if (j == lines.size()) break;
    std::string body;
    for (std::size_t k = i + 1; k < j; ++k) body.append(lines[k]).push_back('\n');
    last = std::move(body);
    i = j;
  }
  if (last) return *last;
  std::size_t a = response.find_first_not_of(" \t\r\n");
  if (a == std::string_view::npos) return "";
  std::size_t b = response.find_last_not_of(" \t\r\n");
  return std::string(response.substr(a, b - a + 1)) + "\n";
}

namespace {

ChatResponse ask(ChatClient& client, const PipelineConfig& cfg, std::vector<Message> messages) {
  ChatRequest req{cfg.model, std::move(messages), cfg.temperature, cfg.max_tokens};
  auto resp = client.complete(req);
  if (resp.text.find_first_not_of(" \t\r\n") == std::string::npos)
    throw EmptyCompletion("empty completion from " + cfg.model);
  return resp;
}

std::map<std::string, std::string> base_bindings(const PromptInputs& in) {
  return {{"problem_description", in.problem_description},
          {"code_example", in.code_example},
          {"instructions", in.instructions}};
}

}  // namespace

MethodResult run_method(Method m, const PromptInputs& in, ChatClient& client, const PipelineConfig& cfg,
                        const TemplateRegistry& templates) {
  if (m == Method::agentic) return run_agentic(in, client, cfg, templates);
  MethodResult out;
  auto bindings = base_bindings(in);
  std::vector<Message> history;
  for (const auto& id : TemplateRegistry::stages(m)) {
    const auto& t = templates.get(id);
    std::string prompt = render(t, bindings);
    history.push_back({"user", prompt});
    auto resp = ask(client, cfg, history);
    history.push_back({"assistant", resp.text});
    out.transcript.exchanges.push_back({t.role, std::move(prompt), resp.text});
  }
  out.final_code = extract_code(out.transcript.exchanges.back().response);
  return out;
}

MethodResult run_agentic(const PromptInputs& in, ChatClient& client, const PipelineConfig& cfg,
                         const TemplateRegistry& templates) {
  if (cfg.n_reviewers < 1) throw ConfigError("n_reviewers must be at least 1");
  MethodResult out;
  auto& ex = out.transcript.exchanges;
  out.transcript.n_reviewers = cfg.n_reviewers;
  auto bindings = base_bindings(in);
  auto single = [&](const std::string& id) {
    const auto& t = templates.get(id);
    std::string prompt = render(t, bindings);
    auto resp = ask(client, cfg, {{"user", prompt}});
    ex.push_back({t.role, std::move(prompt), resp.text});
    return resp.text;
  };

  bindings["extraction_output"] = single("agentic.extractor");
  bindings["current_code"] = extract_code(single("agentic.formulator"));

  const auto& reviewer = templates.get("agentic.reviewer");
  const std::string review_prompt = render(reviewer, bindings);
  std::vector<std::future<ChatResponse>> pending;
  for (int k = 0; k < cfg.n_reviewers; ++k)
    pending.push_back(std::async(std::launch::async, [&] { return ask(client, cfg, {{"user", review_prompt}}); }));
  std::vector<ChatResponse> reviews;
  std::exception_ptr failure;
  for (auto& f : pending) {
    try {
      reviews.push_back(f.get());
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::string feedback;
  for (int k = 0; k < cfg.n_reviewers; ++k) {
    ex.push_back({"reviewer_" + std::to_string(k + 1), review_prompt, reviews[k].text});
    if (k) feedback += "\n\n";
    feedback += "Reviewer " + std::to_string(k + 1) + ":\n" + reviews[k].text;
  }
  bindings["reviewers_feedback"] = feedback;
  out.final_code = extract_code(single("agentic.updater"));
  return out;
}

}  // namespace stochbench
