// Writes replay fixtures for hand-authored completions listed in a design
// file. Each completion is keyed by the exact request the harness will send.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "stochbench/errors.hpp"
#include "stochbench/harness.hpp"

using namespace stochbench;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Answers by role, recognized from the static text before the first
// placeholder of each template.
class DesignClient : public ChatClient {
public:
  DesignClient(const TemplateRegistry& templates, std::map<std::string, std::string> by_role, FixtureStore& store)
      : by_role_(std::move(by_role)), store_(store) {
    for (const auto& id : templates.ids()) {
      const auto& t = templates.get(id);
      auto names = placeholders(t.body);
      auto cut = names.empty() ? t.body.size() : t.body.find("{" + names.front() + "}");
      prefixes_.emplace_back(t.body.substr(0, cut), t.role);
    }
  }

  ChatResponse complete(const ChatRequest& req) override {
    const auto& prompt = req.messages.back().content;
    std::string role;
    std::size_t best = 0;
    for (const auto& [prefix, r] : prefixes_)
      if (prompt.rfind(prefix, 0) == 0 && prefix.size() >= best) {
        best = prefix.size();
        role = r;
      }
    auto it = by_role_.find(role);
    if (it == by_role_.end()) throw ConfigError("design has no response for role '" + role + "'");
    ChatResponse resp{it->second, 0, 0, 0.0};
    std::lock_guard lock(mu_);
    store_.put(req, resp);
    return resp;
  }

private:
  std::vector<std::pair<std::string, std::string>> prefixes_;
  std::map<std::string, std::string> by_role_;
  FixtureStore& store_;
  std::mutex mu_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Write replay fixtures from a design file"};
  std::string design_path = "fixtures/design.json", corpus = "problems", out = "fixtures/replay";
  app.add_option("--design", design_path)->check(CLI::ExistingFile);
  app.add_option("--corpus", corpus)->check(CLI::ExistingDirectory);
  app.add_option("--out", out);
  CLI11_PARSE(app, argc, argv);

  try {
    auto design = json::parse(read_text_file(design_path));
    const fs::path base = fs::path(design_path).parent_path() / "responses";
    auto problems = ingest_corpus(corpus);
    auto templates = TemplateRegistry::load_default();
    FixtureStore store(out);
    PipelineConfig pc;
    pc.model = design.at("model").get<std::string>();
    pc.n_reviewers = design.value("n_reviewers", 4);
    int written = 0;
    for (const auto& cell : design.at("cells")) {
      auto id = cell.at("problem").get<std::string>();
      auto it = std::find_if(problems.begin(), problems.end(), [&](const auto& p) { return p.id == id; });
      if (it == problems.end()) throw ConfigError("unknown problem " + id);
      std::map<std::string, std::string> by_role;
      for (const auto& [role, file] : cell.at("responses").items())
        by_role[role] = read_text_file(base / file.get<std::string>());
      DesignClient client(templates, by_role, store);
      auto result = run_method(parse_method(cell.at("method").get<std::string>()), prompt_inputs(*it), client, pc,
                               templates);
      written += static_cast<int>(result.transcript.exchanges.size());
      std::cout << id << " / " << cell.at("method").get<std::string>() << ": "
                << result.transcript.exchanges.size() << " exchanges\n";
    }
    std::cout << written << " exchanges recorded into " << out << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
