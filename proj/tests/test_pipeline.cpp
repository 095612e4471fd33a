#include <httplib.h>
#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <functional>
#include <thread>

#include "stochbench/errors.hpp"
#include "stochbench/pipeline.hpp"

using namespace stochbench;
namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::string> kBindings{
    {"problem_description", "A firm ships goods from two plants to one market."},
    {"code_example", "import gurobipy as gp\nm = gp.Model(\"demo\")"},
    {"instructions", "Use the normal quantile for every chance constraint."},
    {"extraction_output", "EXTRACTED {sets}"},
    {"current_code", "x = m.addVar(name=\"x\")"},
    {"reviewers_feedback", "Reviewer 1:\nLooks fine."},
};

const TemplateRegistry& registry() {
  static const TemplateRegistry reg = TemplateRegistry::load_default();
  return reg;
}

// Answers through a callback and records every request.
class ScriptedClient : public ChatClient {
public:
  explicit ScriptedClient(std::function<std::string(const ChatRequest&, int)> fn) : fn_(std::move(fn)) {}

  ChatResponse complete(const ChatRequest& req) override {
    int n;
    {
      std::lock_guard lock(mu_);
      n = static_cast<int>(requests.size());
      requests.push_back(req);
    }
    return ChatResponse{fn_(req, n), 1, 1, 0.0};
  }

  std::mutex mu_;
  std::vector<ChatRequest> requests;

private:
  std::function<std::string(const ChatRequest&, int)> fn_;
};

std::string fenced(const std::string& code) { return "Here you go.\n```python\n" + code + "```\n"; }

PromptInputs inputs() { return {"Ship goods.", "import gurobipy as gp", "Be careful."}; }

PipelineConfig config() {
  PipelineConfig cfg;
  cfg.model = "gpt-test";
  return cfg;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / "stochbench_pipeline_test" / name;
  fs::remove_all(p);
  return p;
}

struct FakeServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  explicit FakeServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server.Post("/v1/chat/completions", handler);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeServer() {
    server.stop();
    thread.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions"; }
};

std::string completion_body(const std::string& text) {
  nlohmann::json j = {{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}}}}},
                      {"usage", {{"prompt_tokens", 7}, {"completion_tokens", 3}}}};
  return j.dump();
}

ClientConfig http_config(const std::string& url) {
  ClientConfig cfg;
  cfg.mode = ClientMode::live;
  cfg.endpoint = url;
  cfg.api_key = "test-key";
  cfg.backoff_s = 0.01;
  cfg.requests_per_minute = 0;
  cfg.timeout_s = 5;
  return cfg;
}

}  // namespace

TEST(Templates, MatchGoldenFiles) {
  for (const auto& id : registry().ids()) {
    auto golden = read_text_file(fs::path(STOCHBENCH_TEST_DIR) / "golden" / (id + ".txt"));
    EXPECT_EQ(render(registry().get(id), kBindings), golden) << id;
  }
}

TEST(Templates, AnchorSentences) {
  auto has = [](const std::string& id, const std::string& s) {
    return render(registry().get(id), kBindings).find(s) != std::string::npos;
  };
  EXPECT_TRUE(has("standard_s", "Give your Python code directly."));
  EXPECT_TRUE(has("standard_s", "Now the origin problem is as follow:"));
  EXPECT_TRUE(has("cot_s", "Let's analyse the problem step by step, and then give your Python code directly."));
  EXPECT_TRUE(has("cot_s", "In particular, define the objective function inside .setObjective function."));
  EXPECT_TRUE(has("cot_s2.extract", "Your extraction will serve as the foundation for subsequent code implementation."));
  EXPECT_TRUE(has("cot_s_instructions.extract",
                  "Your extraction will serve as the foundation for subsequent code implementation."));
  EXPECT_TRUE(has("cot_s_instructions.extract", "Please also learn the following instructions to guide you further:\n"
                                                "Use the normal quantile for every chance constraint."));
  EXPECT_TRUE(has("cot_s2.extensive", "Enumerate all possible scenarios, associating each with its corresponding probability."));
  EXPECT_TRUE(has("cot_s_instructions.extensive", "Please also see the instruction below for further guidance:"));
  EXPECT_TRUE(has("agentic.reviewer", "Provide concise and precise feedback."));
  EXPECT_TRUE(has("agentic.updater", "Return the updated final code."));
  EXPECT_TRUE(has("agentic.updater", "Do not include any additional text."));
}

TEST(Templates, EveryTemplateSubstitutesDescription) {
  for (const auto& id : registry().ids()) {
    auto text = render(registry().get(id), kBindings);
    EXPECT_NE(text.find(kBindings.at("problem_description")), std::string::npos) << id;
  }
  auto s = render(registry().get("standard_s"), kBindings);
  EXPECT_NE(s.find(kBindings.at("code_example")), std::string::npos);
}

TEST(Render, Rules) {
  PromptTemplate t{"t", Method::standard_s, "r", "a {x} b {y} {not closed {1z} {}"};
  EXPECT_EQ(render(t, {{"x", "{y}"}, {"y", "Y"}}), "a {y} b Y {not closed {1z} {}");
  EXPECT_THROW(render(t, {{"x", "1"}}), UnboundPlaceholder);
  EXPECT_EQ(placeholders(t.body), (std::vector<std::string>{"x", "y"}));
  auto b = kBindings;
  b.erase("code_example");
  EXPECT_THROW(render(registry().get("standard_s"), b), UnboundPlaceholder);
}

TEST(Methods, NamesAndAlias) {
  EXPECT_EQ(all_methods().size(), 5u);
  for (auto m : all_methods()) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_EQ(parse_method("cot_s_instruction"), Method::cot_s_instructions);
  EXPECT_THROW(parse_method("zero_shot"), ConfigError);
}

TEST(ExtractCode, Rules) {
  EXPECT_EQ(extract_code("a\n```python\nfirst\n```\nmid\n```\nsecond\nline\n```\ntail"), "second\nline\n");
  EXPECT_EQ(extract_code("  print(1)\n\n"), "print(1)\n");
  EXPECT_EQ(extract_code("x\n```python\nonly\n```"), "only\n");
  EXPECT_EQ(extract_code("```\ndone\n```\n```python\nunterminated\n"), "done\n");
  EXPECT_EQ(extract_code(" \n"), "");
}

TEST(RunMethod, SingleExchangeMethods) {
  for (auto m : {Method::standard_s, Method::cot_s}) {
    ScriptedClient client([](const ChatRequest&, int) { return fenced("print('hi')\n"); });
    auto r = run_method(m, inputs(), client, config(), registry());
    ASSERT_EQ(r.transcript.exchanges.size(), 1u);
    EXPECT_EQ(r.final_code, "print('hi')\n");
    EXPECT_EQ(client.requests[0].temperature, 0.0);
    EXPECT_EQ(client.requests[0].model, "gpt-test");
  }
}

TEST(RunMethod, StagedChainsFeedHistoryForward) {
  for (auto m : {Method::cot_s2, Method::cot_s_instructions}) {
    ScriptedClient client([](const ChatRequest&, int n) { return fenced("stage" + std::to_string(n) + "\n"); });
    auto r = run_method(m, inputs(), client, config(), registry());
    ASSERT_EQ(r.transcript.exchanges.size(), 3u);
    EXPECT_EQ(r.transcript.exchanges[0].role, "extract");
    EXPECT_EQ(r.transcript.exchanges[1].role, "formulate");
    EXPECT_EQ(r.transcript.exchanges[2].role, "extensive");
    EXPECT_EQ(r.final_code, "stage2\n");
    ASSERT_EQ(client.requests[2].messages.size(), 5u);
    EXPECT_EQ(client.requests[2].messages[1].content, r.transcript.exchanges[0].response);
    EXPECT_EQ(client.requests[2].messages[3].role, "assistant");
  }
}

TEST(RunMethod, EmptyCompletion) {
  ScriptedClient client([](const ChatRequest&, int) { return std::string("  \n"); });
  EXPECT_THROW(run_method(Method::standard_s, inputs(), client, config(), registry()), EmptyCompletion);
}

TEST(RunAgentic, Topology) {
  ScriptedClient client([](const ChatRequest& req, int) {
    const auto& p = req.messages.back().content;
    if (p.find("reviewer agent") != std::string::npos) return std::string("no issues");
    if (p.find("Updating Agent") != std::string::npos) return fenced("final()\n");
    return fenced("draft()\n");
  });
  auto r = run_method(Method::agentic, inputs(), client, config(), registry());
  const auto& ex = r.transcript.exchanges;
  ASSERT_EQ(ex.size(), 7u);
  EXPECT_EQ(r.transcript.n_reviewers, 4);
  std::vector<std::string> roles;
  for (const auto& e : ex) roles.push_back(e.role);
  EXPECT_EQ(roles, (std::vector<std::string>{"extractor", "formulator", "reviewer_1", "reviewer_2", "reviewer_3",
                                             "reviewer_4", "updater"}));
  EXPECT_EQ(r.final_code, "final()\n");
  EXPECT_NE(ex[2].prompt.find("draft()"), std::string::npos);
  EXPECT_NE(ex[6].prompt.find("Reviewer 4:\nno issues"), std::string::npos);
  for (const auto& req : client.requests) EXPECT_EQ(req.messages.size(), 1u);

  auto cfg = config();
  cfg.n_reviewers = 2;
  EXPECT_EQ(run_agentic(inputs(), client, cfg, registry()).transcript.exchanges.size(), 5u);
  cfg.n_reviewers = 0;
  EXPECT_THROW(run_agentic(inputs(), client, cfg, registry()), ConfigError);
}

TEST(RunAgentic, ReviewerFailurePropagates) {
  std::atomic<int> reviews{0};
  ScriptedClient client([&](const ChatRequest& req, int) -> std::string {
    if (req.messages.back().content.find("reviewer agent") != std::string::npos && ++reviews == 2)
      throw ClientError("rate limited", 429);
    return fenced("x()\n");
  });
  EXPECT_THROW(run_agentic(inputs(), client, config(), registry()), ClientError);
}

TEST(Client, DigestKeysOnModelAndMessages) {
  ChatRequest a{"m", {{"user", "hi"}}, 0.0, 10};
  ChatRequest b = a;
  b.max_tokens = 99;
  EXPECT_EQ(request_digest(a), request_digest(b));
  b.messages[0].content = "hi!";
  EXPECT_NE(request_digest(a), request_digest(b));
  b = a;
  b.model = "n";
  EXPECT_NE(request_digest(a), request_digest(b));
  EXPECT_EQ(request_digest(a).size(), 64u);
}

TEST(Client, ReplayMissAndDeterminism) {
  auto dir = scratch("replay");
  ReplayChatClient replay(dir);
  ChatRequest req{"m", {{"user", "hello"}}, 0.0, 10};
  EXPECT_THROW(replay.complete(req), FixtureMiss);
  FixtureStore(dir).put(req, ChatResponse{"answer\nwith lines", 4, 2, 0.5});
  auto r1 = replay.complete(req);
  auto r2 = replay.complete(req);
  EXPECT_EQ(r1.text, "answer\nwith lines");
  EXPECT_EQ(r1.text, r2.text);
  EXPECT_EQ(r1.prompt_tokens, 4);
  EXPECT_EQ(r1.latency, 0.0);
}

TEST(Client, RecordThenReplay) {
  FakeServer srv([](const httplib::Request& req, httplib::Response& res) {
    auto j = nlohmann::json::parse(req.body);
    res.set_content(completion_body("echo: " + j["messages"].back()["content"].get<std::string>()), "application/json");
  });
  auto dir = scratch("record");
  auto cfg = http_config(srv.url());
  cfg.mode = ClientMode::record;
  cfg.fixture_dir = dir;
  auto rec = make_client(cfg);
  ChatRequest req{"m", {{"user", "ping \"quoted\"\né"}}, 0.0, 10};
  auto live = rec->complete(req);
  EXPECT_EQ(live.text, "echo: ping \"quoted\"\né");
  EXPECT_EQ(live.completion_tokens, 3);
  cfg.mode = ClientMode::replay;
  auto again = make_client(cfg)->complete(req);
  EXPECT_EQ(again.text, live.text);
}

TEST(Client, AuthFailureIsNotRetried) {
  std::atomic<int> hits{0};
  FakeServer srv([&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    EXPECT_EQ(req.get_header_value("Authorization"), "Bearer test-key");
    res.status = 401;
    res.set_content("{\"error\":\"bad key\"}", "application/json");
  });
  HttpChatClient client(http_config(srv.url()));
  try {
    client.complete(ChatRequest{"m", {{"user", "x"}}, 0.0, 10});
    FAIL() << "expected ClientError";
  } catch (const ClientError& e) {
    EXPECT_EQ(e.status(), 401);
  }
  EXPECT_EQ(hits.load(), 1);
}

TEST(Client, RetriesTransientFailures) {
  std::atomic<int> hits{0};
  FakeServer srv([&](const httplib::Request&, httplib::Response& res) {
    if (++hits < 3) {
      res.status = hits == 1 ? 429 : 503;
      return;
    }
    res.set_content(completion_body("ok"), "application/json");
  });
  HttpChatClient client(http_config(srv.url()));
  EXPECT_EQ(client.complete(ChatRequest{"m", {{"user", "x"}}, 0.0, 10}).text, "ok");
  EXPECT_EQ(hits.load(), 3);

  FakeServer down([&](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  HttpChatClient failing(http_config(down.url()));
  try {
    failing.complete(ChatRequest{"m", {{"user", "x"}}, 0.0, 10});
    FAIL() << "expected ClientError";
  } catch (const ClientError& e) {
    EXPECT_EQ(e.status(), 500);
  }

  auto cfg = http_config("http://127.0.0.1:1/v1/chat/completions");
  HttpChatClient unreachable(cfg);
  EXPECT_THROW(unreachable.complete(ChatRequest{"m", {{"user", "x"}}, 0.0, 10}), ClientError);
}

TEST(Client, TokenBucketSpacesRequests) {
  TokenBucket bucket(600.0);
  auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < 4; ++k) bucket.acquire();
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_GE(elapsed, 0.29);
  EXPECT_LT(elapsed, 1.0);
}
