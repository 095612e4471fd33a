#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <thread>

#include "stochbench/errors.hpp"
#include "stochbench/model.hpp"
#include "stochbench/pipeline.hpp"

namespace stochbench {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(ClientMode m) {
  switch (m) {
    case ClientMode::live: return "live";
    case ClientMode::record: return "record";
    case ClientMode::replay: return "replay";
  }
  return "replay";
}

ClientMode parse_client_mode(std::string_view text) {
  for (auto m : {ClientMode::live, ClientMode::record, ClientMode::replay})
    if (to_string(m) == text) return m;
  throw ConfigError("unknown client mode '" + std::string(text) + "'");
}

namespace {

json messages_json(const std::vector<Message>& messages) {
  json arr = json::array();
  for (const auto& m : messages) arr.push_back({{"role", m.role}, {"content", m.content}});
  return arr;
}

}  // namespace

std::string request_digest(const ChatRequest& req) {
  json key = {{"model", req.model}, {"messages", messages_json(req.messages)}};
  return to_hex(sha256(key.dump()));
}

TokenBucket::TokenBucket(double per_minute, double burst)
    : rate_(per_minute / 60.0), burst_(burst), tokens_(burst), last_(std::chrono::steady_clock::now()) {}

void TokenBucket::acquire() {
  if (rate_ <= 0.0) return;
  std::unique_lock lock(mu_);
  for (;;) {
    auto now = std::chrono::steady_clock::now();
    tokens_ = std::min(burst_, tokens_ + rate_ * std::chrono::duration<double>(now - last_).count());
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    std::this_thread::sleep_for(std::chrono::duration<double>((1.0 - tokens_) / rate_));
  }
}

fs::path FixtureStore::path_for(const ChatRequest& req) const { return dir_ / (request_digest(req) + ".json"); }

std::optional<ChatResponse> FixtureStore::find(const ChatRequest& req) const {
  auto p = path_for(req);
  std::ifstream in(p);
  if (!in) return std::nullopt;
  json j;
  try {
    j = json::parse(in);
    const auto& r = j.at("response");
    ChatResponse out;
    out.text = r.at("text").get<std::string>();
    out.prompt_tokens = r.value("prompt_tokens", 0);
    out.completion_tokens = r.value("completion_tokens", 0);
    return out;
  } catch (const json::exception& e) {
    throw ConfigError(p.string() + ": malformed fixture: " + e.what());
  }
}

void FixtureStore::put(const ChatRequest& req, const ChatResponse& resp) {
  json j = {{"model", req.model},
            {"messages", messages_json(req.messages)},
            {"response",
             {{"text", resp.text}, {"prompt_tokens", resp.prompt_tokens}, {"completion_tokens", resp.completion_tokens}}}};
  std::lock_guard lock(mu_);
  fs::create_directories(dir_);
  auto p = path_for(req);
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << j.dump(2) << '\n';
    if (!out) throw Error("cannot write fixture " + tmp.string());
  }
  fs::rename(tmp, p);
}

namespace {

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("endpoint must be an absolute URL: " + url);
  auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpChatClient::HttpChatClient(ClientConfig cfg) : cfg_(std::move(cfg)), bucket_(cfg_.requests_per_minute) {
  api_key_ = cfg_.api_key;
  if (api_key_.empty() && !cfg_.api_key_env.empty())
    if (const char* env = std::getenv(cfg_.api_key_env.c_str())) api_key_ = env;
  if (cfg_.max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
  split_url(cfg_.endpoint);
}

ChatResponse HttpChatClient::complete(const ChatRequest& req) {
  const auto [base, path] = split_url(cfg_.endpoint);
  json body = {{"model", req.model},
               {"messages", messages_json(req.messages)},
               {"temperature", req.temperature},
               {"max_tokens", req.max_tokens}};
  const std::string payload = body.dump();
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  std::string last_error;
  int last_status = 0;
  for (int attempt = 0; attempt < cfg_.max_attempts; ++attempt) {
    if (attempt) std::this_thread::sleep_for(std::chrono::duration<double>(cfg_.backoff_s * (1 << (attempt - 1))));
    bucket_.acquire();
    httplib::Client cli(base);
    auto secs = std::chrono::duration<double>(cfg_.timeout_s);
    cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
    cli.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
    const auto t0 = std::chrono::steady_clock::now();
    auto res = cli.Post(path, headers, payload, "application/json");
    if (!res) {
      last_status = 0;
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_status = res->status;
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500);
      if (retryable(res->status)) continue;
      throw ClientError(last_error, last_status);
    }
    try {
      auto j = json::parse(res->body);
      ChatResponse out;
      const auto& content = j.at("choices").at(0).at("message").at("content");
      out.text = content.is_null() ? "" : content.get<std::string>();
      if (j.contains("usage")) {
        out.prompt_tokens = j["usage"].value("prompt_tokens", 0);
        out.completion_tokens = j["usage"].value("completion_tokens", 0);
      }
      out.latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return out;
    } catch (const json::exception& e) {
      throw ClientError(std::string("malformed completion: ") + e.what(), res->status);
    }
  }
  throw ClientError("giving up after " + std::to_string(cfg_.max_attempts) + " attempts: " + last_error, last_status);
}

ChatResponse ReplayChatClient::complete(const ChatRequest& req) {
  if (auto hit = store_.find(req)) return *hit;
  throw FixtureMiss("no fixture " + store_.path_for(req).string());
}

ChatResponse RecordingChatClient::complete(const ChatRequest& req) {
  auto resp = inner_->complete(req);
  store_.put(req, resp);
  return resp;
}

std::unique_ptr<ChatClient> make_client(const ClientConfig& cfg) {
  switch (cfg.mode) {
    case ClientMode::live: return std::make_unique<HttpChatClient>(cfg);
    case ClientMode::record:
      return std::make_unique<RecordingChatClient>(std::make_unique<HttpChatClient>(cfg), cfg.fixture_dir);
    case ClientMode::replay: return std::make_unique<ReplayChatClient>(cfg.fixture_dir);
  }
  throw ConfigError("unknown client mode");
}

}  // namespace stochbench
