#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace stochbench {

enum class Method { standard_s, cot_s, cot_s2, cot_s_instructions, agentic };

std::string_view to_string(Method m);
// Also accepts "cot_s_instruction".
Method parse_method(std::string_view text);
const std::vector<Method>& all_methods();

struct PromptTemplate {
  std::string id;
  Method method = Method::standard_s;
  std::string role;
  std::string body;
};

// Placeholder names ({identifier}) in order of first appearance.
std::vector<std::string> placeholders(std::string_view body);

// Single left-to-right pass; substituted text is never rescanned. Throws
// UnboundPlaceholder when a placeholder has no binding.
std::string render(const PromptTemplate& t, const std::map<std::string, std::string>& bindings);

class TemplateRegistry {
public:
  // Reads <dir>/<id>.txt for every known id, dropping one trailing newline.
  static TemplateRegistry load(const std::filesystem::path& dir);
  static TemplateRegistry load_default();

  const PromptTemplate& get(const std::string& id) const;
  std::vector<std::string> ids() const;
  // Template ids of the stages of a single-chain method, in order.
  static std::vector<std::string> stages(Method m);

private:
  std::map<std::string, PromptTemplate> templates_;
};

std::string read_text_file(const std::filesystem::path& path);
std::filesystem::path asset_dir();

struct Message {
  std::string role;
  std::string content;
  friend bool operator==(const Message&, const Message&) = default;
};

struct ChatRequest {
  std::string model;
  std::vector<Message> messages;
  double temperature = 0.0;
  int max_tokens = 4096;
};

struct ChatResponse {
  std::string text;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  double latency = 0.0;
};

// Hex SHA-256 of the canonical JSON of (model id, messages).
std::string request_digest(const ChatRequest& req);

class ChatClient {
public:
  virtual ~ChatClient() = default;
  virtual ChatResponse complete(const ChatRequest& req) = 0;
};

enum class ClientMode { live, record, replay };
std::string_view to_string(ClientMode m);
ClientMode parse_client_mode(std::string_view text);

struct ClientConfig {
  ClientMode mode = ClientMode::replay;
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string api_key_env = "OPENAI_API_KEY";
  std::string api_key;  // overrides api_key_env when set
  std::filesystem::path fixture_dir = "fixtures";
  int max_attempts = 3;
  double backoff_s = 1.0;
  double requests_per_minute = 60.0;  // <= 0 disables the limiter
  double timeout_s = 120.0;
};

class TokenBucket {
public:
  TokenBucket(double per_minute, double burst = 1.0);
  void acquire();

private:
  std::mutex mu_;
  double rate_;
  double burst_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

// Directory of <digest>.json files holding the request and the response.
class FixtureStore {
public:
  explicit FixtureStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::optional<ChatResponse> find(const ChatRequest& req) const;
  void put(const ChatRequest& req, const ChatResponse& resp);
  std::filesystem::path path_for(const ChatRequest& req) const;

private:
  std::filesystem::path dir_;
  std::mutex mu_;
};

// OpenAI-compatible chat completions over HTTP(S). Transport failures, 429
// and 5xx are retried with exponential backoff; other statuses fail at once.
class HttpChatClient : public ChatClient {
public:
  explicit HttpChatClient(ClientConfig cfg);
  ChatResponse complete(const ChatRequest& req) override;

private:
  ClientConfig cfg_;
  std::string api_key_;
  TokenBucket bucket_;
};

class ReplayChatClient : public ChatClient {
public:
  explicit ReplayChatClient(std::filesystem::path dir) : store_(std::move(dir)) {}
  ChatResponse complete(const ChatRequest& req) override;

private:
  FixtureStore store_;
};

class RecordingChatClient : public ChatClient {
public:
  RecordingChatClient(std::unique_ptr<ChatClient> inner, std::filesystem::path dir)
      : inner_(std::move(inner)), store_(std::move(dir)) {}
  ChatResponse complete(const ChatRequest& req) override;

private:
  std::unique_ptr<ChatClient> inner_;
  FixtureStore store_;
};

std::unique_ptr<ChatClient> make_client(const ClientConfig& cfg);

struct Exchange {
  std::string role;
  std::string prompt;
  std::string response;
  friend bool operator==(const Exchange&, const Exchange&) = default;
};

struct Transcript {
  std::vector<Exchange> exchanges;
  int n_reviewers = 0;
  friend bool operator==(const Transcript&, const Transcript&) = default;
};

nlohmann::json to_json(const Transcript& t);
Transcript transcript_from_json(const nlohmann::json& j);

struct PromptInputs {
  std::string problem_description;
  std::string code_example;
  std::string instructions;
};

struct PipelineConfig {
  std::string model;
  double temperature = 0.0;
  int max_tokens = 4096;
  int n_reviewers = 4;
};

struct MethodResult {
  std::string final_code;
  Transcript transcript;
};

// Contents of the last fenced block, or the trimmed text when there is none.
std::string extract_code(std::string_view response);

MethodResult run_method(Method m, const PromptInputs& in, ChatClient& client, const PipelineConfig& cfg,
                        const TemplateRegistry& templates);
MethodResult run_agentic(const PromptInputs& in, ChatClient& client, const PipelineConfig& cfg,
                         const TemplateRegistry& templates);

}  // namespace stochbench
