#ifndef SMART_LLM_HPP
#define SMART_LLM_HPP

#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smart/prompt.hpp"

namespace smart::llm {

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;  // deterministic by default
  int max_tokens = 2048;
  std::string tag;  // pipeline stage + instance id; stub script key
};

struct Usage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

struct ChatResponse {
  std::string text;
  Usage usage;
  int attempts = 1;
  bool cache_hit = false;
};

struct LlmError : std::runtime_error {
  bool retryable;
  int retry_after_ms;
  explicit LlmError(std::string msg, bool retryable_ = false, int retry_after_ms_ = 0)
      : std::runtime_error(std::move(msg)), retryable(retryable_), retry_after_ms(retry_after_ms_) {}
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual ChatResponse complete(const ChatRequest& req) = 0;
  virtual std::string id() const = 0;
};

// Scripted responses keyed by request tag, consumed in sequence so retries see
// the next entry. A response equal to "!transient" raises a retryable error
// when consumed (for exercising the retry path offline).
class ScriptedStubProvider : public ChatProvider {
 public:
  ScriptedStubProvider() = default;

  // JSONL: {"tag": "...", "responses": ["...", ...]}
  static std::shared_ptr<ScriptedStubProvider> from_file(const std::string& path);

  void script(const std::string& tag, std::vector<std::string> responses);
  // Fallback used when a tag has no script of its own.
  void script_default(std::vector<std::string> responses);

  ChatResponse complete(const ChatRequest& req) override;
  std::string id() const override { return "stub"; }

  size_t calls() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::vector<std::string>> scripts_;
  std::map<std::string, size_t> cursors_;
  std::vector<std::string> default_responses_;
  size_t default_cursor_ = 0;
  size_t calls_ = 0;
};

// OpenAI-compatible chat-completions endpoint. Key material comes from the
// named environment variable, never from config files.
class HttpProvider : public ChatProvider {
 public:
  struct Options {
    std::string base_url;  // e.g. https://api.example.com
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string api_key_env;  // e.g. SMART_API_KEY_OPENAI
    int connect_timeout_s = 10;
    int read_timeout_s = 120;
  };

  explicit HttpProvider(Options opts);

  ChatResponse complete(const ChatRequest& req) override;
  std::string id() const override { return "http:" + opts_.base_url; }

 private:
  Options opts_;
  std::string api_key_;
};

struct GatewayOptions {
  std::string cache_dir;     // empty disables the disk cache
  int max_in_flight = 8;
  int max_retries = 3;
  int backoff_ms = 250;      // doubled per retry
  bool offline = false;      // cache misses become errors (audit replays)
};

// Shared front door: content-addressed response cache, bounded in-flight
// requests, exponential backoff on retryable failures.
class Gateway {
 public:
  Gateway(std::shared_ptr<ChatProvider> provider, GatewayOptions opts);

  ChatResponse complete(const ChatRequest& req);

  // sha256 over (model, messages, temperature): the cache key.
  static std::string request_key(const ChatRequest& req);

  const GatewayOptions& options() const { return opts_; }
  ChatProvider& provider() { return *provider_; }

 private:
  std::optional<ChatResponse> cache_lookup(const std::string& key) const;
  void cache_store(const std::string& key, const ChatRequest& req, const ChatResponse& resp);

  std::shared_ptr<ChatProvider> provider_;
  GatewayOptions opts_;

  std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  std::mutex cache_write_mu_;
};

}  // namespace smart::llm

#endif
