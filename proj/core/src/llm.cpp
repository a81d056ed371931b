#include "smart/llm.hpp"

#include <httplib.h>

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "smart/hash.hpp"
#include "smart/text.hpp"

namespace smart::llm {

namespace fs = std::filesystem;
using nlohmann::json;

// --- ScriptedStubProvider ----------------------------------------------------

std::shared_ptr<ScriptedStubProvider> ScriptedStubProvider::from_file(const std::string& path) {
  auto stub = std::make_shared<ScriptedStubProvider>();
  std::ifstream f(path);
  if (!f) throw LlmError("cannot open stub script: " + path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw LlmError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    std::vector<std::string> responses;
    for (const auto& r : j.at("responses")) responses.push_back(r.get<std::string>());
    std::string tag = j.at("tag").get<std::string>();
    if (tag == "*") {
      stub->script_default(std::move(responses));
    } else {
      stub->script(tag, std::move(responses));
    }
  }
  return stub;
}

void ScriptedStubProvider::script(const std::string& tag, std::vector<std::string> responses) {
  std::lock_guard lock(mu_);
  scripts_[tag] = std::move(responses);
  cursors_[tag] = 0;
}

void ScriptedStubProvider::script_default(std::vector<std::string> responses) {
  std::lock_guard lock(mu_);
  default_responses_ = std::move(responses);
  default_cursor_ = 0;
}

ChatResponse ScriptedStubProvider::complete(const ChatRequest& req) {
  std::lock_guard lock(mu_);
  ++calls_;
  const std::string* text = nullptr;
  auto it = scripts_.find(req.tag);
  if (it != scripts_.end()) {
    size_t& cursor = cursors_[req.tag];
    if (cursor >= it->second.size())
      throw LlmError("stub script exhausted for tag '" + req.tag + "'");
    text = &it->second[cursor++];
  } else if (!default_responses_.empty()) {
    size_t idx = default_cursor_ < default_responses_.size() ? default_cursor_ : default_responses_.size() - 1;
    ++default_cursor_;
    text = &default_responses_[idx];
  } else {
    throw LlmError("no stub script for tag '" + req.tag + "'");
  }
  if (*text == "!transient") throw LlmError("scripted transient failure", /*retryable=*/true);

  ChatResponse resp;
  resp.text = *text;
  resp.usage.prompt_tokens = 0;
  for (const auto& m : req.messages) resp.usage.prompt_tokens += static_cast<long>(m.content.size() / 4);
  resp.usage.completion_tokens = static_cast<long>(text->size() / 4);
  return resp;
}

size_t ScriptedStubProvider::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

// --- HttpProvider ------------------------------------------------------------

HttpProvider::HttpProvider(Options opts) : opts_(std::move(opts)) {
  if (!opts_.api_key_env.empty()) {
    const char* key = std::getenv(opts_.api_key_env.c_str());
    if (key) api_key_ = key;
  }
}

ChatResponse HttpProvider::complete(const ChatRequest& req) {
  if (!opts_.api_key_env.empty() && api_key_.empty())
    throw LlmError("API key environment variable " + opts_.api_key_env + " is not set");

  json body{{"model", req.model.empty() ? opts_.model : req.model},
            {"temperature", req.temperature},
            {"max_tokens", req.max_tokens}};
  json messages = json::array();
  for (const auto& m : req.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  body["messages"] = messages;

  httplib::Client client(opts_.base_url);
  client.set_connection_timeout(opts_.connect_timeout_s);
  client.set_read_timeout(opts_.read_timeout_s);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto res = client.Post(opts_.path, headers, body.dump(), "application/json");
  if (!res) {
    throw LlmError("transport failure talking to " + opts_.base_url + ": " + httplib::to_string(res.error()),
                   /*retryable=*/true);
  }
  if (res->status == 401 || res->status == 403) {
    throw LlmError("authentication failed (" + std::to_string(res->status) + ")");
  }
  if (res->status == 429) {
    int retry_after_ms = 0;
    if (res->has_header("Retry-After")) {
      try {
        retry_after_ms = std::stoi(res->get_header_value("Retry-After")) * 1000;
      } catch (...) {
      }
    }
    throw LlmError("rate limited", /*retryable=*/true, retry_after_ms);
  }
  if (res->status >= 500) {
    throw LlmError("server error " + std::to_string(res->status), /*retryable=*/true);
  }
  if (res->status != 200) {
    throw LlmError("unexpected status " + std::to_string(res->status) + ": " + res->body);
  }

  json j;
  try {
    j = json::parse(res->body);
  } catch (const json::exception& e) {
    throw LlmError(std::string("malformed response JSON: ") + e.what());
  }
  ChatResponse resp;
  try {
    resp.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw LlmError("response missing choices[0].message.content: " + res->body);
  }
  if (j.contains("usage")) {
    resp.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
    resp.usage.completion_tokens = j["usage"].value("completion_tokens", 0L);
  }
  return resp;
}

// --- Gateway -------------------------------------------------------------------

Gateway::Gateway(std::shared_ptr<ChatProvider> provider, GatewayOptions opts)
    : provider_(std::move(provider)), opts_(std::move(opts)) {
  if (!opts_.cache_dir.empty()) fs::create_directories(opts_.cache_dir);
}

std::string Gateway::request_key(const ChatRequest& req) {
  json j{{"model", req.model}, {"temperature", req.temperature}};
  json messages = json::array();
  for (const auto& m : req.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  j["messages"] = messages;
  return sha256_hex(j.dump());
}

namespace {

fs::path cache_path(const std::string& dir, const std::string& key) {
  return fs::path(dir) / key.substr(0, 2) / (key + ".json");
}

}  // namespace

std::optional<ChatResponse> Gateway::cache_lookup(const std::string& key) const {
  if (opts_.cache_dir.empty()) return std::nullopt;
  fs::path p = cache_path(opts_.cache_dir, key);
  std::ifstream f(p);
  if (!f) return std::nullopt;
  try {
    json j = json::parse(f);
    ChatResponse resp;
    resp.text = j.at("text").get<std::string>();
    resp.usage.prompt_tokens = j.value("prompt_tokens", 0L);
    resp.usage.completion_tokens = j.value("completion_tokens", 0L);
    resp.cache_hit = true;
    return resp;
  } catch (const json::exception&) {
    return std::nullopt;  // unreadable entry is treated as a miss, never mutated
  }
}

void Gateway::cache_store(const std::string& key, const ChatRequest& req, const ChatResponse& resp) {
  if (opts_.cache_dir.empty()) return;
  std::lock_guard lock(cache_write_mu_);
  fs::path p = cache_path(opts_.cache_dir, key);
  if (fs::exists(p)) return;  // append-only
  fs::create_directories(p.parent_path());
  json j{{"tag", req.tag},
         {"text", resp.text},
         {"prompt_tokens", resp.usage.prompt_tokens},
         {"completion_tokens", resp.usage.completion_tokens}};
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    f << j.dump();
  }
  fs::rename(tmp, p);
}

ChatResponse Gateway::complete(const ChatRequest& req) {
  if (req.messages.empty()) throw LlmError("empty message list");

  std::string key = request_key(req);
  if (auto cached = cache_lookup(key)) return *cached;
  if (opts_.offline) throw LlmError("offline mode: cache miss for tag '" + req.tag + "'");

  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return in_flight_ < opts_.max_in_flight; });
    ++in_flight_;
  }
  struct Release {
    Gateway* g;
    ~Release() {
      {
        std::lock_guard lock(g->mu_);
        --g->in_flight_;
      }
      g->cv_.notify_one();
    }
  } release{this};

  int attempts = 0;
  int backoff = opts_.backoff_ms;
  for (;;) {
    ++attempts;
    try {
      ChatResponse resp = provider_->complete(req);
      resp.attempts = attempts;
      cache_store(key, req, resp);
      return resp;
    } catch (const LlmError& e) {
      if (!e.retryable || attempts > opts_.max_retries) throw;
      int wait_ms = e.retry_after_ms > 0 ? e.retry_after_ms : backoff;
      std::this_thread::sleep_for(std::chrono::milliseconds(wait_ms));
      backoff *= 2;
    }
  }
}

}  // namespace smart::llm
