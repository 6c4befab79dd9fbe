#include "hsevo/llm_gateway.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include "hsevo/errors.hpp"
#include "hsevo/text_util.hpp"
#include "json.hpp"

namespace hsevo {

std::string to_string(RoleKind r) { return r == RoleKind::generator ? "generator" : "reflector"; }

std::uint64_t ChatRequest::hash() const {
  std::string material = to_string(role_kind);
  material += '\n';
  material += system_prompt;
  material += '\x1e';
  material += user_prompt;
  return fnv1a64(material);
}

TokenBudget::TokenBudget(std::int64_t max_tokens) : max_(max_tokens) {
  if (max_tokens < 0) throw ConfigError("token budget must be non-negative");
}

std::int64_t TokenBudget::used() const {
  std::lock_guard lock(mutex_);
  return used_;
}

std::int64_t TokenBudget::remaining() const {
  std::lock_guard lock(mutex_);
  return max_ - used_;
}

bool TokenBudget::exhausted() const { return remaining() <= 0; }

std::int64_t TokenBudget::reserve(std::int64_t estimate) {
  estimate = std::max<std::int64_t>(estimate, 1);
  std::lock_guard lock(mutex_);
  if (used_ + reserved_ + estimate > max_) {
    throw BudgetExhaustedError("token budget exhausted: used " + std::to_string(used_) + " of " +
                               std::to_string(max_) + ", request needs about " + std::to_string(estimate));
  }
  reserved_ += estimate;
  return estimate;
}

std::int64_t TokenBudget::settle(std::int64_t reservation, std::int64_t actual) {
  std::lock_guard lock(mutex_);
  reserved_ -= reservation;
  const auto charged = std::clamp<std::int64_t>(actual, 0, max_ - used_);
  used_ += charged;
  return charged;
}

void TokenBudget::release(std::int64_t reservation) {
  std::lock_guard lock(mutex_);
  reserved_ -= reservation;
}

std::int64_t estimate_tokens(const ChatRequest& req) {
  return static_cast<std::int64_t>(word_count(req.system_prompt) + word_count(req.user_prompt));
}

ScriptedMockBackend::ScriptedMockBackend(std::filesystem::path script_dir) : dir_(std::move(script_dir)) {
  if (!std::filesystem::is_directory(dir_)) throw ConfigError("mock script directory " + dir_.string() + " not found");
}

ChatReply ScriptedMockBackend::complete(const ChatRequest& req) {
  std::size_t index;
  {
    std::lock_guard lock(mutex_);
    index = next_[req.role_kind]++;
  }
  const auto override_file = dir_ / "by_hash" / (hex64(req.hash()) + ".txt");
  std::filesystem::path file;
  if (std::filesystem::is_regular_file(override_file)) {
    file = override_file;
  } else {
    char name[32];
    std::snprintf(name, sizeof(name), "%04zu.txt", index);
    file = dir_ / to_string(req.role_kind) / name;
    if (!std::filesystem::is_regular_file(file)) {
      throw MockScriptExhaustedError("mock script has no " + to_string(req.role_kind) + " reply #" +
                                     std::to_string(index) + " (" + file.string() + ")");
    }
  }
  ChatReply r;
  r.text = read_file(file);
  r.tokens = estimate_tokens(req) + static_cast<std::int64_t>(word_count(r.text));
  return r;
}

std::string ScriptedMockBackend::describe() const { return "mock:" + dir_.string(); }

std::size_t ScriptedMockBackend::calls(RoleKind r) const {
  std::lock_guard lock(mutex_);
  auto it = next_.find(r);
  return it == next_.end() ? 0 : it->second;
}

HttpChatConfig HttpChatConfig::from_environment() {
  HttpChatConfig c;
  if (const char* e = std::getenv("LLM_ENDPOINT")) c.endpoint = e;
  if (const char* m = std::getenv("LLM_MODEL")) c.model = m;
  if (const char* k = std::getenv("LLM_API_KEY")) c.api_key = k;
  return c;
}

HttpChatBackend::HttpChatBackend(HttpChatConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.endpoint.empty()) throw ConfigError("http backend needs LLM_ENDPOINT");
  if (cfg_.model.empty()) throw ConfigError("http backend needs LLM_MODEL");
}

ChatReply HttpChatBackend::complete(const ChatRequest& req) {
  nlohmann::json body = {
      {"model", cfg_.model},
      {"temperature", req.temperature},
      {"messages",
       nlohmann::json::array({{{"role", "system"}, {"content", req.system_prompt}},
                              {{"role", "user"}, {"content", req.user_prompt}}})},
  };
  Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + cfg_.api_key);
  const auto res = http_post(cfg_.endpoint, body.dump(), "application/json", headers, cfg_.retry, cfg_.timeout);
  if (res.status != 200) {
    throw TransportError("chat endpoint answered status " + std::to_string(res.status) + ": " +
                         res.body.substr(0, 300));
  }
  ChatReply r;
  try {
    const auto j = nlohmann::json::parse(res.body);
    r.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    if (j.contains("usage") && j["usage"].is_object()) {
      const auto& u = j["usage"];
      if (u.contains("total_tokens")) {
        r.tokens = u["total_tokens"].get<std::int64_t>();
      } else {
        r.tokens = u.value("prompt_tokens", std::int64_t{0}) + u.value("completion_tokens", std::int64_t{0});
      }
    } else {
      r.tokens = estimate_tokens(req) + static_cast<std::int64_t>(word_count(r.text));
    }
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed chat response: ") + e.what());
  }
  return r;
}

std::string HttpChatBackend::describe() const { return "http:" + cfg_.model + "@" + cfg_.endpoint; }

LlmGateway::LlmGateway(std::shared_ptr<LlmBackend> backend, std::shared_ptr<TokenBudget> budget)
    : backend_(std::move(backend)), budget_(std::move(budget)) {}

ChatReply LlmGateway::chat(const ChatRequest& req) {
  const auto reservation = budget_->reserve(estimate_tokens(req));
  ChatReply reply;
  try {
    reply = backend_->complete(req);
  } catch (...) {
    budget_->release(reservation);
    throw;
  }
  reply.tokens = budget_->settle(reservation, reply.tokens);
  std::lock_guard lock(mutex_);
  transcript_.push_back(
      TranscriptEntry{transcript_.size(), req.role_kind, req.system_prompt, req.user_prompt, reply.text, reply.tokens});
  return reply;
}

std::vector<TranscriptEntry> LlmGateway::transcript() const {
  std::lock_guard lock(mutex_);
  return transcript_;
}

std::int64_t LlmGateway::sum_of_call_tokens() const {
  std::lock_guard lock(mutex_);
  std::int64_t s = 0;
  for (const auto& e : transcript_) s += e.tokens;
  return s;
}

std::string transcript_jsonl(const std::vector<TranscriptEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    nlohmann::ordered_json j;
    j["index"] = e.index;
    j["role_kind"] = to_string(e.role_kind);
    j["tokens"] = e.tokens;
    j["system"] = e.system_prompt;
    j["user"] = e.user_prompt;
    j["reply"] = e.reply;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace hsevo
