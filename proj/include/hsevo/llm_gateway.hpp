#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "hsevo/http_client.hpp"

namespace hsevo {

enum class RoleKind { generator, reflector };
std::string to_string(RoleKind r);

struct ChatRequest {
  RoleKind role_kind = RoleKind::generator;
  std::string system_prompt;
  std::string user_prompt;
  double temperature = 1.0;

  // Stable content hash used by the mock override directory.
  std::uint64_t hash() const;
};

struct ChatReply {
  std::string text;
  std::int64_t tokens = 0;
};

// Tokens are reserved against an estimate before a call and settled with the
// actual count afterwards. used() never exceeds max() and never decreases.
class TokenBudget {
 public:
  explicit TokenBudget(std::int64_t max_tokens);

  std::int64_t max() const { return max_; }
  std::int64_t used() const;
  std::int64_t remaining() const;
  bool exhausted() const;

  // Throws BudgetExhaustedError when used + outstanding reservations +
  // estimate would pass max. Returns a reservation handle.
  std::int64_t reserve(std::int64_t estimate);
  // Releases the reservation and charges min(actual, remaining). Returns the
  // amount charged.
  std::int64_t settle(std::int64_t reservation, std::int64_t actual);
  void release(std::int64_t reservation);

 private:
  mutable std::mutex mutex_;
  std::int64_t max_;
  std::int64_t used_ = 0;
  std::int64_t reserved_ = 0;
};

// Request-size estimate: whitespace-separated words of both prompts.
std::int64_t estimate_tokens(const ChatRequest& req);

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual ChatReply complete(const ChatRequest& req) = 0;
  virtual std::string describe() const = 0;
};

// Replays generator/NNNN.txt and reflector/NNNN.txt (0-based per role).
// A file by_hash/<16 hex digits of the request hash>.txt takes precedence
// over the sequence file; the role counter advances either way.
class ScriptedMockBackend : public LlmBackend {
 public:
  explicit ScriptedMockBackend(std::filesystem::path script_dir);
  ChatReply complete(const ChatRequest& req) override;
  std::string describe() const override;
  std::size_t calls(RoleKind r) const;

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  std::map<RoleKind, std::size_t> next_;
};

struct HttpChatConfig {
  std::string endpoint;  // full chat-completions URL
  std::string model;
  std::string api_key;
  RetryPolicy retry{};
  std::chrono::seconds timeout{120};

  // Reads LLM_ENDPOINT, LLM_MODEL, LLM_API_KEY.
  static HttpChatConfig from_environment();
};

class HttpChatBackend : public LlmBackend {
 public:
  explicit HttpChatBackend(HttpChatConfig cfg);
  ChatReply complete(const ChatRequest& req) override;
  std::string describe() const override;

 private:
  HttpChatConfig cfg_;
};

struct TranscriptEntry {
  std::size_t index = 0;
  RoleKind role_kind = RoleKind::generator;
  std::string system_prompt;
  std::string user_prompt;
  std::string reply;
  std::int64_t tokens = 0;
};

// Budget-checked access to a backend, with a transcript of every exchange.
class LlmGateway {
 public:
  LlmGateway(std::shared_ptr<LlmBackend> backend, std::shared_ptr<TokenBudget> budget);

  ChatReply chat(const ChatRequest& req);

  TokenBudget& budget() { return *budget_; }
  const TokenBudget& budget() const { return *budget_; }
  std::vector<TranscriptEntry> transcript() const;
  std::int64_t sum_of_call_tokens() const;

 private:
  std::shared_ptr<LlmBackend> backend_;
  std::shared_ptr<TokenBudget> budget_;
  mutable std::mutex mutex_;
  std::vector<TranscriptEntry> transcript_;
};

std::string transcript_jsonl(const std::vector<TranscriptEntry>& entries);

}  // namespace hsevo
