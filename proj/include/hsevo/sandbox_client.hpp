#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <sys/types.h>

#include "hsevo/wire.hpp"

namespace hsevo {

struct SandboxOptions {
  std::vector<std::string> command = {"python3", "-m", "hsevo_sandbox"};
  std::uint64_t memory_limit_bytes = 1ULL << 30;  // 0 disables the cap
  std::chrono::milliseconds load_timeout{30000};
  // Where the child's stderr goes; empty means /dev/null.
  std::string stderr_path;
};

// Client end of the line-delimited JSON protocol spoken with a heuristic
// sandbox process over its stdin/stdout. One request, one response.
//
// States: idle after spawn, loaded after a successful load, dead after a
// timeout, crash or shutdown. respawn() returns a dead session to idle.
class SandboxSession {
 public:
  enum class State { idle, loaded, dead };

  explicit SandboxSession(SandboxOptions opts);
  ~SandboxSession();
  SandboxSession(const SandboxSession&) = delete;
  SandboxSession& operator=(const SandboxSession&) = delete;

  // Throws HeuristicError with the sandbox's error kind (syntax,
  // missing_function, banned_import, ...). A failed load leaves the session
  // usable.
  void load(const std::string& source, const std::string& fn, std::uint64_t seed = 0);

  // Calls the loaded function. On timeout the child is killed, the session
  // becomes dead and HeuristicError(timeout) is thrown.
  wire::Value call(const std::vector<wire::Value>& args, std::chrono::milliseconds timeout,
                   const std::optional<wire::Shape>& expect = std::nullopt);

  bool ping(std::chrono::milliseconds timeout);
  // Idempotent.
  void shutdown();
  void respawn();

  State state() const { return state_; }
  pid_t pid() const { return pid_; }
  std::size_t spawn_count() const { return spawns_; }
  const std::string& loaded_function() const { return loaded_fn_; }

 private:
  void spawn();
  void kill_child();
  nlohmann::json roundtrip(const nlohmann::json& request, std::chrono::milliseconds timeout);
  void write_line(const std::string& line);
  std::string read_line(std::chrono::steady_clock::time_point deadline);

  SandboxOptions opts_;
  State state_ = State::dead;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::string loaded_fn_;
  std::size_t spawns_ = 0;
};

std::string to_string(SandboxSession::State s);

}  // namespace hsevo
