#include "hsevo/sandbox_client.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include "hsevo/errors.hpp"

extern char** environ;

namespace hsevo {
namespace {

void ignore_sigpipe() {
  static const bool once = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)once;
}

[[noreturn]] void illegal(const std::string& what) { throw HeuristicError("illegal_state", what); }

}  // namespace

std::string to_string(SandboxSession::State s) {
  switch (s) {
    case SandboxSession::State::idle: return "idle";
    case SandboxSession::State::loaded: return "loaded";
    case SandboxSession::State::dead: return "dead";
  }
  return "?";
}

SandboxSession::SandboxSession(SandboxOptions opts) : opts_(std::move(opts)) {
  if (opts_.command.empty()) throw ConfigError("sandbox command is empty");
  ignore_sigpipe();
  spawn();
}

SandboxSession::~SandboxSession() {
  try {
    shutdown();
  } catch (...) {
  }
}

void SandboxSession::spawn() {
  int in_pipe[2], out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) throw HeuristicError("crash", std::string("pipe: ") + std::strerror(errno));
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw HeuristicError("crash", std::string("pipe: ") + std::strerror(errno));
  }

  // Everything the child needs is prepared before fork.
  std::vector<std::string> env_store;
  for (char** e = environ; *e; ++e) {
    const std::string kv = *e;
    if (kv.rfind("OPENBLAS_NUM_THREADS=", 0) == 0 || kv.rfind("OMP_NUM_THREADS=", 0) == 0 ||
        kv.rfind("MKL_NUM_THREADS=", 0) == 0) {
      continue;
    }
    env_store.push_back(kv);
  }
  env_store.emplace_back("OPENBLAS_NUM_THREADS=1");
  env_store.emplace_back("OMP_NUM_THREADS=1");
  env_store.emplace_back("MKL_NUM_THREADS=1");
  std::vector<char*> envp;
  for (auto& s : env_store) envp.push_back(s.data());
  envp.push_back(nullptr);
  std::vector<std::string> argv_store = opts_.command;
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  argv.push_back(nullptr);
  const std::string err_path = opts_.stderr_path.empty() ? "/dev/null" : opts_.stderr_path;
  const auto mem = opts_.memory_limit_bytes;

  const pid_t pid = fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
    throw HeuristicError("crash", std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    setpgid(0, 0);
    if (mem > 0) {
      struct rlimit rl;
      rl.rlim_cur = rl.rlim_max = static_cast<rlim_t>(mem);
      setrlimit(RLIMIT_AS, &rl);
    }
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    const int err = open(err_path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (err >= 0) dup2(err, STDERR_FILENO);
    signal(SIGPIPE, SIG_DFL);
    execvpe(argv[0], argv.data(), envp.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  pid_ = pid;
  buffer_.clear();
  loaded_fn_.clear();
  state_ = State::idle;
  ++spawns_;
}

void SandboxSession::kill_child() {
  if (pid_ > 0) {
    kill(-pid_, SIGKILL);
    kill(pid_, SIGKILL);
    int status = 0;
    while (waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
    }
  }
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  pid_ = -1;
  state_ = State::dead;
  loaded_fn_.clear();
}

void SandboxSession::write_line(const std::string& line) {
  std::size_t off = 0;
  while (off < line.size()) {
    const auto n = ::write(to_child_, line.data() + off, line.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      kill_child();
      throw HeuristicError("crash", "sandbox process is gone (write failed)");
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string SandboxSession::read_line(std::chrono::steady_clock::time_point deadline) {
  while (true) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      kill_child();
      throw HeuristicError("timeout", "sandbox did not answer in time; process killed");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int rc = poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1 << 30)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      kill_child();
      throw HeuristicError("crash", std::string("poll: ") + std::strerror(errno));
    }
    if (rc == 0) continue;
    char chunk[65536];
    const auto n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      kill_child();
      throw HeuristicError("crash", std::string("read: ") + std::strerror(errno));
    }
    if (n == 0) {
      kill_child();
      throw HeuristicError("crash", "sandbox process exited unexpectedly");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

nlohmann::json SandboxSession::roundtrip(const nlohmann::json& request, std::chrono::milliseconds timeout) {
  if (state_ == State::dead) illegal("sandbox session is dead; respawn it first");
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  write_line(request.dump() + "\n");
  const auto line = read_line(deadline);
  nlohmann::json resp;
  try {
    resp = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    kill_child();
    throw HeuristicError("protocol", "sandbox sent a malformed line: " + line.substr(0, 200));
  }
  if (!resp.is_object() || !resp.contains("ok") || !resp["ok"].is_boolean()) {
    kill_child();
    throw HeuristicError("protocol", "sandbox response lacks 'ok': " + line.substr(0, 200));
  }
  return resp;
}

namespace {

[[noreturn]] void raise_remote(const nlohmann::json& resp) {
  std::string kind = "runtime";
  std::string message = "sandbox reported an error";
  if (resp.contains("error") && resp["error"].is_object()) {
    kind = resp["error"].value("kind", kind);
    message = resp["error"].value("message", message);
  }
  throw HeuristicError(kind, message);
}

}  // namespace

void SandboxSession::load(const std::string& source, const std::string& fn, std::uint64_t seed) {
  if (state_ == State::dead) illegal("cannot load into a dead sandbox session");
  const auto resp = roundtrip(wire::load_request(source, fn, seed), opts_.load_timeout);
  if (!resp["ok"].get<bool>()) {
    if (state_ == State::loaded) state_ = State::idle;
    loaded_fn_.clear();
    raise_remote(resp);
  }
  state_ = State::loaded;
  loaded_fn_ = fn;
}

wire::Value SandboxSession::call(const std::vector<wire::Value>& args, std::chrono::milliseconds timeout,
                                 const std::optional<wire::Shape>& expect) {
  if (state_ != State::loaded) illegal("call requires a loaded session (state " + to_string(state_) + ")");
  const auto resp = roundtrip(wire::call_request(args, expect), timeout);
  if (!resp["ok"].get<bool>()) raise_remote(resp);
  if (!resp.contains("result")) {
    kill_child();
    throw HeuristicError("protocol", "sandbox response lacks 'result'");
  }
  auto value = wire::decode(resp["result"]);
  if (expect) wire::check(value, *expect);
  return value;
}

bool SandboxSession::ping(std::chrono::milliseconds timeout) {
  if (state_ == State::dead) return false;
  try {
    return roundtrip(wire::ping_request(), timeout)["ok"].get<bool>();
  } catch (const HeuristicError&) {
    return false;
  }
}

void SandboxSession::shutdown() {
  if (state_ == State::dead) return;
  try {
    write_line(wire::shutdown_request().dump() + "\n");
    read_line(std::chrono::steady_clock::now() + std::chrono::milliseconds(500));
  } catch (const HeuristicError&) {
  }
  kill_child();
}

void SandboxSession::respawn() {
  if (state_ != State::dead) kill_child();
  spawn();
}

}  // namespace hsevo
