#include "hsevo/run_config.hpp"

#include <cmath>
#include <set>

#include "hsevo/errors.hpp"
#include "hsevo/text_util.hpp"

namespace hsevo {

std::string to_string(BackendKind b) { return b == BackendKind::mock ? "mock" : "http"; }
std::string to_string(PrizeConvention p) { return p == PrizeConvention::printed ? "printed" : "kool"; }

ProblemConfig ProblemConfig::defaults_for(ProblemKind kind) {
  ProblemConfig c;
  c.kind = kind;
  switch (kind) {
    case ProblemKind::bpo:
      c.n_instances = 5;
      c.size = 5000;
      c.eval_timeout_seconds = 50.0;
      break;
    case ProblemKind::tsp_gls:
      c.n_instances = 64;
      c.size = 100;
      c.gls.iterations = 1000;
      c.eval_timeout_seconds = 100.0;
      break;
    case ProblemKind::op_aco:
      c.n_instances = 64;
      c.size = 50;
      c.eval_timeout_seconds = 50.0;
      break;
  }
  return c;
}

std::vector<std::string> RunConfig::validation_errors() const {
  std::vector<std::string> e;
  if (pop_init < 1) e.push_back("pop_init must be >= 1");
  if (pop_size < 1) e.push_back("pop_size must be >= 1");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) e.push_back("mutation_rate must lie in [0, 1]");
  if (budget_tokens < 0) e.push_back("budget_tokens must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) e.push_back("alpha must lie in [0, 1]");
  if (roles.empty()) e.push_back("roles must not be empty");
  if (max_generations < 0) e.push_back("max_generations must be >= 0");
  if (workers < 1) e.push_back("workers must be >= 1");
  if (!std::isfinite(temperature) || temperature < 0.0) e.push_back("temperature must be finite and >= 0");
  try {
    hs.validate();
  } catch (const ConfigError& err) {
    e.emplace_back(err.what());
  }
  try {
    embedder.validate();
  } catch (const ConfigError& err) {
    e.emplace_back(err.what());
  }
  const auto& p = problem;
  if (p.n_instances < 1) e.push_back("problem.n_instances must be >= 1");
  if (p.size < 1) e.push_back("problem.size must be >= 1");
  if (p.kind == ProblemKind::op_aco && p.size < 2) e.push_back("problem.size must be >= 2 for OP");
  if (p.gls.iterations < 1) e.push_back("problem.gls_iterations must be >= 1");
  if (p.gls.perturbation_moves < 0) e.push_back("problem.perturbation_moves must be >= 0");
  if (p.aco.n_ants < 1 || p.aco.iterations < 1) e.push_back("problem.aco_ants and aco_iterations must be >= 1");
  if (!(p.eval_timeout_seconds > 0.0)) e.push_back("problem.eval_timeout_seconds must be positive");
  if (!(p.op_max_len > 0.0)) e.push_back("problem.op_max_len must be positive");
  if (!(p.bpo_capacity > 0.0)) e.push_back("problem.bpo_capacity must be positive");
  if (backend == BackendKind::mock) {
    if (mock_dir.empty()) {
      e.push_back("mock backend needs mock_dir (--mock-dir)");
    } else if (!std::filesystem::is_directory(mock_dir)) {
      e.push_back("mock_dir '" + mock_dir + "' is not a directory");
    }
  } else {
    if (llm_endpoint.empty()) e.push_back("http backend needs llm_endpoint (LLM_ENDPOINT)");
    if (llm_model.empty()) e.push_back("http backend needs llm_model (LLM_MODEL)");
  }
  if (sandbox.command.empty()) e.push_back("sandbox_command must not be empty");
  return e;
}

void RunConfig::validate() const {
  const auto errs = validation_errors();
  if (errs.empty()) return;
  std::string msg;
  for (const auto& x : errs) msg += x + "\n";
  throw ConfigError(msg);
}

RunConfig RunConfig::resolved() const {
  RunConfig r = *this;
  if (r.backend == BackendKind::http) {
    const auto env = HttpChatConfig::from_environment();
    if (r.llm_endpoint.empty()) r.llm_endpoint = env.endpoint;
    if (r.llm_model.empty()) r.llm_model = env.model;
  }
  r.embedder = r.embedder.with_environment();
  if (r.problem.tsp_reference_file.empty()) {
    r.problem.tsp_reference_file = std::string(HSEVO_DATA_DIR) + "/tsp100_reference.txt";
  }
  return r;
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["problem"] = to_string(problem.kind);
  j["instance_seed"] = problem.instance_seed;
  j["n_instances"] = problem.n_instances;
  j["instance_size"] = problem.size;
  j["bpo_capacity"] = problem.bpo_capacity;
  j["gls_iterations"] = problem.gls.iterations;
  j["perturbation_moves"] = problem.gls.perturbation_moves;
  j["gls_lambda"] = problem.gls.lambda;
  j["aco_ants"] = problem.aco.n_ants;
  j["aco_iterations"] = problem.aco.iterations;
  j["aco_evaporation"] = problem.aco.evaporation;
  j["aco_alpha"] = problem.aco.alpha;
  j["aco_beta"] = problem.aco.beta;
  j["op_max_len"] = problem.op_max_len;
  j["prize_convention"] = to_string(problem.prize_convention);
  j["tsp_reference_file"] = problem.tsp_reference_file;
  j["eval_timeout_seconds"] = problem.eval_timeout_seconds;
  j["pop_init"] = pop_init;
  j["pop_size"] = pop_size;
  j["mutation_rate"] = mutation_rate;
  j["budget_tokens"] = budget_tokens;
  j["alpha"] = alpha;
  j["include_invalid"] = include_invalid;
  j["hs_memory_size"] = hs.memory_size;
  j["hs_hmcr"] = hs.hmcr;
  j["hs_par"] = hs.par;
  j["hs_bandwidth"] = hs.bandwidth;
  j["hs_max_iterations"] = hs.max_iterations;
  j["seed"] = seed;
  j["roles"] = roles;
  j["temperature"] = temperature;
  j["max_generations"] = max_generations;
  j["workers"] = workers;
  j["backend"] = to_string(backend);
  j["mock_dir"] = mock_dir;
  j["llm_endpoint"] = llm_endpoint;
  j["llm_model"] = llm_model;
  j["embedder_backend"] = embedder.backend == EmbedderBackend::hash_fallback ? "hash_fallback" : "remote_model";
  j["embedder_endpoint"] = embedder.endpoint;
  j["embedder_dimension"] = embedder.dimension;
  j["embedder_cache"] = embedder.cache_path ? embedder.cache_path->string() : "";
  j["embedder_degrade_to_hash"] = embedder.degrade_to_hash;
  j["sandbox_command"] = sandbox.command;
  j["sandbox_memory_limit_bytes"] = sandbox.memory_limit_bytes;
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j, const RunConfig& base) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c = base;
  static const std::set<std::string> known = [] {
    std::set<std::string> k;
    const auto defaults = RunConfig{}.to_json();
    for (const auto& [key, _] : defaults.items()) k.insert(key);
    return k;
  }();
  std::string unknown;
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) unknown += " " + key;
  }
  if (!unknown.empty()) throw ConfigError("unknown config keys:" + unknown);

  try {
    if (j.contains("problem")) {
      const auto kind = problem_from_string(j["problem"].get<std::string>());
      if (kind != c.problem.kind) c.problem = ProblemConfig::defaults_for(kind);
    }
    auto& p = c.problem;
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("instance_seed", p.instance_seed);
    get("n_instances", p.n_instances);
    get("instance_size", p.size);
    get("bpo_capacity", p.bpo_capacity);
    get("gls_iterations", p.gls.iterations);
    get("perturbation_moves", p.gls.perturbation_moves);
    get("gls_lambda", p.gls.lambda);
    get("aco_ants", p.aco.n_ants);
    get("aco_iterations", p.aco.iterations);
    get("aco_evaporation", p.aco.evaporation);
    get("aco_alpha", p.aco.alpha);
    get("aco_beta", p.aco.beta);
    get("op_max_len", p.op_max_len);
    if (j.contains("prize_convention")) {
      const auto s = j["prize_convention"].get<std::string>();
      if (s == "printed") p.prize_convention = PrizeConvention::printed;
      else if (s == "kool") p.prize_convention = PrizeConvention::kool;
      else throw ConfigError("prize_convention must be 'printed' or 'kool'");
    }
    get("tsp_reference_file", p.tsp_reference_file);
    get("eval_timeout_seconds", p.eval_timeout_seconds);
    get("pop_init", c.pop_init);
    get("pop_size", c.pop_size);
    get("mutation_rate", c.mutation_rate);
    get("budget_tokens", c.budget_tokens);
    get("alpha", c.alpha);
    get("include_invalid", c.include_invalid);
    get("hs_memory_size", c.hs.memory_size);
    get("hs_hmcr", c.hs.hmcr);
    get("hs_par", c.hs.par);
    get("hs_bandwidth", c.hs.bandwidth);
    get("hs_max_iterations", c.hs.max_iterations);
    get("seed", c.seed);
    get("roles", c.roles);
    get("temperature", c.temperature);
    get("max_generations", c.max_generations);
    get("workers", c.workers);
    if (j.contains("backend")) {
      const auto s = j["backend"].get<std::string>();
      if (s == "mock") c.backend = BackendKind::mock;
      else if (s == "http") c.backend = BackendKind::http;
      else throw ConfigError("backend must be 'mock' or 'http'");
    }
    get("mock_dir", c.mock_dir);
    get("llm_endpoint", c.llm_endpoint);
    get("llm_model", c.llm_model);
    if (j.contains("embedder_backend")) {
      const auto s = j["embedder_backend"].get<std::string>();
      if (s == "hash_fallback") c.embedder.backend = EmbedderBackend::hash_fallback;
      else if (s == "remote_model") c.embedder.backend = EmbedderBackend::remote_model;
      else throw ConfigError("embedder_backend must be 'hash_fallback' or 'remote_model'");
    }
    get("embedder_endpoint", c.embedder.endpoint);
    get("embedder_dimension", c.embedder.dimension);
    if (j.contains("embedder_cache")) {
      const auto s = j["embedder_cache"].get<std::string>();
      c.embedder.cache_path = s.empty() ? std::nullopt : std::optional<std::filesystem::path>(s);
    }
    get("embedder_degrade_to_hash", c.embedder.degrade_to_hash);
    get("sandbox_command", c.sandbox.command);
    get("sandbox_memory_limit_bytes", c.sandbox.memory_limit_bytes);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path, const RunConfig& base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return from_json(j, base);
}

}  // namespace hsevo
