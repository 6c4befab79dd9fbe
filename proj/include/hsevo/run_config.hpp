#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hsevo/embedding.hpp"
#include "hsevo/harmony_search.hpp"
#include "hsevo/llm_gateway.hpp"
#include "hsevo/op.hpp"
#include "hsevo/prompts.hpp"
#include "hsevo/sandbox_client.hpp"
#include "hsevo/tsp.hpp"
#include "json.hpp"

namespace hsevo {

struct ProblemConfig {
  ProblemKind kind = ProblemKind::bpo;
  std::uint64_t instance_seed = 0;
  int n_instances = 5;
  // Items per instance (BPO) or nodes per instance (TSP, OP).
  int size = 5000;
  double bpo_capacity = 100.0;
  GlsConfig gls{};
  AcoConfig aco{};
  double op_max_len = 3.0;
  PrizeConvention prize_convention = PrizeConvention::printed;
  std::string tsp_reference_file;  // empty: bundled data/tsp100_reference.txt
  double eval_timeout_seconds = 50.0;

  static ProblemConfig defaults_for(ProblemKind kind);
};

enum class BackendKind { mock, http };

struct RunConfig {
  ProblemConfig problem{};
  int pop_init = 30;
  int pop_size = 10;
  double mutation_rate = 0.5;
  std::int64_t budget_tokens = 425000;
  double alpha = 0.95;
  bool include_invalid = true;
  HarmonyConfig hs{};
  std::uint64_t seed = 0;
  std::vector<std::string> roles = default_personas();
  double temperature = 1.0;
  int max_generations = 0;  // 0: until the budget runs out
  int workers = 1;

  BackendKind backend = BackendKind::mock;
  std::string mock_dir;
  std::string llm_endpoint;
  std::string llm_model;

  EmbedderConfig embedder{};
  SandboxOptions sandbox{};

  // One message per problem; empty when valid.
  std::vector<std::string> validation_errors() const;
  void validate() const;

  // Fills environment-derived fields (LLM_*, EMBED_*) so the snapshot is
  // explicit. Secrets are read from the environment at run time only.
  RunConfig resolved() const;

  nlohmann::ordered_json to_json() const;
  // Keys absent from `j` keep the values of `base`; unknown keys throw.
  static RunConfig from_json(const nlohmann::json& j, const RunConfig& base);
  static RunConfig load(const std::filesystem::path& path, const RunConfig& base);
};

std::string to_string(BackendKind b);
std::string to_string(PrizeConvention p);

}  // namespace hsevo
