#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "hsevo/errors.hpp"
#include "hsevo/run_config.hpp"

using namespace hsevo;

TEST_CASE("defaults match the published settings") {
  RunConfig c;
  CHECK(c.pop_init == 30);
  CHECK(c.pop_size == 10);
  CHECK(c.mutation_rate == 0.5);
  CHECK(c.budget_tokens == 425000);
  CHECK(c.hs.memory_size == 5);
  CHECK(c.hs.hmcr == 0.7);
  CHECK(c.hs.par == 0.5);
  CHECK(c.hs.bandwidth == 0.2);
  CHECK(c.hs.max_iterations == 5);
  const auto tsp = ProblemConfig::defaults_for(ProblemKind::tsp_gls);
  CHECK(tsp.n_instances == 64);
  CHECK(tsp.size == 100);
  CHECK(tsp.gls.iterations == 1000);
  CHECK(tsp.eval_timeout_seconds == 100.0);
  const auto bpo = ProblemConfig::defaults_for(ProblemKind::bpo);
  CHECK(bpo.n_instances == 5);
  CHECK(bpo.size == 5000);
}

TEST_CASE("validation lists every problem") {
  RunConfig c;
  c.pop_size = 0;
  c.alpha = 2;
  c.mock_dir = "";
  const auto errs = c.validation_errors();
  CHECK(errs.size() == 3);
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("json round-trip and unknown keys") {
  RunConfig c;
  c.problem = ProblemConfig::defaults_for(ProblemKind::op_aco);
  c.seed = 11;
  c.hs.max_iterations = 9;
  c.sandbox.command = {"python3", "peer.py"};
  const auto back = RunConfig::from_json(c.to_json(), RunConfig{});
  CHECK(back.to_json() == c.to_json());
  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json{{"pop_sise", 3}}, RunConfig{}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json{{"pop_size", "three"}}, RunConfig{}), ConfigError);
}

TEST_CASE("switching problem resets problem defaults, later keys still apply") {
  const auto c = RunConfig::from_json(nlohmann::json{{"problem", "tsp"}, {"n_instances", 3}}, RunConfig{});
  CHECK(c.problem.kind == ProblemKind::tsp_gls);
  CHECK(c.problem.n_instances == 3);
  CHECK(c.problem.size == 100);
}

TEST_CASE("the api key never reaches the snapshot") {
  setenv("LLM_API_KEY", "sk-secret-value", 1);
  RunConfig c;
  c.backend = BackendKind::http;
  c.llm_endpoint = "http://localhost:1/v1/chat/completions";
  c.llm_model = "m";
  CHECK(c.resolved().to_json().dump().find("sk-secret-value") == std::string::npos);
  unsetenv("LLM_API_KEY");
}
