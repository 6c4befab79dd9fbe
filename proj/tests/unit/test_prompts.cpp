#include <set>

#include "doctest.h"
#include "hsevo/errors.hpp"
#include "hsevo/prompts.hpp"

using namespace hsevo;

TEST_CASE("problem names") {
  CHECK(problem_from_string("tsp") == ProblemKind::tsp_gls);
  CHECK(to_string(ProblemKind::op_aco) == "op_aco");
  CHECK_THROWS_AS(problem_from_string("knapsack"), ConfigError);
}

TEST_CASE("seed programs and signatures agree") {
  for (auto k : {ProblemKind::bpo, ProblemKind::tsp_gls, ProblemKind::op_aco}) {
    const auto& info = prompt_info(k);
    CHECK(info.seed_function.rfind("import numpy as np", 0) == 0);
    CHECK(info.signature_template.find("{version}") != std::string::npos);
    CHECK(info.seed_function.find("def " + info.function_name) != std::string::npos);
  }
}

TEST_CASE("ten distinct personas") {
  const auto& p = default_personas();
  CHECK(p.size() == 10);
  CHECK(std::set<std::string>(p.begin(), p.end()).size() == 10);
}

TEST_CASE("ordinals") {
  CHECK(prompts::ordinal(1) == "1st");
  CHECK(prompts::ordinal(2) == "2nd");
  CHECK(prompts::ordinal(3) == "3rd");
  CHECK(prompts::ordinal(4) == "4th");
  CHECK(prompts::ordinal(11) == "11th");
  CHECK(prompts::ordinal(12) == "12th");
  CHECK(prompts::ordinal(13) == "13th");
  CHECK(prompts::ordinal(21) == "21st");
  CHECK(prompts::ordinal(22) == "22nd");
}

TEST_CASE("prompts embed their inputs") {
  const auto& info = prompt_info(ProblemKind::bpo);
  const auto task = prompts::task_description(default_personas()[0], info);
  CHECK(task.find(info.problem_description) != std::string::npos);
  const auto p1 = prompts::flash_phase1_user({"code A", "code B"});
  CHECK(p1.find("[Heuristics 1st]") != std::string::npos);
  CHECK(p1.find("[Heuristics 2nd]") != std::string::npos);
  CHECK(p1.find("code B") != std::string::npos);
  CHECK(p1.find("code A") < p1.find("code B"));
  const auto p2 = prompts::flash_phase2_user("current", {"good one"}, {"bad one"});
  CHECK(p2.find("current") != std::string::npos);
  CHECK(p2.find("good one") != std::string::npos);
  CHECK(p2.find("bad one") != std::string::npos);
  const auto cx = prompts::crossover_user(task, info, "BETTER", "WORSE", "GUIDE");
  CHECK(cx.find("priority_v0") != std::string::npos);
  CHECK(cx.find("priority_v1") != std::string::npos);
  CHECK(cx.find("BETTER") < cx.find("WORSE"));
  CHECK(cx.find("GUIDE") != std::string::npos);
  const auto mu = prompts::mutation_prompt(task, info, "ELITE", "ANALYSIS");
  CHECK(mu.find("ELITE") != std::string::npos);
  CHECK(mu.find("ANALYSIS") != std::string::npos);
  CHECK(prompts::harmony_user("CODE").find("CODE") != std::string::npos);
  CHECK(prompts::harmony_user("x").find("parameter_ranges") != std::string::npos);
}

TEST_CASE("braces in code survive rendering") {
  const auto& info = prompt_info(ProblemKind::bpo);
  const std::string code = "d = {'a': 1}\ns = f'{x}'\n";
  CHECK(prompts::harmony_user(code).find(code) != std::string::npos);
  CHECK(prompts::crossover_user("t", info, code, code, "{guide}").find("{guide}") != std::string::npos);
}
