#include <set>

#include "doctest.h"
#include "hsevo/errors.hpp"
#include "hsevo/evolution.hpp"
#include "hsevo/normalizer.hpp"
#include "hsevo/text_util.hpp"

using namespace hsevo;

namespace {

// Deterministic pseudo-score from the normalized program; prose is INVALID.
EvaluationResult fake_score(const std::string& source) {
  EvaluationResult r;
  if (source.find("def ") == std::string::npos) {
    r.failure = Failure{"missing_function", "no def"};
    return r;
  }
  const auto h = fnv1a64(normalize_or_fallback(source).text);
  r.objective = Objective::of(-static_cast<double>(h % 1000) / 1000.0);
  return r;
}

struct Rig {
  std::shared_ptr<LlmGateway> gateway;
  std::unique_ptr<Engine> engine;
};

Rig make_rig(std::int64_t budget, int max_generations) {
  RunConfig cfg;
  cfg.pop_init = 6;
  cfg.pop_size = 3;
  cfg.mutation_rate = 1.0;
  cfg.max_generations = max_generations;
  cfg.seed = 7;
  cfg.mock_dir = std::string(HSEVO_TEST_FIXTURES) + "/mock_bpo";
  std::vector<std::unique_ptr<HeuristicEvaluator>> workers;
  workers.push_back(std::make_unique<CallbackEvaluator>(fake_score));
  workers.push_back(std::make_unique<CallbackEvaluator>(fake_score));
  auto pool = std::make_shared<EvaluatorPool>(std::move(workers));
  auto gateway = std::make_shared<LlmGateway>(std::make_shared<ScriptedMockBackend>(cfg.mock_dir),
                                              std::make_shared<TokenBudget>(budget));
  auto embedder = std::shared_ptr<Embedder>(make_embedder(EmbedderConfig{}));
  return {gateway, std::make_unique<Engine>(cfg, gateway, pool, embedder)};
}

Individual ind(std::uint64_t id, std::optional<double> obj) {
  Individual i;
  i.id = IndividualId{id};
  i.objective = obj ? Objective::of(*obj) : Objective::invalid();
  i.source = "def f():\n    return " + std::to_string(id) + "\n";
  return i;
}

}  // namespace

TEST_CASE("parent selection draws distinct valid members") {
  Archive a;
  a.add(ind(0, 1.0));
  a.add(ind(1, std::nullopt));
  a.add(ind(2, 0.5));
  a.add(ind(3, 0.7));
  Population p{{IndividualId{0}, IndividualId{1}, IndividualId{2}, IndividualId{3}}, 4};
  std::mt19937_64 rng(1);
  for (const auto& [x, y] : select_parent_pairs(p, a, 50, rng)) {
    CHECK(x != y);
    CHECK(to_underlying(x) != 1);
    CHECK(to_underlying(y) != 1);
  }
  Population thin{{IndividualId{0}, IndividualId{1}}, 2};
  CHECK_THROWS_AS(select_parent_pairs(thin, a, 3, rng), SelectionError);
}

TEST_CASE("survival keeps the best valid candidates, earliest on ties") {
  Archive a;
  a.add(ind(0, 1.0));
  a.add(ind(1, std::nullopt));
  a.add(ind(2, 0.5));
  a.add(ind(3, 0.5));
  a.add(ind(4, 2.0));
  const auto p = survive({IndividualId{4}, IndividualId{3}, IndividualId{2}, IndividualId{1}, IndividualId{0}}, a, 3);
  REQUIRE(p.members.size() == 3);
  CHECK(to_underlying(p.members[0]) == 2);
  CHECK(to_underlying(p.members[1]) == 3);
  CHECK(to_underlying(p.members[2]) == 0);
  CHECK(*archive_best(a) == 0.5);
}

TEST_CASE("ranked_unique orders by objective and drops duplicate programs") {
  Archive a;
  a.add(ind(0, 3.0));
  auto dup = ind(1, 1.0);
  dup.source = "def f():\n    return 0\n";
  a.add(dup);
  a.add(ind(2, 2.0));
  const auto r = ranked_unique({{IndividualId{0}, IndividualId{1}}, {IndividualId{2}, IndividualId{0}}}, a);
  REQUIRE(r.size() == 2);
  CHECK(to_underlying(r[0].id) == 1);
  CHECK(to_underlying(r[1].id) == 2);
}

TEST_CASE("three generations over the scripted fixture") {
  auto rig = make_rig(425000, 3);
  auto& e = *rig.engine;
  e.run();
  CHECK(e.stop_reason() == StopReason::max_generations);
  CHECK(e.generations_completed() == 3);
  REQUIRE(e.records().size() == 4);
  for (std::size_t t = 0; t < 4; ++t) CHECK(e.records()[t].timestep == static_cast<int>(t));
  for (std::size_t t = 1; t < 4; ++t) {
    CHECK(e.records()[t].archive_size > e.records()[t - 1].archive_size);
    CHECK(*e.records()[t].best_objective <= *e.records()[t - 1].best_objective);
    CHECK(e.records()[t].tokens_used >= e.records()[t - 1].tokens_used);
  }
  // seed + 5 init, then 3 crossovers + 1 mutation + 1 tuned per generation
  CHECK(e.archive().size() == 21);
  CHECK(e.population().members.size() == 3);
  CHECK(e.reflection().good_reflections.size() + e.reflection().bad_reflections.size() == 3);
  REQUIRE(e.harmony_outcomes().size() == 3);
  std::set<std::uint64_t> bases;
  for (const auto& h : e.harmony_outcomes()) {
    CHECK(h.status == "tuned");
    CHECK(e.is_tuned(h.base));
    CHECK(bases.insert(to_underlying(h.base)).second);
    REQUIRE(h.tuned);
    const auto t = e.archive().get(*h.tuned);
    CHECK(t.origin == Origin::harmony_tuned);
    CHECK(t.tuned);
  }
  std::size_t invalid = 0;
  for (const auto& i : e.archive().entries()) invalid += i.objective.valid() ? 0 : 1;
  CHECK(invalid == 1);
  CHECK(rig.gateway->sum_of_call_tokens() == rig.gateway->budget().used());
  CHECK(rig.gateway->transcript().size() == 26);
}

TEST_CASE("personas rotate during initialization") {
  auto rig = make_rig(425000, 1);
  rig.engine->initialize();
  const auto entries = rig.engine->archive().entries();
  const auto& roles = default_personas();
  CHECK(entries[0].origin == Origin::seed);
  for (std::size_t i = 1; i < entries.size(); ++i) CHECK(entries[i].role_label == roles[i - 1]);
}

TEST_CASE("a run is reproducible") {
  auto a = make_rig(425000, 2);
  auto b = make_rig(425000, 2);
  a.engine->run();
  b.engine->run();
  CHECK(a.engine->archive().entries() == b.engine->archive().entries());
}

TEST_CASE("budget exhaustion during initialization stops gracefully") {
  auto rig = make_rig(600, 0);
  rig.engine->run();
  CHECK(rig.engine->stop_reason() == StopReason::budget_exhausted);
  CHECK(rig.gateway->budget().used() <= 600);
  REQUIRE(rig.engine->records().size() == 1);
  CHECK_FALSE(rig.engine->records()[0].complete);
  CHECK(rig.engine->generations_completed() == 0);
}

TEST_CASE("running out of scripted replies ends the run") {
  auto rig = make_rig(425000, 0);
  rig.engine->run();
  CHECK(rig.engine->stop_reason() == StopReason::mock_exhausted);
  CHECK(rig.engine->generations_completed() == 3);
}
