#include <cmath>

#include "doctest.h"
#include "hsevo/errors.hpp"
#include "hsevo/harmony_search.hpp"

using namespace hsevo;

TEST_CASE("harmony memory keeps the best rows sorted") {
  HarmonyMemory m(3);
  CHECK(m.offer({{1}, 5}));
  CHECK(m.offer({{2}, 1}));
  CHECK(m.offer({{3}, 3}));
  CHECK_FALSE(m.offer({{4}, 5}));
  CHECK(m.offer({{5}, 2}));
  REQUIRE(m.rows().size() == 3);
  CHECK(m.rows()[0].objective == 1);
  CHECK(m.rows()[1].objective == 2);
  CHECK(m.rows()[2].objective == 3);
}

TEST_CASE("config validation") {
  HarmonyConfig c;
  CHECK_NOTHROW(c.validate());
  c.hmcr = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = HarmonyConfig{};
  c.memory_size = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("hs_optimize stays in range and reports evaluations") {
  std::mt19937_64 rng(3);
  HarmonyConfig cfg;
  cfg.max_iterations = 50;
  std::vector<NamedRange> ranges{{"x", -2, 2}, {"y", 10, 20}};
  std::size_t calls = 0;
  auto f = [&](const std::vector<double>& v) -> std::optional<double> {
    ++calls;
    CHECK(v[0] >= -2);
    CHECK(v[0] <= 2);
    CHECK(v[1] >= 10);
    CHECK(v[1] <= 20);
    return (v[0] - 1) * (v[0] - 1) + (v[1] - 12) * (v[1] - 12);
  };
  const auto r = hs_optimize(ranges, f, cfg, rng);
  REQUIRE(r.best);
  CHECK(r.evaluations == calls);
  CHECK(r.evaluations == static_cast<std::size_t>(cfg.memory_size + cfg.max_iterations));
  for (std::size_t i = 1; i < r.best_history.size(); ++i) CHECK(r.best_history[i] <= r.best_history[i - 1]);
  CHECK(r.best->objective == r.best_history.back());
}

TEST_CASE("invalid candidates never enter memory") {
  std::mt19937_64 rng(1);
  HarmonyConfig cfg;
  cfg.max_iterations = 30;
  auto f = [](const std::vector<double>& v) -> std::optional<double> {
    if (v[0] > 0.5) return std::nullopt;
    return -v[0];
  };
  const auto r = hs_optimize({{"x", 0, 1}}, f, cfg, rng);
  REQUIRE(r.best);
  CHECK(r.best->values[0] <= 0.5);
  CHECK(r.invalid > 0);
  const auto none = hs_optimize({{"x", 0, 1}}, [](const std::vector<double>&) { return std::optional<double>{}; },
                                cfg, rng);
  CHECK_FALSE(none.best);
}

TEST_CASE("same seed, same search") {
  auto f = [](const std::vector<double>& v) -> std::optional<double> { return std::sin(5 * v[0]) + v[0]; };
  std::mt19937_64 a(9), b(9);
  const auto ra = hs_optimize({{"x", 0, 3}}, f, HarmonyConfig{}, a);
  const auto rb = hs_optimize({{"x", 0, 3}}, f, HarmonyConfig{}, b);
  CHECK(ra.best->values == rb.best->values);
  CHECK_THROWS_AS(hs_optimize({}, f, HarmonyConfig{}, a), HarmonySearchError);
}
