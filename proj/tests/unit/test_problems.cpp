#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "hsevo/bpo.hpp"
#include "hsevo/errors.hpp"
#include "hsevo/op.hpp"
#include "hsevo/tsp.hpp"

using namespace hsevo;

TEST_CASE("Martello-Toth L2 bound oracles") {
  CHECK(mt_lower_bound({60, 50, 40, 30, 20}, 100) == 2);
  CHECK(mt_lower_bound({51, 51, 51}, 100) == 3);
  CHECK(mt_lower_bound({50, 50, 50, 50}, 100) == 2);
  CHECK(mt_lower_bound({}, 100) == 0);
}

TEST_CASE("online packing of four halves") {
  BpoInstance inst{{50, 50, 50, 50}, 100, 0};
  const auto p = pack_online(inst, bpo_seed_priority);
  CHECK(p.loads.size() == 2);
  CHECK(bpo_score(inst, p) == -1.0);
}

TEST_CASE("packing respects capacity and follows argmax") {
  const auto inst = gen_bpo(3, 300);
  for (double x : inst.items) {
    CHECK(x >= 1);
    CHECK(x <= 100);
    CHECK(x == std::round(x));
  }
  const auto p = pack_online(inst, bpo_seed_priority);
  for (double l : p.loads) CHECK(l <= 100.0);
  CHECK(static_cast<std::int64_t>(p.loads.size()) >= mt_lower_bound(inst.items, 100));
  // A nan score wins, like numpy.argmax.
  BpoInstance two{{60, 30, 30}, 100, 0};
  const auto q = pack_online(two, [](double, const std::vector<double>& caps) {
    std::vector<double> s(caps.size(), 0.0);
    s.back() = std::nan("");
    return s;
  });
  CHECK(q.bin_of == std::vector<std::size_t>{0, 0, 1});
  auto bad_shape = [](double, const std::vector<double>&) { return std::vector<double>{1, 2, 3}; };
  BpoInstance three{{10, 10}, 100, 0};
  CHECK_THROWS_AS(pack_online(three, bad_shape), HeuristicError);
}

TEST_CASE("bpo evaluation is INVALID when any instance fails") {
  std::vector<BpoInstance> insts{gen_bpo(0, 50), gen_bpo(1, 50)};
  const auto ok = eval_bpo(bpo_seed_priority, insts);
  REQUIRE(ok.objective.valid());
  CHECK(ok.objective.value() < 0);
  CHECK(ok.objective.value() >= -1);
  const auto bad = eval_bpo([](double, const std::vector<double>&) -> std::vector<double> {
    throw HeuristicError("runtime", "boom");
  }, insts);
  CHECK_FALSE(bad.objective.valid());
  CHECK(bad.failure->kind == "runtime");
}

TEST_CASE("tsp tours on the unit square") {
  TspInstance sq{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 0};
  const auto d = euclidean_matrix(sq.coords);
  CHECK(tour_length({0, 1, 2, 3}, d) == doctest::Approx(4.0));
  CHECK(tour_length({0, 2, 1, 3}, d) == doctest::Approx(2 + 2 * std::sqrt(2.0)));
  CHECK(exact_tsp(sq).length == doctest::Approx(4.0));
  Tour t{0, 2, 1, 3};
  two_opt(t, d);
  CHECK(tour_length(t, d) == doctest::Approx(4.0));
  CHECK(is_permutation_tour(t, 4));
  CHECK_FALSE(is_permutation_tour({0, 1, 1, 3}, 4));
  CHECK_THROWS_AS(exact_tsp(gen_tsp(0, 12)), OracleTooLargeError);
}

TEST_CASE("gls never beats the exact tour and rejects bad guides") {
  const auto inst = gen_tsp(5, 8);
  const double opt = exact_tsp(inst).length;
  GlsConfig cfg;
  cfg.iterations = 50;
  const auto r = gls_solve(inst, tsp_seed_update, cfg);
  CHECK(r.best.length >= opt - 1e-9);
  CHECK(is_permutation_tour(r.best.tour, 8));
  CHECK(r.heuristic_calls == cfg.iterations - 1);
  auto bad = [](const Matrix& d, const std::vector<std::int64_t>&, const Matrix&) {
    Matrix m = d;
    m(0, 1) = INFINITY;
    return m;
  };
  CHECK_THROWS_AS(gls_solve(inst, bad, cfg), HeuristicError);
}

TEST_CASE("tsp reference file parsing") {
  const auto p = std::filesystem::temp_directory_path() / "hsevo_unit_ref.txt";
  std::ofstream(p) << "# comment\n0 100 7.5\n1 50 6.0\n2 100 7.25\n";
  const auto ref = load_tsp_reference(p, 100);
  CHECK(ref.size() == 2);
  CHECK(ref.at(2) == 7.25);
}

TEST_CASE("op prizes under both conventions") {
  const auto printed = gen_op(1, 20);
  const auto kool = gen_op(1, 20, 3.0, PrizeConvention::kool);
  const auto d = euclidean_matrix(printed.coords);
  std::size_t far = 1;
  for (std::size_t i = 1; i < 20; ++i) {
    if (d(0, i) > d(0, far)) far = i;
  }
  CHECK(printed.prizes[far] == doctest::Approx(1.99));
  CHECK(kool.prizes[far] == doctest::Approx(1.0));
  for (std::size_t i = 1; i < 20; ++i) {
    CHECK(printed.prizes[i] >= 1.0);
    CHECK(kool.prizes[i] >= 0.01);
  }
}

TEST_CASE("aco tours are feasible and never beat the exact optimum") {
  const auto inst = gen_op(2, 7);
  const auto opt = exact_op(inst);
  std::mt19937_64 rng(0);
  const auto d = euclidean_matrix(inst.coords);
  const auto eta = op_seed_heuristic(inst.prizes, d, inst.max_len);
  const auto r = aco_solve(inst, eta, AcoConfig{}, rng);
  CHECK(r.all_feasible);
  CHECK(r.best.length <= inst.max_len + 1e-9);
  CHECK(r.best.prize <= opt.prize + 1e-12);
  CHECK(r.best.nodes.front() == 0);
  Matrix neg(7, 7);
  neg(1, 2) = -1;
  CHECK_THROWS_AS(validate_promise(neg, 7), HeuristicError);
  CHECK_THROWS_AS(validate_promise(Matrix(6, 6), 7), HeuristicError);
}
