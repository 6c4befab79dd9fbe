#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hsevo/problem.hpp"

namespace hsevo {

// printed: p = 1 + 0.99 d/dmax, in [1, 1.99].
// kool:    p = (1 + floor(99 d/dmax)) / 100, in [0.01, 1].
enum class PrizeConvention { printed, kool };

struct OpInstance {
  std::vector<Point> coords;  // node 0 is the depot
  std::vector<double> prizes;
  double max_len = 3.0;
  std::uint64_t seed = 0;
};

OpInstance gen_op(std::uint64_t seed, std::size_t n = 50, double max_len = 3.0,
                  PrizeConvention convention = PrizeConvention::printed);

struct OpTour {
  std::vector<std::size_t> nodes;  // starts at 0, return to 0 implied
  double length = 0.0;             // including the return leg
  double prize = 0.0;              // depot counted once
};

double op_tour_length(const std::vector<std::size_t>& nodes, const Matrix& dist);
double op_tour_prize(const std::vector<std::size_t>& nodes, const std::vector<double>& prizes);

struct AcoConfig {
  int n_ants = 20;
  int iterations = 50;
  double evaporation = 0.9;  // tau <- evaporation * tau
  double alpha = 1.0;
  double beta = 1.0;
};

struct AcoResult {
  OpTour best;
  std::size_t tours_sampled = 0;
  bool all_feasible = true;
};

// Throws HeuristicError when eta is not an n x n matrix of finite,
// non-negative values.
void validate_promise(const Matrix& eta, std::size_t n);

AcoResult aco_solve(const OpInstance& inst, const Matrix& eta, const AcoConfig& cfg, std::mt19937_64& rng);

// Best prize over all feasible tours, by depth-first enumeration. n <= 10.
OpTour exact_op(const OpInstance& inst);

// Per-instance score is -(best prize); the ACO rng is seeded from the
// instance seed so scores are reproducible.
EvaluationResult eval_op(const OpPromiseFn& heuristic, const std::vector<OpInstance>& instances, const AcoConfig& cfg);

Matrix op_seed_heuristic(const std::vector<double>& node_attr, const Matrix& edge_attr, double constraint);

}  // namespace hsevo
