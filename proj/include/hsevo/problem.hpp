#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hsevo/archive.hpp"
#include "hsevo/matrix.hpp"

namespace hsevo {

using Point = std::array<double, 2>;

struct Failure {
  std::string kind;
  std::string message;
};

struct EvaluationResult {
  Objective objective = Objective::invalid();
  std::vector<double> per_instance;
  double wall_seconds = 0.0;
  std::optional<Failure> failure;
};

// Candidate-heuristic call shapes, one per benchmark. Implementations throw
// HeuristicError on failure.
using BpoPriorityFn = std::function<std::vector<double>(double item, const std::vector<double>& bins_remain_cap)>;
using TspGuideFn = std::function<Matrix(const Matrix& edge_distance, const std::vector<std::int64_t>& local_opt_tour,
                                        const Matrix& edge_n_used)>;
using OpPromiseFn = std::function<Matrix(const std::vector<double>& node_attr, const Matrix& edge_attr,
                                         double node_constraint)>;

Matrix euclidean_matrix(const std::vector<Point>& coords);

// Runs `per_instance` over `count` instances. Any HeuristicError makes the
// whole result INVALID; otherwise the objective is the mean score.
EvaluationResult evaluate_instances(std::size_t count, const std::function<double(std::size_t)>& per_instance);

}  // namespace hsevo
