#include "hsevo/problem.hpp"

#include <chrono>
#include <cmath>

#include "hsevo/errors.hpp"

namespace hsevo {

Matrix euclidean_matrix(const std::vector<Point>& coords) {
  const auto n = coords.size();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::hypot(coords[i][0] - coords[j][0], coords[i][1] - coords[j][1]);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

EvaluationResult evaluate_instances(std::size_t count, const std::function<double(std::size_t)>& per_instance) {
  const auto start = std::chrono::steady_clock::now();
  EvaluationResult r;
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  try {
    for (std::size_t i = 0; i < count; ++i) r.per_instance.push_back(per_instance(i));
  } catch (const HeuristicError& e) {
    r.failure = Failure{e.kind(), e.what()};
    r.wall_seconds = elapsed();
    return r;
  }
  r.wall_seconds = elapsed();
  if (r.per_instance.empty()) {
    r.failure = Failure{"no_instances", "nothing to evaluate"};
    return r;
  }
  double sum = 0.0;
  for (double v : r.per_instance) sum += v;
  const double mean = sum / static_cast<double>(r.per_instance.size());
  if (!std::isfinite(mean)) {
    r.failure = Failure{"nonfinite", "objective is not finite"};
    return r;
  }
  r.objective = Objective::of(mean);
  return r;
}

}  // namespace hsevo
