#include "hsevo/op.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "hsevo/errors.hpp"

namespace hsevo {

OpInstance gen_op(std::uint64_t seed, std::size_t n, double max_len, PrizeConvention convention) {
  if (n < 2) throw ConfigError("an OP instance needs at least two nodes");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  OpInstance inst;
  inst.seed = seed;
  inst.max_len = max_len;
  inst.coords.resize(n);
  for (auto& p : inst.coords) {
    p[0] = u(rng);
    p[1] = u(rng);
  }
  std::vector<double> d0(n);
  double dmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d0[i] = std::hypot(inst.coords[i][0] - inst.coords[0][0], inst.coords[i][1] - inst.coords[0][1]);
    dmax = std::max(dmax, d0[i]);
  }
  inst.prizes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ratio = dmax > 0.0 ? d0[i] / dmax : 0.0;
    inst.prizes[i] = convention == PrizeConvention::printed ? 1.0 + 99.0 * ratio / 100.0
                                                            : (1.0 + std::floor(99.0 * ratio)) / 100.0;
  }
  return inst;
}

double op_tour_length(const std::vector<std::size_t>& nodes, const Matrix& dist) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) s += dist(nodes[i], nodes[i + 1]);
  if (!nodes.empty()) s += dist(nodes.back(), nodes.front());
  return s;
}

double op_tour_prize(const std::vector<std::size_t>& nodes, const std::vector<double>& prizes) {
  double s = 0.0;
  for (auto v : nodes) s += prizes[v];
  return s;
}

void validate_promise(const Matrix& eta, std::size_t n) {
  if (eta.rows != n || eta.cols != n) {
    throw HeuristicError("shape", "heuristics returned " + std::to_string(eta.rows) + "x" +
                                            std::to_string(eta.cols) + ", expected " + std::to_string(n) + "x" +
                                            std::to_string(n));
  }
  for (double v : eta.data) {
    if (!std::isfinite(v)) throw HeuristicError("nonfinite", "heuristics returned a non-finite entry");
    if (v < 0.0) throw HeuristicError("shape", "heuristics returned a negative entry");
  }
}

AcoResult aco_solve(const OpInstance& inst, const Matrix& eta, const AcoConfig& cfg, std::mt19937_64& rng) {
  const auto n = inst.coords.size();
  validate_promise(eta, n);
  const auto dist = euclidean_matrix(inst.coords);
  Matrix tau(n, n, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  AcoResult out;
  out.best.nodes = {0};
  out.best.length = 0.0;
  out.best.prize = inst.prizes[0];

  std::vector<double> weights(n);
  std::vector<bool> visited(n);
  for (int it = 0; it < cfg.iterations; ++it) {
    OpTour iter_best;
    iter_best.prize = -1.0;
    for (int a = 0; a < cfg.n_ants; ++a) {
      std::fill(visited.begin(), visited.end(), false);
      visited[0] = true;
      OpTour t;
      t.nodes = {0};
      double len = 0.0;
      while (true) {
        const auto cur = t.nodes.back();
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          weights[j] = 0.0;
          if (visited[j] || len + dist(cur, j) + dist(j, 0) > inst.max_len) continue;
          weights[j] = std::pow(tau(cur, j), cfg.alpha) * std::pow(eta(cur, j), cfg.beta);
          total += weights[j];
        }
        if (!(total > 0.0) || !std::isfinite(total)) break;
        double r = unit(rng) * total;
        std::size_t next = n;
        for (std::size_t j = 0; j < n; ++j) {
          if (weights[j] <= 0.0) continue;
          next = j;
          r -= weights[j];
          if (r < 0.0) break;
        }
        visited[next] = true;
        len += dist(cur, next);
        t.nodes.push_back(next);
      }
      t.length = op_tour_length(t.nodes, dist);
      t.prize = op_tour_prize(t.nodes, inst.prizes);
      ++out.tours_sampled;
      if (t.length > inst.max_len + 1e-9) out.all_feasible = false;
      if (t.prize > iter_best.prize) iter_best = t;
    }
    for (double& v : tau.data) v *= cfg.evaporation;
    const auto& nodes = iter_best.nodes;
    for (std::size_t k = 0; k < nodes.size() && nodes.size() > 1; ++k) {
      const auto a = nodes[k], b = nodes[(k + 1) % nodes.size()];
      tau(a, b) += iter_best.prize;
      tau(b, a) += iter_best.prize;
    }
    if (iter_best.prize > out.best.prize) out.best = iter_best;
  }
  return out;
}

OpTour exact_op(const OpInstance& inst) {
  const auto n = inst.coords.size();
  if (n > 10) throw OracleTooLargeError("exact OP is limited to 10 nodes, got " + std::to_string(n));
  const auto dist = euclidean_matrix(inst.coords);
  OpTour best;
  best.nodes = {0};
  best.prize = inst.prizes[0];
  std::vector<std::size_t> path = {0};
  std::vector<bool> visited(n, false);
  visited[0] = true;
  std::function<void(double, double)> dfs = [&](double len, double prize) {
    const auto cur = path.back();
    for (std::size_t j = 1; j < n; ++j) {
      if (visited[j] || len + dist(cur, j) + dist(j, 0) > inst.max_len) continue;
      visited[j] = true;
      path.push_back(j);
      const double p = prize + inst.prizes[j];
      const double l = len + dist(cur, j);
      if (p > best.prize) {
        best.prize = p;
        best.nodes = path;
        best.length = l + dist(j, 0);
      }
      dfs(l, p);
      path.pop_back();
      visited[j] = false;
    }
  };
  dfs(0.0, inst.prizes[0]);
  return best;
}

EvaluationResult eval_op(const OpPromiseFn& heuristic, const std::vector<OpInstance>& instances, const AcoConfig& cfg) {
  return evaluate_instances(instances.size(), [&](std::size_t i) {
    const auto& inst = instances[i];
    const auto dist = euclidean_matrix(inst.coords);
    const Matrix eta = heuristic(inst.prizes, dist, inst.max_len);
    std::mt19937_64 rng(inst.seed ^ 0x9e3779b97f4a7c15ULL);
    return -aco_solve(inst, eta, cfg, rng).best.prize;
  });
}

Matrix op_seed_heuristic(const std::vector<double>&, const Matrix& edge_attr, double) {
  return Matrix(edge_attr.rows, edge_attr.cols, 1.0);
}

}  // namespace hsevo
