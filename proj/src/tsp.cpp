#include "hsevo/tsp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "hsevo/errors.hpp"

namespace hsevo {

TspInstance gen_tsp(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TspInstance inst;
  inst.seed = seed;
  inst.coords.resize(n);
  for (auto& p : inst.coords) {
    p[0] = u(rng);
    p[1] = u(rng);
  }
  return inst;
}

double tour_length(const Tour& tour, const Matrix& dist) {
  double s = 0.0;
  for (std::size_t i = 0; i < tour.size(); ++i) s += dist(tour[i], tour[(i + 1) % tour.size()]);
  return s;
}

bool is_permutation_tour(const Tour& tour, std::size_t n) {
  if (tour.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (auto v : tour) {
    if (v >= n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

TspSolution exact_tsp(const TspInstance& inst) {
  const auto n = inst.coords.size();
  if (n > 11) throw OracleTooLargeError("exact TSP is limited to 11 nodes, got " + std::to_string(n));
  const auto dist = euclidean_matrix(inst.coords);
  TspSolution best;
  best.tour.resize(n);
  std::iota(best.tour.begin(), best.tour.end(), 0);
  best.length = tour_length(best.tour, dist);
  if (n <= 3) return best;
  Tour t = best.tour;
  do {
    if (t[1] > t[n - 1]) continue;  // each cycle once per direction
    const double len = tour_length(t, dist);
    if (len < best.length) {
      best.length = len;
      best.tour = t;
    }
  } while (std::next_permutation(t.begin() + 1, t.end()));
  return best;
}

Tour nearest_neighbor_tour(const Matrix& dist, std::size_t start) {
  const auto n = dist.rows;
  Tour tour;
  if (n == 0) return tour;
  std::vector<bool> used(n, false);
  tour.push_back(start);
  used[start] = true;
  for (std::size_t step = 1; step < n; ++step) {
    const auto cur = tour.back();
    std::size_t next = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!used[j] && (next == n || dist(cur, j) < dist(cur, next))) next = j;
    }
    used[next] = true;
    tour.push_back(next);
  }
  return tour;
}

void two_opt(Tour& tour, const Matrix& dist) {
  const auto n = tour.size();
  if (n < 4) return;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i + 2 < n; ++i) {
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;
        const auto a = tour[i], b = tour[i + 1], c = tour[j], d = tour[(j + 1) % n];
        const double delta = dist(a, c) + dist(b, d) - dist(a, b) - dist(c, d);
        if (delta < -1e-12) {
          std::reverse(tour.begin() + static_cast<std::ptrdiff_t>(i + 1),
                       tour.begin() + static_cast<std::ptrdiff_t>(j + 1));
          improved = true;
        }
      }
    }
  }
}

namespace {

std::vector<std::int64_t> to_wire_tour(const Tour& t) { return {t.begin(), t.end()}; }

void check_guide(const Matrix& g, std::size_t n) {
  if (g.rows != n || g.cols != n) {
    throw HeuristicError("shape", "update_edge_distance returned " + std::to_string(g.rows) + "x" +
                                            std::to_string(g.cols) + ", expected " + std::to_string(n) + "x" +
                                            std::to_string(n));
  }
  for (double v : g.data) {
    if (!std::isfinite(v)) throw HeuristicError("nonfinite", "update_edge_distance returned a non-finite entry");
  }
}

}  // namespace

GlsResult gls_solve(const TspInstance& inst, const TspGuideFn& guide, const GlsConfig& cfg) {
  if (cfg.iterations < 1) throw ConfigError("GLS needs at least one iteration");
  const auto n = inst.coords.size();
  const auto dist = euclidean_matrix(inst.coords);
  GlsResult out;
  Tour tour = nearest_neighbor_tour(dist);
  out.best.tour = tour;
  out.best.length = tour_length(tour, dist);
  if (n < 4) return out;

  double mean_edge = 0.0;
  for (double v : dist.data) mean_edge += v;
  mean_edge /= static_cast<double>(n * (n - 1));
  const double penalty_unit = cfg.lambda * mean_edge;

  Matrix working = dist;
  Matrix penalty(n, n);
  Matrix used(n, n);
  for (int it = 0; it < cfg.iterations; ++it) {
    two_opt(tour, working);
    const double len = tour_length(tour, dist);
    if (len < out.best.length - 1e-12) {
      out.best.length = len;
      out.best.tour = tour;
    }
    if (it + 1 == cfg.iterations) break;

    for (std::size_t k = 0; k < n; ++k) {
      const auto a = tour[k], b = tour[(k + 1) % n];
      used(a, b) += 1.0;
      used(b, a) += 1.0;
    }
    const Matrix g = guide(dist, to_wire_tour(tour), used);
    ++out.heuristic_calls;
    check_guide(g, n);

    for (int m = 0; m < cfg.perturbation_moves; ++m) {
      std::size_t pick = 0;
      double best_util = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n; ++k) {
        const auto a = tour[k], b = tour[(k + 1) % n];
        const double util = 0.5 * (g(a, b) + g(b, a)) / (1.0 + penalty(a, b));
        if (util > best_util) {
          best_util = util;
          pick = k;
        }
      }
      const auto a = tour[pick], b = tour[(pick + 1) % n];
      penalty(a, b) += 1.0;
      penalty(b, a) += 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        working(i, j) = i == j ? 0.0 : 0.5 * (g(i, j) + g(j, i)) + penalty_unit * penalty(i, j);
      }
    }
  }
  return out;
}

EvaluationResult eval_tsp(const TspGuideFn& guide, const std::vector<TspInstance>& instances,
                          const std::vector<double>& optimal_lengths, const GlsConfig& cfg) {
  if (optimal_lengths.size() != instances.size()) throw ConfigError("one reference length per TSP instance required");
  return evaluate_instances(instances.size(), [&](std::size_t i) {
    const auto res = gls_solve(instances[i], guide, cfg);
    return (res.best.length - optimal_lengths[i]) / optimal_lengths[i];
  });
}

Matrix tsp_seed_update(const Matrix& edge_distance, const std::vector<std::int64_t>& tour, const Matrix& edge_n_used) {
  Matrix out = edge_distance;
  const auto n = tour.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto a = static_cast<std::size_t>(tour[i]), b = static_cast<std::size_t>(tour[i + 1]);
    out(a, b) *= 1.0 + edge_n_used(a, b);
  }
  const auto last = static_cast<std::size_t>(tour.back()), first = static_cast<std::size_t>(tour.front());
  out(last, first) *= 1.0 + edge_n_used(last, first);
  return out;
}

Matrix tsp_identity_update(const Matrix& edge_distance, const std::vector<std::int64_t>&, const Matrix&) {
  return edge_distance;
}

TspSolution reference_tsp(const TspInstance& inst, int restarts, int kicks, std::uint64_t seed) {
  const auto n = inst.coords.size();
  const auto dist = euclidean_matrix(inst.coords);
  std::mt19937_64 rng(seed);
  TspSolution best;
  best.tour = nearest_neighbor_tour(dist);
  two_opt(best.tour, dist);
  best.length = tour_length(best.tour, dist);
  if (n < 8) return best;
  for (int r = 0; r < restarts; ++r) {
    Tour cur;
    if (r == 0) {
      cur = best.tour;
    } else {
      cur.resize(n);
      std::iota(cur.begin(), cur.end(), 0);
      std::shuffle(cur.begin(), cur.end(), rng);
      two_opt(cur, dist);
    }
    double cur_len = tour_length(cur, dist);
    for (int k = 0; k < kicks; ++k) {
      std::uniform_int_distribution<std::size_t> pos(1, n - 1);
      std::size_t cuts[3] = {pos(rng), pos(rng), pos(rng)};
      std::sort(cuts, cuts + 3);
      if (cuts[0] == cuts[1] || cuts[1] == cuts[2]) continue;
      Tour cand;
      cand.reserve(n);
      auto at = [&](std::size_t k) { return cur.begin() + static_cast<std::ptrdiff_t>(k); };
      cand.insert(cand.end(), cur.begin(), at(cuts[0]));
      cand.insert(cand.end(), at(cuts[1]), at(cuts[2]));
      cand.insert(cand.end(), at(cuts[0]), at(cuts[1]));
      cand.insert(cand.end(), at(cuts[2]), cur.end());
      two_opt(cand, dist);
      const double len = tour_length(cand, dist);
      if (len < cur_len - 1e-12) {
        cur = std::move(cand);
        cur_len = len;
      }
    }
    if (cur_len < best.length) {
      best.length = cur_len;
      best.tour = cur;
    }
  }
  return best;
}

std::map<std::uint64_t, double> load_tsp_reference(const std::filesystem::path& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read TSP reference file " + path.string());
  std::map<std::uint64_t, double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::uint64_t seed;
    std::size_t size;
    double len;
    if (!(ss >> seed >> size >> len)) throw IoError("malformed TSP reference row: " + line);
    if (size == n) out[seed] = len;
  }
  return out;
}

}  // namespace hsevo
