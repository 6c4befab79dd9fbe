#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "hsevo/problem.hpp"

namespace hsevo {

struct TspInstance {
  std::vector<Point> coords;
  std::uint64_t seed = 0;
};

TspInstance gen_tsp(std::uint64_t seed, std::size_t n = 100);

using Tour = std::vector<std::size_t>;

double tour_length(const Tour& tour, const Matrix& dist);
bool is_permutation_tour(const Tour& tour, std::size_t n);

struct TspSolution {
  Tour tour;
  double length = 0.0;
};

// Brute force over all tours starting at node 0. n <= 11, else
// OracleTooLargeError.
TspSolution exact_tsp(const TspInstance& inst);

Tour nearest_neighbor_tour(const Matrix& dist, std::size_t start = 0);
// First-improvement 2-opt until no move improves by more than 1e-12.
void two_opt(Tour& tour, const Matrix& dist);

struct GlsConfig {
  int iterations = 1000;
  int perturbation_moves = 1;
  // Penalty weight, relative to the mean edge length.
  double lambda = 0.1;
};

struct GlsResult {
  TspSolution best;
  int heuristic_calls = 0;
};

// Guided local search: 2-opt on a working matrix, which after every
// iteration but the last is rebuilt from the heuristic's updated distances
// plus edge penalties. Returns the best tour under true distances.
GlsResult gls_solve(const TspInstance& inst, const TspGuideFn& guide, const GlsConfig& cfg);

EvaluationResult eval_tsp(const TspGuideFn& guide, const std::vector<TspInstance>& instances,
                          const std::vector<double>& optimal_lengths, const GlsConfig& cfg);

// Seed heuristic and an identity guide, natively.
Matrix tsp_seed_update(const Matrix& edge_distance, const std::vector<std::int64_t>& tour, const Matrix& edge_n_used);
Matrix tsp_identity_update(const Matrix& edge_distance, const std::vector<std::int64_t>& tour,
                           const Matrix& edge_n_used);

// Multi-start 2-opt with double-bridge kicks. Not an exact solver.
TspSolution reference_tsp(const TspInstance& inst, int restarts, int kicks, std::uint64_t seed);

// Reads `<seed> <n> <length>` rows (lines starting with '#' are comments).
std::map<std::uint64_t, double> load_tsp_reference(const std::filesystem::path& path, std::size_t n);

}  // namespace hsevo
