#pragma once

#include <cstdint>
#include <vector>

#include "hsevo/problem.hpp"

namespace hsevo {

struct BpoInstance {
  std::vector<double> items;
  double capacity = 100.0;
  std::uint64_t seed = 0;
};

// Weibull(shape 3, scale 45) sizes, clipped to [1, capacity] and rounded.
BpoInstance gen_bpo(std::uint64_t seed, std::size_t n_items = 5000, double capacity = 100.0);

// Martello-Toth L2 lower bound on the number of bins.
std::int64_t mt_lower_bound(const std::vector<double>& items, double capacity);

struct Packing {
  std::vector<double> loads;          // per bin
  std::vector<std::size_t> bin_of;    // per item
};

// Online packing: each item goes to the open bin with the highest priority
// among those that fit (ties to the lowest index, and a nan score counts as
// the highest, as numpy.argmax does); a new bin opens only when none fits.
Packing pack_online(const BpoInstance& inst, const BpoPriorityFn& priority);

// -(lb / bins used).
double bpo_score(const BpoInstance& inst, const Packing& packing);

EvaluationResult eval_bpo(const BpoPriorityFn& priority, const std::vector<BpoInstance>& instances);

// The seed heuristic -log(item / cap), natively.
std::vector<double> bpo_seed_priority(double item, const std::vector<double>& caps);

}  // namespace hsevo
