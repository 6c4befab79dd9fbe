#include "hsevo/bpo.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hsevo/errors.hpp"

namespace hsevo {

BpoInstance gen_bpo(std::uint64_t seed, std::size_t n_items, double capacity) {
  std::mt19937_64 rng(seed);
  std::weibull_distribution<double> weibull(3.0, 45.0);
  BpoInstance inst;
  inst.capacity = capacity;
  inst.seed = seed;
  inst.items.reserve(n_items);
  for (std::size_t i = 0; i < n_items; ++i) {
    inst.items.push_back(std::round(std::clamp(weibull(rng), 1.0, capacity)));
  }
  return inst;
}

std::int64_t mt_lower_bound(const std::vector<double>& items, double capacity) {
  if (items.empty()) return 0;
  constexpr double eps = 1e-9;
  auto ceil_div = [&](double x) { return static_cast<std::int64_t>(std::ceil(x / capacity - eps)); };
  double total = 0.0;
  for (double w : items) total += w;
  std::int64_t best = std::max<std::int64_t>(ceil_div(total), 0);
  const auto kmax = static_cast<std::int64_t>(std::floor(capacity / 2.0));
  for (std::int64_t k = 0; k <= kmax; ++k) {
    const double kk = static_cast<double>(k);
    std::int64_t n1 = 0, n2 = 0;
    double free2 = 0.0, sum3 = 0.0;
    for (double w : items) {
      if (w > capacity - kk) {
        ++n1;
      } else if (w > capacity / 2.0) {
        ++n2;
        free2 += capacity - w;
      } else if (w >= kk) {
        sum3 += w;
      }
    }
    const std::int64_t extra = std::max<std::int64_t>(0, ceil_div(sum3 - free2));
    best = std::max(best, n1 + n2 + extra);
  }
  return best;
}

Packing pack_online(const BpoInstance& inst, const BpoPriorityFn& priority) {
  Packing p;
  p.bin_of.reserve(inst.items.size());
  std::vector<double> remain;
  std::vector<std::size_t> fitting;
  std::vector<double> caps;
  for (double item : inst.items) {
    if (item > inst.capacity) throw std::invalid_argument("item larger than bin capacity");
    fitting.clear();
    caps.clear();
    for (std::size_t b = 0; b < remain.size(); ++b) {
      if (remain[b] >= item) {
        fitting.push_back(b);
        caps.push_back(remain[b]);
      }
    }
    std::size_t chosen;
    if (fitting.empty()) {
      chosen = remain.size();
      remain.push_back(inst.capacity);
    } else {
      const auto scores = priority(item, caps);
      if (scores.size() != caps.size()) {
        throw HeuristicError("shape", "priority returned " + std::to_string(scores.size()) +
                                                " scores for " + std::to_string(caps.size()) + " bins");
      }
      // numpy.argmax order: the first nan wins, infinities compare as usual.
      std::size_t arg = 0;
      for (std::size_t k = 0; k < scores.size(); ++k) {
        if (std::isnan(scores[k])) {
          arg = k;
          break;
        }
        if (scores[k] > scores[arg]) arg = k;
      }
      chosen = fitting[arg];
    }
    remain[chosen] -= item;
    p.bin_of.push_back(chosen);
  }
  p.loads.reserve(remain.size());
  for (double r : remain) p.loads.push_back(inst.capacity - r);
  return p;
}

double bpo_score(const BpoInstance& inst, const Packing& packing) {
  if (packing.loads.empty()) return 0.0;
  const auto lb = static_cast<double>(mt_lower_bound(inst.items, inst.capacity));
  return -(lb / static_cast<double>(packing.loads.size()));
}

EvaluationResult eval_bpo(const BpoPriorityFn& priority, const std::vector<BpoInstance>& instances) {
  return evaluate_instances(instances.size(), [&](std::size_t i) {
    return bpo_score(instances[i], pack_online(instances[i], priority));
  });
}

std::vector<double> bpo_seed_priority(double item, const std::vector<double>& caps) {
  std::vector<double> out;
  out.reserve(caps.size());
  for (double c : caps) out.push_back(-std::log(item / c));
  return out;
}

}  // namespace hsevo
