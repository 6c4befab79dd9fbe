#include "hsevo/harmony_search.hpp"

#include <algorithm>
#include <cmath>

#include "hsevo/errors.hpp"

namespace hsevo {

void HarmonyConfig::validate() const {
  if (memory_size < 1) throw ConfigError("harmony memory_size must be >= 1");
  if (max_iterations < 0) throw ConfigError("harmony max_iterations must be >= 0");
  if (!(hmcr >= 0.0 && hmcr <= 1.0)) throw ConfigError("hmcr must lie in [0, 1]");
  if (!(par >= 0.0 && par <= 1.0)) throw ConfigError("par must lie in [0, 1]");
  if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
}

bool HarmonyMemory::offer(Harmony h) {
  if (rows_.size() >= capacity_) {
    if (!(h.objective < rows_.back().objective)) return false;
    rows_.pop_back();
  }
  auto pos = std::upper_bound(rows_.begin(), rows_.end(), h.objective,
                              [](double v, const Harmony& r) { return v < r.objective; });
  rows_.insert(pos, std::move(h));
  return true;
}

HarmonyResult hs_optimize(const std::vector<NamedRange>& ranges, const HarmonyObjective& objective,
                          const HarmonyConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  if (ranges.empty()) throw HarmonySearchError("harmony search needs at least one parameter range");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](const NamedRange& r) { return r.low + (r.high - r.low) * unit(rng); };

  HarmonyMemory memory(static_cast<std::size_t>(cfg.memory_size));
  HarmonyResult result;
  auto consider = [&](std::vector<double> values) {
    ++result.evaluations;
    const auto obj = objective(values);
    if (!obj || !std::isfinite(*obj)) {
      ++result.invalid;
      return;
    }
    memory.offer(Harmony{std::move(values), *obj});
  };
  auto record = [&] {
    result.best_history.push_back(memory.empty() ? std::nan("") : memory.best().objective);
  };

  for (int m = 0; m < cfg.memory_size; ++m) {
    std::vector<double> v;
    v.reserve(ranges.size());
    for (const auto& r : ranges) v.push_back(draw(r));
    consider(std::move(v));
  }
  record();

  for (int it = 0; it < cfg.max_iterations; ++it) {
    std::vector<double> v(ranges.size());
    for (std::size_t d = 0; d < ranges.size(); ++d) {
      const auto& r = ranges[d];
      if (!memory.empty() && unit(rng) < cfg.hmcr) {
        std::uniform_int_distribution<std::size_t> pick(0, memory.rows().size() - 1);
        v[d] = memory.rows()[pick(rng)].values[d];
        if (unit(rng) < cfg.par) {
          const double delta = (2.0 * unit(rng) - 1.0) * cfg.bandwidth * (r.high - r.low);
          v[d] = std::clamp(v[d] + delta, r.low, r.high);
        }
      } else {
        v[d] = draw(r);
      }
    }
    consider(std::move(v));
    record();
  }
  if (!memory.empty()) result.best = memory.best();
  return result;
}

}  // namespace hsevo
