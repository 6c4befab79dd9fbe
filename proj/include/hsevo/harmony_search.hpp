#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hsevo/archive.hpp"
#include "hsevo/code_extraction.hpp"

namespace hsevo {

struct HarmonyConfig {
  int memory_size = 5;
  double hmcr = 0.7;
  double par = 0.5;
  // Relative to each range width.
  double bandwidth = 0.2;
  int max_iterations = 5;

  void validate() const;
};

struct ParameterizedHeuristic {
  std::string template_source;
  std::vector<NamedRange> ranges;
  IndividualId base_id{};
};

struct Harmony {
  std::vector<double> values;
  double objective = 0.0;
};

// Rows kept sorted by objective ascending (stable on ties).
class HarmonyMemory {
 public:
  explicit HarmonyMemory(std::size_t capacity) : capacity_(capacity) {}
  // Adds while below capacity, otherwise replaces the worst row when strictly
  // better. Returns true when the row entered memory.
  bool offer(Harmony h);
  const std::vector<Harmony>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  const Harmony& best() const { return rows_.front(); }

 private:
  std::size_t capacity_;
  std::vector<Harmony> rows_;
};

// Returns nullopt for an INVALID candidate.
using HarmonyObjective = std::function<std::optional<double>(const std::vector<double>&)>;

struct HarmonyResult {
  std::optional<Harmony> best;  // empty when no candidate was valid
  std::vector<double> best_history;  // best objective after init and each iteration
  std::size_t evaluations = 0;
  std::size_t invalid = 0;
};

HarmonyResult hs_optimize(const std::vector<NamedRange>& ranges, const HarmonyObjective& objective,
                          const HarmonyConfig& cfg, std::mt19937_64& rng);

}  // namespace hsevo
