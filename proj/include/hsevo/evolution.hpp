#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hsevo/archive.hpp"
#include "hsevo/diversity.hpp"
#include "hsevo/evaluation.hpp"
#include "hsevo/harmony_search.hpp"
#include "hsevo/llm_gateway.hpp"
#include "hsevo/run_config.hpp"

namespace hsevo {

struct FlashReflectionState {
  std::string current_analysis;
  std::string guide;
  std::vector<std::string> good_reflections;
  std::vector<std::string> bad_reflections;
};

struct GenerationRecord {
  int timestep = 0;
  std::optional<double> best_objective;
  double swdi = 0.0;
  double cdi = 0.0;
  std::int64_t tokens_used = 0;
  std::size_t n_invalid = 0;
  std::size_t archive_size = 0;
  std::size_t n_clusters = 0;
  double mst_total_length = 0.0;
  bool complete = true;
};

enum class StopReason { none, budget_exhausted, max_generations, mock_exhausted, transport_error, no_parents };
std::string to_string(StopReason r);

struct HarmonyOutcome {
  int timestep = 0;
  IndividualId base{};
  std::optional<IndividualId> tuned;
  std::string status;  // "tuned", "extraction_failed", "no_valid_candidate"
  std::string message;
};

using ParentPair = std::pair<IndividualId, IndividualId>;

// k pairs of distinct members with finite objectives, uniformly at random.
// Throws SelectionError when fewer than two members are valid.
std::vector<ParentPair> select_parent_pairs(const Population& pop, const Archive& archive, int k,
                                            std::mt19937_64& rng);

// Union of the pair members, deduplicated by normalized source and ranked
// by ascending objective (insertion order on ties).
std::vector<Individual> ranked_unique(const std::vector<ParentPair>& pairs, const Archive& archive);

// The `capacity` lowest-objective valid individuals among `candidates`
// (insertion order on ties), in that order.
Population survive(const std::vector<IndividualId>& candidates, const Archive& archive, std::size_t capacity);

// Lowest objective over the whole archive, if any is valid.
std::optional<double> archive_best(const Archive& archive);

class Engine {
 public:
  Engine(RunConfig cfg, std::shared_ptr<LlmGateway> gateway, std::shared_ptr<EvaluatorPool> pool,
         std::shared_ptr<Embedder> embedder);

  // Seed plus pop_init - 1 generator calls with personas in round-robin
  // order; records timestep 0.
  void initialize();
  // Runs one generation; returns false when the run has stopped.
  bool run_generation();
  // initialize() then generations until a stop condition.
  void run();

  std::string flash_reflection_phase1(const std::vector<ParentPair>& pairs);
  std::string flash_reflection_phase2();

  const Archive& archive() const { return archive_; }
  const Population& population() const { return population_; }
  const FlashReflectionState& reflection() const { return reflection_; }
  const std::vector<GenerationRecord>& records() const { return records_; }
  const std::vector<DiversityReport>& diversity() const { return diversity_; }
  const std::vector<HarmonyOutcome>& harmony_outcomes() const { return harmony_; }
  const std::set<std::uint64_t>& tuned_ids() const { return tuned_; }
  StopReason stop_reason() const { return stop_; }
  const std::string& stop_message() const { return stop_message_; }
  int generations_completed() const { return generations_completed_; }
  bool is_tuned(IndividualId id) const;
  const RunConfig& config() const { return cfg_; }
  LlmGateway& gateway() { return *gateway_; }
  // Individuals whose evaluation failed, with the failure.
  const std::vector<std::pair<IndividualId, Failure>>& failures() const { return failures_; }

 private:
  struct Pending {
    std::string source;
    bool extracted = false;
    Failure extraction_failure;
    Origin origin = Origin::init;
    std::string role_label;
    std::uint64_t tokens = 0;
  };

  std::optional<ChatReply> ask(const ChatRequest& req);
  void stop(StopReason r, std::string message);
  Pending pending_from_reply(const ChatReply& reply, Origin origin, std::string role);
  std::vector<IndividualId> evaluate_and_archive(std::vector<Pending> batch, int generation);
  void harmony_step(std::vector<IndividualId>& candidates, int t);
  void record(int t, std::size_t n_invalid, bool complete);

  RunConfig cfg_;
  std::shared_ptr<LlmGateway> gateway_;
  std::shared_ptr<EvaluatorPool> pool_;
  std::shared_ptr<Embedder> embedder_;
  std::mt19937_64 rng_;
  const ProblemPromptInfo& info_;
  Archive archive_;
  Population population_;
  FlashReflectionState reflection_;
  std::vector<GenerationRecord> records_;
  std::vector<DiversityReport> diversity_;
  std::vector<HarmonyOutcome> harmony_;
  std::vector<std::pair<IndividualId, Failure>> failures_;
  std::set<std::uint64_t> tuned_;
  StopReason stop_ = StopReason::none;
  std::string stop_message_;
  int generation_ = 0;
  int generations_completed_ = 0;
  bool initialized_ = false;
};

}  // namespace hsevo
