#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hsevo/diversity.hpp"
#include "hsevo/evolution.hpp"
#include "json.hpp"

namespace hsevo {

// Files written into a run directory.
namespace run_files {
inline constexpr const char* archive = "archive.jsonl";
inline constexpr const char* diversity = "diversity.csv";
inline constexpr const char* generations = "run.jsonl";
inline constexpr const char* summary = "summary.json";
inline constexpr const char* best = "best_heuristic.py";
inline constexpr const char* config = "config.json";
inline constexpr const char* transcript = "transcript.jsonl";
inline constexpr const char* analysis = "analysis.csv";
}  // namespace run_files

std::string generation_record_line(const GenerationRecord& r);

nlohmann::ordered_json run_summary(Engine& engine, const std::string& run_id);

// Writes every run artifact. `extra` is merged into summary.json.
void write_run_outputs(const std::filesystem::path& dir, Engine& engine, const RunConfig& resolved,
                       const nlohmann::ordered_json& extra = nlohmann::ordered_json::object());

struct RecordedDiversity {
  int timestep = 0;
  double swdi = 0.0;
  double cdi = 0.0;
};

std::vector<RecordedDiversity> read_diversity_csv(const std::filesystem::path& path);

struct AnalysisResult {
  std::vector<DiversityReport> reports;
  // Timesteps in diversity.csv that were recomputed and compared.
  std::size_t compared = 0;
  double max_abs_diff = 0.0;
  bool matches = true;
  std::vector<std::string> mismatches;
};

// Recomputes SWDI/CDI for every timestep from archive.jsonl, writes
// analysis.csv and compares against diversity.csv when present.
AnalysisResult analyze_run(const std::filesystem::path& dir, Embedder& embedder, const DiversityOptions& opts,
                           double tolerance = 1e-9);

}  // namespace hsevo
