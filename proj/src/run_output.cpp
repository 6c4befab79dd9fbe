#include "hsevo/run_output.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "hsevo/errors.hpp"
#include "hsevo/text_util.hpp"

namespace hsevo {

namespace {

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

std::string generation_record_line(const GenerationRecord& r) {
  nlohmann::ordered_json j;
  j["timestep"] = r.timestep;
  j["best_objective"] = optional_number(r.best_objective);
  j["swdi"] = r.swdi;
  j["cdi"] = r.cdi;
  j["tokens_used"] = r.tokens_used;
  j["n_invalid"] = r.n_invalid;
  j["archive_size"] = r.archive_size;
  j["n_clusters"] = r.n_clusters;
  j["mst_total_length"] = r.mst_total_length;
  j["complete"] = r.complete;
  return j.dump() + "\n";
}

nlohmann::ordered_json run_summary(Engine& engine, const std::string& run_id) {
  const auto& archive = engine.archive();
  const auto entries = archive.entries();
  std::size_t n_invalid = 0;
  for (const auto& ind : entries) n_invalid += ind.objective.valid() ? 0 : 1;

  nlohmann::ordered_json j;
  j["run_id"] = run_id;
  j["problem"] = to_string(engine.config().problem.kind);
  j["stop_reason"] = to_string(engine.stop_reason());
  j["stop_message"] = engine.stop_message();
  j["generations_completed"] = engine.generations_completed();
  j["budget_tokens"] = engine.gateway().budget().max();
  j["tokens_used"] = engine.gateway().budget().used();
  j["sum_of_call_tokens"] = engine.gateway().sum_of_call_tokens();
  j["llm_calls"] = engine.gateway().transcript().size();
  j["archive_size"] = entries.size();
  j["n_invalid"] = n_invalid;

  Population everyone;
  for (const auto& ind : entries) everyone.members.push_back(ind.id);
  try {
    const auto b = best(everyone, archive);
    j["best"] = {{"id", to_underlying(b.id)},
                 {"objective", b.objective.value()},
                 {"generation", b.generation},
                 {"origin", std::string(to_string(b.origin))},
                 {"tuned", b.tuned}};
  } catch (const NoEliteError&) {
    j["best"] = nullptr;
  }

  auto pop = nlohmann::ordered_json::array();
  for (auto id : engine.population().members) pop.push_back(to_underlying(id));
  j["population"] = pop;

  auto hs = nlohmann::ordered_json::array();
  for (const auto& h : engine.harmony_outcomes()) {
    nlohmann::ordered_json o;
    o["timestep"] = h.timestep;
    o["base"] = h.status == "no_valid_candidate" ? nlohmann::ordered_json(nullptr)
                                                   : nlohmann::ordered_json(to_underlying(h.base));
    o["tuned"] = h.tuned ? nlohmann::ordered_json(to_underlying(*h.tuned)) : nlohmann::ordered_json(nullptr);
    o["status"] = h.status;
    if (!h.message.empty()) o["message"] = h.message;
    hs.push_back(o);
  }
  j["harmony_search"] = hs;

  std::map<std::string, std::size_t> failure_kinds;
  for (const auto& [id, f] : engine.failures()) ++failure_kinds[f.kind];
  j["failure_kinds"] = failure_kinds;
  return j;
}

void write_run_outputs(const std::filesystem::path& dir, Engine& engine, const RunConfig& resolved,
                       const nlohmann::ordered_json& extra) {
  std::filesystem::create_directories(dir);
  const auto run_id = std::filesystem::absolute(dir).lexically_normal().filename().string();

  persist_run(engine.archive(), dir / run_files::archive);
  write_diversity_csv(dir / run_files::diversity, engine.diversity());

  std::string lines;
  for (const auto& r : engine.records()) lines += generation_record_line(r);
  write_file_atomic(dir / run_files::generations, lines);

  auto summary = run_summary(engine, run_id);
  for (const auto& [k, v] : extra.items()) summary[k] = v;
  write_file_atomic(dir / run_files::summary, summary.dump(2) + "\n");

  write_file_atomic(dir / run_files::config, resolved.to_json().dump(2) + "\n");
  write_file_atomic(dir / run_files::transcript, transcript_jsonl(engine.gateway().transcript()));

  Population everyone;
  for (const auto& ind : engine.archive().entries()) everyone.members.push_back(ind.id);
  std::error_code ec;
  try {
    const auto b = best(everyone, engine.archive());
    write_file_atomic(dir / run_files::best, b.source.ends_with('\n') ? b.source : b.source + "\n");
  } catch (const NoEliteError&) {
    std::filesystem::remove(dir / run_files::best, ec);
  }
}

std::vector<RecordedDiversity> read_diversity_csv(const std::filesystem::path& path) {
  const auto text = read_file(path);
  const auto lines = split_lines(text);
  std::vector<RecordedDiversity> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    std::stringstream ss{std::string(lines[i])};
    std::string t, s, c;
    if (!std::getline(ss, t, ',') || !std::getline(ss, s, ',') || !std::getline(ss, c, ',')) {
      throw MalformedRecordError(i + 1, "expected timestep,swdi,cdi,...");
    }
    try {
      out.push_back({std::stoi(t), std::stod(s), std::stod(c)});
    } catch (const std::exception&) {
      throw MalformedRecordError(i + 1, "non-numeric field in " + path.string());
    }
  }
  return out;
}

AnalysisResult analyze_run(const std::filesystem::path& dir, Embedder& embedder, const DiversityOptions& opts,
                           double tolerance) {
  const auto archive = load_run(dir / run_files::archive);
  AnalysisResult res;
  res.reports = diversity_series(archive, embedder, opts);
  write_diversity_csv(dir / run_files::analysis, res.reports);

  const auto recorded_path = dir / run_files::diversity;
  if (!std::filesystem::exists(recorded_path)) return res;
  std::map<int, const DiversityReport*> by_t;
  for (const auto& r : res.reports) by_t[r.timestep] = &r;
  for (const auto& rec : read_diversity_csv(recorded_path)) {
    auto it = by_t.find(rec.timestep);
    if (it == by_t.end()) {
      res.matches = false;
      res.mismatches.push_back("timestep " + std::to_string(rec.timestep) + " missing from the archive");
      continue;
    }
    ++res.compared;
    const double ds = std::abs(it->second->swdi - rec.swdi);
    const double dc = std::abs(it->second->cdi - rec.cdi);
    res.max_abs_diff = std::max({res.max_abs_diff, ds, dc});
    if (ds > tolerance || dc > tolerance) {
      res.matches = false;
      res.mismatches.push_back("timestep " + std::to_string(rec.timestep) + ": swdi " + format_double(rec.swdi) +
                               " vs " + format_double(it->second->swdi) + ", cdi " + format_double(rec.cdi) +
                               " vs " + format_double(it->second->cdi));
    }
  }
  return res;
}

}  // namespace hsevo
