#include "hsevo/archive.hpp"

#include <cmath>
#include <fstream>
#include <mutex>

#include "hsevo/errors.hpp"
#include "json.hpp"

namespace hsevo {

using ordered_json = nlohmann::ordered_json;

Objective Objective::of(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("objective must be finite; use Objective::invalid()");
  }
  Objective obj;
  obj.value_ = value;
  return obj;
}

double Objective::value() const {
  if (!value_) throw std::logic_error("value() on an invalid objective");
  return *value_;
}

std::string_view to_string(Origin origin) {
  switch (origin) {
    case Origin::seed: return "seed";
    case Origin::init: return "init";
    case Origin::crossover: return "crossover";
    case Origin::mutation: return "mutation";
    case Origin::harmony_tuned: return "harmony_tuned";
  }
  return "init";
}

Origin origin_from_string(std::string_view text) {
  if (text == "seed") return Origin::seed;
  if (text == "init") return Origin::init;
  if (text == "crossover") return Origin::crossover;
  if (text == "mutation") return Origin::mutation;
  if (text == "harmony_tuned") return Origin::harmony_tuned;
  throw std::invalid_argument("unknown origin '" + std::string(text) + "'");
}

Archive::Archive(std::string run_id) : run_id_(std::move(run_id)) {}

Archive::Archive(const Archive& other) {
  std::shared_lock lock(other.mutex_);
  run_id_ = other.run_id_;
  entries_ = other.entries_;
  index_ = other.index_;
  next_id_ = other.next_id_;
}

Archive& Archive::operator=(const Archive& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mutex_, other.mutex_);
  run_id_ = other.run_id_;
  entries_ = other.entries_;
  index_ = other.index_;
  next_id_ = other.next_id_;
  return *this;
}

IndividualId Archive::add(Individual ind) {
  std::unique_lock lock(mutex_);
  const auto key = to_underlying(ind.id);
  if (index_.contains(key)) {
    throw DuplicateIdError("individual id " + std::to_string(key) + " already archived");
  }
  if (ind.generation < 0) {
    throw ArchiveOrderError("negative generation");
  }
  if (!entries_.empty() && ind.generation < entries_.back().generation) {
    throw ArchiveOrderError("generation " + std::to_string(ind.generation) +
                            " after generation " + std::to_string(entries_.back().generation));
  }
  index_.emplace(key, entries_.size());
  next_id_ = std::max(next_id_, key + 1);
  entries_.push_back(std::move(ind));
  return entries_.back().id;
}

std::vector<Individual> Archive::snapshot_at(int t) const {
  std::shared_lock lock(mutex_);
  std::vector<Individual> out;
  for (const auto& e : entries_) {
    if (e.generation > t) break;
    out.push_back(e);
  }
  return out;
}

std::vector<Individual> Archive::entries() const {
  std::shared_lock lock(mutex_);
  return entries_;
}

std::optional<Individual> Archive::find(IndividualId id) const {
  std::shared_lock lock(mutex_);
  auto it = index_.find(to_underlying(id));
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second];
}

Individual Archive::get(IndividualId id) const {
  auto found = find(id);
  if (!found) throw std::out_of_range("unknown individual id " + std::to_string(to_underlying(id)));
  return *found;
}

std::size_t Archive::index_of(IndividualId id) const {
  std::shared_lock lock(mutex_);
  auto it = index_.find(to_underlying(id));
  if (it == index_.end()) throw std::out_of_range("unknown individual id " + std::to_string(to_underlying(id)));
  return it->second;
}

bool Archive::contains(IndividualId id) const {
  std::shared_lock lock(mutex_);
  return index_.contains(to_underlying(id));
}

std::size_t Archive::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

IndividualId Archive::next_id() const {
  std::shared_lock lock(mutex_);
  return IndividualId{next_id_};
}

Individual best(const Population& population, const Archive& archive) {
  std::optional<Individual> winner;
  std::size_t winner_index = 0;
  for (auto id : population.members) {
    auto ind = archive.get(id);
    if (!ind.objective.valid()) continue;
    const auto idx = archive.index_of(id);
    if (!winner || ind.objective.value() < winner->objective.value() ||
        (ind.objective.value() == winner->objective.value() && idx < winner_index)) {
      winner = std::move(ind);
      winner_index = idx;
    }
  }
  if (!winner) throw NoEliteError("population has no member with a finite objective");
  return *winner;
}

std::string to_record_line(const Individual& ind) {
  ordered_json j;
  j["id"] = to_underlying(ind.id);
  j["generation"] = ind.generation;
  j["origin"] = std::string(to_string(ind.origin));
  j["role_label"] = ind.role_label;
  if (ind.objective.valid()) {
    j["objective"] = ind.objective.value();
  } else {
    j["objective"] = "invalid";
  }
  j["tuned"] = ind.tuned;
  j["token_cost"] = ind.token_cost;
  j["source"] = ind.source;
  return j.dump();
}

Individual parse_record_line(std::string_view line, std::size_t line_number) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedRecordError(line_number, std::string("unparsable record: ") + e.what());
  }
  try {
    if (!j.is_object()) throw MalformedRecordError(line_number, "record is not an object");
    static constexpr const char* keys[] = {"id", "generation", "origin", "role_label",
                                           "objective", "tuned", "token_cost", "source"};
    for (const char* k : keys) {
      if (!j.contains(k)) throw MalformedRecordError(line_number, std::string("missing field '") + k + "'");
    }
    Individual ind;
    ind.id = IndividualId{j.at("id").get<std::uint64_t>()};
    ind.generation = j.at("generation").get<int>();
    ind.origin = origin_from_string(j.at("origin").get<std::string>());
    ind.role_label = j.at("role_label").get<std::string>();
    const auto& obj = j.at("objective");
    if (obj.is_string()) {
      if (obj.get<std::string>() != "invalid") {
        throw MalformedRecordError(line_number, "objective string must be \"invalid\"");
      }
      ind.objective = Objective::invalid();
    } else if (obj.is_number()) {
      ind.objective = Objective::of(obj.get<double>());
    } else {
      throw MalformedRecordError(line_number, "objective must be a number or \"invalid\"");
    }
    ind.tuned = j.at("tuned").get<bool>();
    ind.token_cost = j.at("token_cost").get<std::uint64_t>();
    ind.source = j.at("source").get<std::string>();
    return ind;
  } catch (const MalformedRecordError&) {
    throw;
  } catch (const std::exception& e) {
    throw MalformedRecordError(line_number, std::string("bad field: ") + e.what());
  }
}

void write_record(std::ostream& out, const Individual& ind) {
  out << to_record_line(ind) << '\n';
}

void persist_run(const Archive& archive, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto& ind : archive.entries()) write_record(out, ind);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

Archive load_run(const std::filesystem::path& path, std::optional<std::string> run_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Archive archive(run_id.value_or(path.parent_path().filename().string()));
  std::size_t pos = 0;
  std::size_t line_number = 0;
  while (pos < content.size()) {
    ++line_number;
    const auto nl = content.find('\n', pos);
    if (nl == std::string::npos) {
      // Every record is newline-terminated; a dangling tail means truncation.
      throw MalformedRecordError(line_number, "truncated record (missing newline)");
    }
    std::string_view line(content.data() + pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    auto ind = parse_record_line(line, line_number);
    try {
      archive.add(std::move(ind));
    } catch (const Error& e) {
      throw MalformedRecordError(line_number, e.what());
    }
  }
  return archive;
}

}  // namespace hsevo
