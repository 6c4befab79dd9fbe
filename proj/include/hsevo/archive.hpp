#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hsevo {

enum class IndividualId : std::uint64_t {};

inline std::uint64_t to_underlying(IndividualId id) { return static_cast<std::uint64_t>(id); }

// Score of a heuristic, lower is better. Either a finite real or the
// distinguished invalid marker; there is no sentinel number.
class Objective {
 public:
  static Objective invalid() { return Objective(); }
  static Objective of(double value);

  bool valid() const { return value_.has_value(); }
  double value() const;

  friend bool operator==(const Objective&, const Objective&) = default;

 private:
  Objective() = default;
  std::optional<double> value_;
};

enum class Origin { seed, init, crossover, mutation, harmony_tuned };

std::string_view to_string(Origin origin);
Origin origin_from_string(std::string_view text);

struct Individual {
  IndividualId id{};
  std::string source;
  Objective objective = Objective::invalid();
  int generation = 0;
  Origin origin = Origin::init;
  std::string role_label;
  bool tuned = false;
  std::uint64_t token_cost = 0;

  friend bool operator==(const Individual&, const Individual&) = default;
};

// Append-only log of every individual produced during a run. Appends are
// serialized; readers always observe a consistent prefix.
class Archive {
 public:
  explicit Archive(std::string run_id = {});
  Archive(const Archive& other);
  Archive& operator=(const Archive& other);

  // Throws DuplicateIdError if the id is taken, ArchiveOrderError if the
  // generation would decrease along the log.
  IndividualId add(Individual ind);

  // All entries with generation <= t, in insertion order.
  std::vector<Individual> snapshot_at(int t) const;
  std::vector<Individual> entries() const;

  std::optional<Individual> find(IndividualId id) const;
  Individual get(IndividualId id) const;
  // Position of the id in insertion order.
  std::size_t index_of(IndividualId id) const;
  bool contains(IndividualId id) const;

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  const std::string& run_id() const { return run_id_; }
  // Smallest id strictly greater than every id in the archive.
  IndividualId next_id() const;

 private:
  std::string run_id_;
  mutable std::shared_mutex mutex_;
  std::vector<Individual> entries_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::uint64_t next_id_ = 0;
};

struct Population {
  std::vector<IndividualId> members;
  std::size_t capacity = 0;
};

// Member with minimal finite objective; ties go to the earliest inserted.
// Throws NoEliteError when no member has a finite objective.
Individual best(const Population& population, const Archive& archive);

// Line-delimited record format, one JSON object per individual with keys
// id, generation, origin, role_label, objective, tuned, token_cost, source.
std::string to_record_line(const Individual& ind);
Individual parse_record_line(std::string_view line, std::size_t line_number);

void write_record(std::ostream& out, const Individual& ind);
void persist_run(const Archive& archive, const std::filesystem::path& path);
// The run id is not part of the record format; it defaults to the name of
// the directory holding the log.
Archive load_run(const std::filesystem::path& path, std::optional<std::string> run_id = std::nullopt);

}  // namespace hsevo
