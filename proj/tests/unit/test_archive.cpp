#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "hsevo/archive.hpp"
#include "hsevo/errors.hpp"

using namespace hsevo;

namespace {

Individual make(std::uint64_t id, int gen, std::optional<double> obj, std::string src = "x = 1\n") {
  Individual ind;
  ind.id = IndividualId{id};
  ind.generation = gen;
  ind.objective = obj ? Objective::of(*obj) : Objective::invalid();
  ind.source = std::move(src);
  return ind;
}

std::filesystem::path temp_dir(const char* name) {
  auto d = std::filesystem::temp_directory_path() / ("hsevo_unit_" + std::string(name));
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("objective rejects non-finite values") {
  CHECK_THROWS(Objective::of(std::nan("")));
  CHECK_THROWS(Objective::of(INFINITY));
  CHECK_FALSE(Objective::invalid().valid());
  CHECK_THROWS(Objective::invalid().value());
}

TEST_CASE("archive enforces unique ids and non-decreasing generations") {
  Archive a;
  a.add(make(0, 0, 1.0));
  a.add(make(1, 1, 2.0));
  CHECK_THROWS_AS(a.add(make(1, 1, 3.0)), DuplicateIdError);
  CHECK_THROWS_AS(a.add(make(5, 0, 3.0)), ArchiveOrderError);
  CHECK(a.size() == 2);
  CHECK(to_underlying(a.next_id()) == 2);
  CHECK(a.snapshot_at(0).size() == 1);
  CHECK(a.snapshot_at(1).size() == 2);
  CHECK(a.index_of(IndividualId{1}) == 1);
}

TEST_CASE("best picks the lowest finite objective, earliest on ties") {
  Archive a;
  a.add(make(0, 0, 3.0));
  a.add(make(1, 0, std::nullopt));
  a.add(make(2, 0, 1.5));
  a.add(make(3, 0, 1.5));
  Population p{{IndividualId{0}, IndividualId{1}, IndividualId{2}, IndividualId{3}}, 4};
  CHECK(to_underlying(best(p, a).id) == 2);
  Population only_invalid{{IndividualId{1}}, 1};
  CHECK_THROWS_AS(best(only_invalid, a), NoEliteError);
}

TEST_CASE("record lines round-trip, including INVALID and awkward text") {
  auto ind = make(7, 3, -0.123456789012345678, "def f():\n    return \"q\\n\"\t# ünï\n");
  ind.origin = Origin::harmony_tuned;
  ind.role_label = "persona";
  ind.tuned = true;
  ind.token_cost = 42;
  CHECK(parse_record_line(to_record_line(ind), 1) == ind);
  auto bad = make(8, 3, std::nullopt);
  CHECK(parse_record_line(to_record_line(bad), 1) == bad);
}

TEST_CASE("persist and load preserve the archive; corruption reports the line") {
  const auto dir = temp_dir("archive");
  Archive a;
  for (std::uint64_t i = 0; i < 5; ++i) a.add(make(i, static_cast<int>(i / 2), i % 2 ? std::optional<double>(i) : std::nullopt));
  persist_run(a, dir / "archive.jsonl");
  const auto b = load_run(dir / "archive.jsonl");
  CHECK(b.entries() == a.entries());
  CHECK(b.run_id() == "hsevo_unit_archive");

  std::ofstream(dir / "archive.jsonl", std::ios::app) << "{\"id\": 9}\n";
  try {
    load_run(dir / "archive.jsonl");
    FAIL("expected MalformedRecordError");
  } catch (const MalformedRecordError& e) {
    CHECK(e.line() == 6);
  }
  std::ofstream(dir / "trunc.jsonl") << to_record_line(make(0, 0, 1.0));
  CHECK_THROWS_AS(load_run(dir / "trunc.jsonl"), MalformedRecordError);
}
