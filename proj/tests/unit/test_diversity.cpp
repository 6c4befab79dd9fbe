#include <cmath>

#include "doctest.h"
#include "hsevo/diversity.hpp"
#include "hsevo/errors.hpp"

using namespace hsevo;

namespace {

CodeEmbedding emb(std::vector<double> v, std::uint64_t id) { return {std::move(v), IndividualId{id}, "test"}; }

std::vector<std::vector<std::uint64_t>> ids(const ClusterPartition& p) {
  std::vector<std::vector<std::uint64_t>> out;
  for (const auto& c : p.clusters) {
    out.emplace_back();
    for (auto id : c) out.back().push_back(to_underlying(id));
  }
  return out;
}

}  // namespace

TEST_CASE("swdi of cluster sizes [2,1,1]") {
  ClusterPartition p;
  p.clusters = {{IndividualId{1}, IndividualId{2}}, {IndividualId{3}}, {IndividualId{4}}};
  p.total = 4;
  CHECK(swdi(p) == doctest::Approx(1.0397207708).epsilon(1e-9));
}

TEST_CASE("cdi on collinear points {0,1,2,4}") {
  std::vector<CodeEmbedding> e{emb({0, 0}, 1), emb({1, 0}, 2), emb({2, 0}, 3), emb({4, 0}, 4)};
  const auto mst = minimum_spanning_tree(e);
  REQUIRE(mst.edges.size() == 3);
  CHECK(mst.total_length == doctest::Approx(4.0));
  std::vector<double> lengths;
  for (const auto& x : mst.edges) lengths.push_back(x.length);
  CHECK(lengths == std::vector<double>{1, 1, 2});
  CHECK(cdi(mst) == doctest::Approx(1.0397207708).epsilon(1e-9));
}

TEST_CASE("entropy edge cases") {
  CHECK(entropy_of_weights(std::vector<double>{1}) == 0.0);
  CHECK(entropy_of_weights(std::vector<double>{0, 0}) == 0.0);
  CHECK(entropy_of_weights(std::vector<double>{0, 2, 2}) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("first-fit clustering at alpha 0.95") {
  const double n = std::sqrt(1.01);
  std::vector<CodeEmbedding> e{emb({1, 0}, 1), emb({1 / n, 0.1 / n}, 2), emb({0, 1}, 3)};
  CHECK(ids(cluster_archive(e, 0.95)) == std::vector<std::vector<std::uint64_t>>{{1, 2}, {3}});
  CHECK(ids(cluster_archive(e, 0.999)) == std::vector<std::vector<std::uint64_t>>{{1}, {2}, {3}});
}

TEST_CASE("clustering requires similarity to every member") {
  // b is close to a and c, but a and c are not close to each other.
  const double t = 0.3;
  std::vector<CodeEmbedding> e{emb({std::cos(-t), std::sin(-t)}, 1), emb({1, 0}, 2),
                               emb({std::cos(t), std::sin(t)}, 3)};
  const double alpha = std::cos(t) - 1e-9;
  CHECK(ids(cluster_archive(e, alpha)) == std::vector<std::vector<std::uint64_t>>{{1, 2}, {3}});
}

TEST_CASE("similarity equal to alpha joins the cluster") {
  std::vector<CodeEmbedding> e{emb({1, 0}, 1), emb({1, 0}, 2)};
  CHECK(cluster_archive(e, 1.0).clusters.size() == 1);
}

TEST_CASE("argument errors") {
  CHECK_THROWS_AS(cluster_archive({}, 0.5), EmptyArchiveError);
  std::vector<CodeEmbedding> one{emb({1, 0}, 1)};
  CHECK_THROWS_AS(cluster_archive(one, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(minimum_spanning_tree(one), InsufficientArchiveError);
}

TEST_CASE("report and series over an archive") {
  Archive a;
  const char* sources[] = {"def f(x):\n    return x\n", "def f(x):\n    return x * 2\n",
                           "def f(x):\n    return -x\n"};
  for (int i = 0; i < 3; ++i) {
    Individual ind;
    ind.id = IndividualId{static_cast<std::uint64_t>(i)};
    ind.generation = i;
    ind.source = sources[i];
    ind.objective = i == 1 ? Objective::invalid() : Objective::of(i);
    a.add(ind);
  }
  HashEmbedder e(64);
  DiversityOptions opts;
  const auto series = diversity_series(a, e, opts);
  REQUIRE(series.size() == 3);
  CHECK(series[0].cdi == 0.0);
  CHECK(series[0].swdi == 0.0);
  CHECK(series[2].archive_size == 3);
  opts.include_invalid = false;
  CHECK(diversity_series(a, e, opts)[2].archive_size == 2);
  const auto snap = a.snapshot_at(2);
  const auto r = compute_report(snap, 2, e, DiversityOptions{});
  CHECK(r.swdi == series[2].swdi);
  CHECK(diversity_csv_row(r).rfind("2,", 0) == 0);
}
