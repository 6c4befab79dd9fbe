// One PASS/FAIL line per primary acceptance criterion. Exit status is the
// number of failures (capped at 125).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "hsevo/bpo.hpp"
#include "hsevo/diversity.hpp"
#include "hsevo/evaluation.hpp"
#include "hsevo/harmony_search.hpp"
#include "hsevo/op.hpp"
#include "hsevo/run_output.hpp"
#include "hsevo/text_util.hpp"
#include "hsevo/tsp.hpp"
#include "json.hpp"

using namespace hsevo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > limit_seconds) {
    o.pass = false;
    o.detail += "; over the " + format_double(limit_seconds) + " s limit";
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  (" << std::fixed << std::setprecision(2) << secs
            << " s)  " << o.detail << std::endl;
}

std::string fmt(double x, int digits = 6) {
  std::ostringstream ss;
  ss << std::setprecision(digits) << x;
  return ss.str();
}

SandboxOptions stub_sandbox() {
  SandboxOptions o;
  o.command = {HSEVO_TEST_PYTHON, HSEVO_TEST_STUB};
  return o;
}

std::string stub_command() { return std::string(HSEVO_TEST_PYTHON) + " " + HSEVO_TEST_STUB; }

CodeEmbedding emb(std::vector<double> v, std::uint64_t id) { return {std::move(v), IndividualId{id}, "synthetic"}; }

double edge(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

// Minimum over every spanning tree, as the sorted edge lengths of the best one.
std::vector<double> exhaustive_mst(const std::vector<CodeEmbedding>& pts) {
  const std::size_t n = pts.size();
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  std::vector<double> best;
  double best_total = INFINITY;
  std::vector<bool> pick(edges.size(), false);
  std::fill(pick.end() - static_cast<std::ptrdiff_t>(n - 1), pick.end(), true);
  do {
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
      return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    bool tree = true;
    std::vector<double> lengths;
    for (std::size_t e = 0; e < edges.size() && tree; ++e) {
      if (!pick[e]) continue;
      const auto a = find(edges[e].first), b = find(edges[e].second);
      if (a == b) tree = false;
      parent[a] = b;
      lengths.push_back(edge(pts[edges[e].first].vector, pts[edges[e].second].vector));
    }
    if (!tree) continue;
    std::sort(lengths.begin(), lengths.end());
    const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
    if (total < best_total) {
      best_total = total;
      best = lengths;
    }
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

std::vector<std::vector<std::uint64_t>> partition_ids(const ClusterPartition& p) {
  std::vector<std::vector<std::uint64_t>> out;
  for (const auto& c : p.clusters) {
    out.emplace_back();
    for (auto id : c) out.back().push_back(to_underlying(id));
  }
  return out;
}

std::vector<CodeEmbedding> at_angles(const std::vector<double>& degrees) {
  std::vector<CodeEmbedding> out;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    const double r = degrees[i] * M_PI / 180.0;
    out.push_back(emb({std::cos(r), std::sin(r)}, i));
  }
  return out;
}

int run_cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "hsevo");
  std::ostringstream out, err;
  const int rc = cli::run(args, out, err);
  if (err_text) *err_text = err.str();
  return rc;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(read_file(p)); }

std::vector<nlohmann::json> read_jsonl(const fs::path& p) {
  std::vector<nlohmann::json> out;
  const auto text = read_file(p);
  for (auto line : split_lines(text)) {
    if (!trim(line).empty()) out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "hsevo_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string fixtures = HSEVO_TEST_FIXTURES;

  criterion("entropy correctness", 1.0, [] {
    ClusterPartition p;
    p.clusters = {{IndividualId{0}, IndividualId{1}}, {IndividualId{2}}, {IndividualId{3}}};
    p.total = 4;
    const double s = swdi(p);
    std::vector<CodeEmbedding> line{emb({0}, 0), emb({1}, 1), emb({2}, 2), emb({4}, 3)};
    const double c = cdi(std::span<const CodeEmbedding>(line));
    const bool ok = std::abs(s - 1.0397) <= 1e-4 + 1e-6 && std::abs(c - 1.0397) <= 1e-4 + 1e-6 &&
                    std::abs(s - (1.5 * std::log(2.0))) <= 1e-6 && std::abs(c - 1.5 * std::log(2.0)) <= 1e-6;
    return Outcome{ok, "swdi([2,1,1]) = " + fmt(s, 10) + ", cdi({0,1,2,4}) = " + fmt(c, 10)};
  });

  criterion("MST oracle (200 point sets, n <= 7)", 30.0, [] {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> size(2, 7), dim(1, 5);
    std::uniform_real_distribution<double> coord(-1, 1);
    int mismatches = 0;
    for (int s = 0; s < 200; ++s) {
      const int n = size(rng), d = dim(rng);
      std::vector<CodeEmbedding> pts;
      for (int i = 0; i < n; ++i) {
        std::vector<double> v(static_cast<std::size_t>(d));
        for (auto& x : v) x = coord(rng);
        // Some repeated coordinates produce tied edge lengths.
        if (i > 0 && s % 5 == 0) v[0] = pts[0].vector[0];
        pts.push_back(emb(v, static_cast<std::uint64_t>(i)));
      }
      const auto mst = minimum_spanning_tree(pts);
      std::vector<double> got;
      for (const auto& e : mst.edges) got.push_back(e.length);
      std::sort(got.begin(), got.end());
      if (got != exhaustive_mst(pts)) ++mismatches;
    }
    return Outcome{mismatches == 0, std::to_string(mismatches) + " of 200 differ from exhaustive search"};
  });

  criterion("clustering contract (alpha 0.5 and 0.95)", 5.0, [] {
    using P = std::vector<std::vector<std::uint64_t>>;
    struct Case {
      std::vector<double> angles;
      double alpha;
      P expected;
    };
    const std::vector<Case> cases{
        {{0, 30, 50, 70, 125, 175}, 0.5, {{0, 1, 2}, {3, 4}, {5}}},
        {{0, 90, 45}, 0.5, {{0, 2}, {1}}},               // equally close to both: first cluster wins
        {{0, 50, 100}, 0.5, {{0, 1}, {2}}},              // 100 is close to 50 but not to 0
        {{0, 10, 15, 25, 40, 45}, 0.95, {{0, 1, 2}, {3, 4}, {5}}},
        {{0, 180, 5, 185}, 0.95, {{0, 2}, {1, 3}}},
        {{20, 0, 10}, 0.95, {{0, 2}, {1}}},              // 10 fits both; joins the earlier cluster
    };
    int bad = 0;
    for (const auto& c : cases) {
      if (partition_ids(cluster_archive(at_angles(c.angles), c.alpha)) != c.expected) ++bad;
    }
    return Outcome{bad == 0, std::to_string(cases.size() - static_cast<std::size_t>(bad)) + "/" +
                                 std::to_string(cases.size()) + " synthetic partitions exact"};
  });

  criterion("BPO feasibility + bound (seed heuristic, 5 x 1000 items, sandbox)", 60.0, [] {
    SandboxSession session(stub_sandbox());
    session.load(prompt_info(ProblemKind::bpo).seed_function, "priority_v1", 0);
    bool feasible = true, score_ok = true;
    double worst_excess = 0;
    std::string per;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto inst = gen_bpo(seed, 1000);
      const auto packing = pack_online(inst, [&](double item, const std::vector<double>& caps) {
        return wire::as_vector(session.call({item, caps}, std::chrono::seconds(10),
                                            wire::Shape::vector(caps.size()).allowing_nonfinite()));
      });
      for (double l : packing.loads) feasible = feasible && l <= inst.capacity + 1e-9;
      const double score = bpo_score(inst, packing);
      score_ok = score_ok && score >= -1.0 && score < 0.0;
      const auto lb = mt_lower_bound(inst.items, inst.capacity);
      const double excess = static_cast<double>(packing.loads.size()) / static_cast<double>(lb) - 1.0;
      worst_excess = std::max(worst_excess, excess);
      per += (per.empty() ? "" : ", ") + std::to_string(packing.loads.size()) + "/" + std::to_string(lb);
    }
    const bool ok = feasible && score_ok && worst_excess <= 0.05;
    return Outcome{ok, std::string("bins ") + (feasible ? "<= C" : "OVER C") + ", bins/lb: " + per +
                           ", worst excess " + fmt(100 * worst_excess, 4) + "% (limit 5%)"};
  });

  criterion("TSP oracle gap (GLS 200 iterations, 20 instances, n = 8)", 120.0, [] {
    ProblemConfig pc = ProblemConfig::defaults_for(ProblemKind::tsp_gls);
    pc.n_instances = 20;
    pc.size = 8;
    pc.gls.iterations = 200;
    auto setup = std::make_shared<ProblemSetup>(ProblemSetup::build(pc));
    const auto identity = eval_tsp(tsp_identity_update, setup->tsp, setup->tsp_reference, pc.gls);
    SandboxEvaluator ev(setup, stub_sandbox());
    const auto seed = ev.evaluate(prompt_info(ProblemKind::tsp_gls).seed_function);
    if (!identity.objective.valid() || !seed.objective.valid()) {
      return Outcome{false, "evaluation INVALID" + (seed.failure ? ": " + seed.failure->message : "")};
    }
    double min_gap = INFINITY;
    for (double g : identity.per_instance) min_gap = std::min(min_gap, g);
    for (double g : seed.per_instance) min_gap = std::min(min_gap, g);
    const bool ok = identity.objective.value() <= 5.0 && seed.objective.value() <= 5.0 && min_gap >= -1e-9;
    return Outcome{ok, "mean gap identity " + fmt(identity.objective.value(), 4) + "%, seed (sandbox) " +
                           fmt(seed.objective.value(), 4) + "%, min gap " + fmt(min_gap, 4) + "%"};
  });

  criterion("OP feasibility + oracle (ACO, 10 instances, n = 6)", 120.0, [] {
    bool feasible = true;
    double worst_ratio = INFINITY;
    bool above_opt = false;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto inst = gen_op(s, 6);
      const auto d = euclidean_matrix(inst.coords);
      std::mt19937_64 rng(s ^ 0x9e3779b97f4a7c15ULL);
      const auto r = aco_solve(inst, op_seed_heuristic(inst.prizes, d, inst.max_len), AcoConfig{}, rng);
      feasible = feasible && r.all_feasible && r.best.length <= 3.0 + 1e-9;
      const auto opt = exact_op(inst);
      above_opt = above_opt || r.best.prize > opt.prize + 1e-12;
      worst_ratio = std::min(worst_ratio, r.best.prize / opt.prize);
    }
    const bool ok = feasible && !above_opt && worst_ratio >= 0.8;
    return Outcome{ok, std::string("every tour ") + (feasible ? "within" : "OVER") +
                           " length 3, worst prize/OPT " + fmt(worst_ratio, 4)};
  });

  criterion("harmony search oracle (1-D over 20 seeds, 3-D with 500 iterations)", 30.0, [] {
    // Grid oracle for the 1-D case.
    auto f1 = [](double x) { return (x - 0.3) * (x - 0.3); };
    double grid_best = 0;
    for (int i = 0; i <= 10000; ++i) {
      if (f1(i / 10000.0) < f1(grid_best)) grid_best = i / 10000.0;
    }
    HarmonyConfig cfg;
    cfg.max_iterations = 100;
    double worst1 = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      std::mt19937_64 rng(s);
      const auto r = hs_optimize({{"x", 0, 1}}, [&](const std::vector<double>& v) { return std::optional(f1(v[0])); },
                                 cfg, rng);
      worst1 = std::max(worst1, std::abs(r.best->values[0] - grid_best));
    }
    // Separable quadratic over the ranges of the parameter-extraction example.
    const std::vector<NamedRange> ranges{{"reward_threshold", 0, 1}, {"distance_threshold", 0, 100},
                                         {"cost_penalty_weight", 0, 2}};
    const std::vector<double> opt{0.3, 42.0, 1.25};
    auto f3 = [&](const std::vector<double>& v) {
      double s = 0;
      for (std::size_t k = 0; k < 3; ++k) {
        const double z = (v[k] - opt[k]) / (ranges[k].high - ranges[k].low);
        s += z * z;
      }
      return std::optional(s);
    };
    cfg.max_iterations = 500;
    std::mt19937_64 rng(0);
    const auto r3 = hs_optimize(ranges, f3, cfg, rng);
    double worst3 = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      worst3 = std::max(worst3, std::abs(r3.best->values[k] - opt[k]) / (ranges[k].high - ranges[k].low));
    }
    const bool ok = worst1 <= 0.05 && worst3 <= 0.05;
    return Outcome{ok, "1-D worst |x* - 0.3| = " + fmt(worst1, 4) + " (100 iterations), 3-D worst error " +
                           fmt(100 * worst3, 4) + "% of range width"};
  });

  std::int64_t init_tokens = 0;
  criterion("end-to-end mock run (pop_init 6, pop_size 3, 3 generations)", 120.0, [&] {
    std::vector<fs::path> dirs{work / "a" / "run", work / "b" / "run"};
    for (const auto& d : dirs) {
      std::string err;
      const int rc = run_cli({"run", "--config", fixtures + "/e2e_bpo.json", "--mock-dir", fixtures + "/mock_bpo",
                              "--sandbox-cmd", stub_command(), "--output", d.string()},
                             &err);
      if (rc != 0) return Outcome{false, "run exited " + std::to_string(rc) + ": " + err};
    }
    const auto& d = dirs[0];
    for (const char* f : {run_files::archive, run_files::diversity, run_files::summary, run_files::best,
                          run_files::config}) {
      if (!fs::exists(d / f)) return Outcome{false, std::string("missing ") + f};
    }
    // Archive grows monotonically and the best objective never increases.
    const auto gens = read_jsonl(d / run_files::generations);
    bool monotone = gens.size() == 4;
    for (std::size_t t = 1; t < gens.size(); ++t) {
      monotone = monotone && gens[t]["archive_size"] > gens[t - 1]["archive_size"] &&
                 gens[t]["best_objective"].get<double>() <= gens[t - 1]["best_objective"].get<double>();
    }
    const auto archive = load_run(d / run_files::archive);
    std::set<Origin> origins;
    int last_gen = 0;
    for (const auto& ind : archive.entries()) {
      origins.insert(ind.origin);
      monotone = monotone && ind.generation >= last_gen;
      last_gen = ind.generation;
    }
    const bool all_stages = origins == std::set<Origin>{Origin::seed, Origin::init, Origin::crossover,
                                                         Origin::mutation, Origin::harmony_tuned};
    std::size_t reflector_calls = 0;
    for (const auto& e : read_jsonl(d / run_files::transcript)) reflector_calls += e["role_kind"] == "reflector";

    std::string err;
    const bool analyzed = run_cli({"analyze", d.string()}, &err) == 0;
    bool identical = true;
    for (const char* f : {run_files::archive, run_files::diversity, run_files::generations, run_files::summary,
                          run_files::best, run_files::config, run_files::transcript}) {
      identical = identical && read_file(dirs[0] / f) == read_file(dirs[1] / f);
    }
    const auto summary = read_json(d / run_files::summary);
    init_tokens = gens.empty() ? 0 : gens[0]["tokens_used"].get<std::int64_t>();
    const bool ok = monotone && all_stages && reflector_calls == 6 && analyzed && identical &&
                    summary["generations_completed"] == 3;
    return Outcome{ok, "archive " + std::to_string(archive.size()) + " individuals, " +
                           (monotone ? "monotone" : "NOT monotone") + ", " +
                           (all_stages ? "all operators exercised" : "operators missing") + ", " +
                           std::to_string(reflector_calls) + " reflection calls, analyze " +
                           (analyzed ? "matches within 1e-9" : "MISMATCH " + err) + ", outputs " +
                           (identical ? "byte-identical" : "DIFFER")};
  });

  criterion("token budget below initialization cost", 10.0, [&] {
    const std::int64_t budget = init_tokens > 0 ? init_tokens / 2 : 500;
    const auto d = work / "budget" / "run";
    std::string err;
    const int rc = run_cli({"run", "--config", fixtures + "/e2e_bpo.json", "--mock-dir", fixtures + "/mock_bpo",
                            "--sandbox-cmd", stub_command(), "--budget-tokens", std::to_string(budget),
                            "--output", d.string()},
                           &err);
    if (rc != 0) return Outcome{false, "run exited " + std::to_string(rc) + ": " + err};
    const auto s = read_json(d / run_files::summary);
    const auto used = s["tokens_used"].get<std::int64_t>();
    const bool ok = s["stop_reason"] == "budget_exhausted" && used <= budget &&
                    s["sum_of_call_tokens"].get<std::int64_t>() == used && s["best"].is_object();
    return Outcome{ok, "budget " + std::to_string(budget) + " (init needs " + std::to_string(init_tokens) +
                           "), used " + std::to_string(used) + ", stop " + s["stop_reason"].get<std::string>()};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return std::min(failures, 125);
}
