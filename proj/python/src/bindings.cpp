#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>
#include <sstream>

#include "cli.hpp"
#include "hsevo/bpo.hpp"
#include "hsevo/code_extraction.hpp"
#include "hsevo/diversity.hpp"
#include "hsevo/embedding.hpp"
#include "hsevo/errors.hpp"
#include "hsevo/harmony_search.hpp"
#include "hsevo/normalizer.hpp"
#include "hsevo/op.hpp"
#include "hsevo/tsp.hpp"

namespace py = pybind11;
using namespace hsevo;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_numpy(const Matrix& m) {
  Array a({m.rows, m.cols});
  std::copy(m.data.begin(), m.data.end(), a.mutable_data());
  return a;
}

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.data.begin());
  return m;
}

std::vector<Point> to_points(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != 2) throw std::invalid_argument("coordinates must have shape (n, 2)");
  std::vector<Point> pts(static_cast<std::size_t>(a.shape(0)));
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {a.at(i, 0), a.at(i, 1)};
  return pts;
}

Array from_points(const std::vector<Point>& pts) {
  Array a({pts.size(), std::size_t{2}});
  auto r = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    r(i, 0) = pts[i][0];
    r(i, 1) = pts[i][1];
  }
  return a;
}

std::vector<CodeEmbedding> to_embeddings(const Array& a) {
  if (a.ndim() != 2) throw std::invalid_argument("embeddings must have shape (n, d)");
  std::vector<CodeEmbedding> out;
  const auto d = static_cast<std::size_t>(a.shape(1));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    const double* row = a.data(i, 0);
    out.push_back({std::vector<double>(row, row + d), IndividualId{static_cast<std::uint64_t>(i)}, "array"});
  }
  return out;
}

std::vector<std::vector<std::uint64_t>> clusters_of(const ClusterPartition& p) {
  std::vector<std::vector<std::uint64_t>> out;
  for (const auto& c : p.clusters) {
    out.emplace_back();
    for (auto id : c) out.back().push_back(to_underlying(id));
  }
  return out;
}

OpInstance op_instance(const Array& coords, const std::vector<double>& prizes, double max_len) {
  OpInstance inst;
  inst.coords = to_points(coords);
  inst.prizes = prizes;
  inst.max_len = max_len;
  if (inst.prizes.size() != inst.coords.size()) throw std::invalid_argument("one prize per node is required");
  return inst;
}

py::dict op_tour_dict(const OpTour& t) {
  py::dict d;
  d["nodes"] = t.nodes;
  d["length"] = t.length;
  d["prize"] = t.prize;
  return d;
}

}  // namespace

PYBIND11_MODULE(_hsevo, m) {
  m.doc() = "Native core of hsevo";

  static py::exception<Error> base(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<EmptyArchiveError>(m, "EmptyArchiveError", base.ptr());
  py::register_exception<InsufficientArchiveError>(m, "InsufficientArchiveError", base.ptr());
  py::register_exception<UndefinedSimilarityError>(m, "UndefinedSimilarityError", base.ptr());
  py::register_exception<ExtractionError>(m, "ExtractionError", base.ptr());

  // Diversity
  m.def("entropy", [](const std::vector<double>& w) { return entropy_of_weights(w); }, py::arg("weights"));
  m.def(
      "cluster",
      [](const Array& emb, double alpha) { return clusters_of(cluster_archive(to_embeddings(emb), alpha)); },
      py::arg("embeddings"), py::arg("alpha") = 0.95,
      "First-fit clustering of the rows; returns lists of row indices.");
  m.def(
      "swdi", [](const Array& emb, double alpha) { return swdi(cluster_archive(to_embeddings(emb), alpha)); },
      py::arg("embeddings"), py::arg("alpha") = 0.95);
  m.def(
      "mst",
      [](const Array& emb) {
        const auto t = minimum_spanning_tree(to_embeddings(emb));
        std::vector<std::tuple<std::uint64_t, std::uint64_t, double>> edges;
        for (const auto& e : t.edges) edges.emplace_back(to_underlying(e.a), to_underlying(e.b), e.length);
        return py::make_tuple(edges, t.total_length);
      },
      py::arg("embeddings"), "Kruskal tree over the rows: ([(i, j, length)], total_length).");
  m.def("cdi", [](const Array& emb) { return cdi(to_embeddings(emb)); }, py::arg("embeddings"));
  m.def("cosine_similarity",
        [](const std::vector<double>& a, const std::vector<double>& b) { return cosine_similarity(a, b); });

  // Code handling
  m.def("normalize", [](const std::string& src) { return normalize_or_fallback(src).text; }, py::arg("source"));
  m.def(
      "embed",
      [](const std::string& src, int dimension) {
        HashEmbedder e(dimension);
        const auto v = e.embed_text(normalize_or_fallback(src).text);
        return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
      },
      py::arg("source"), py::arg("dimension") = 256, "Hashed n-gram embedding of the normalized source.");
  m.def("extract_code", [](const std::string& text) { return extract_code_block(text); }, py::arg("text"));
  m.def(
      "extract_code_and_ranges",
      [](const std::string& text) {
        const auto r = extract_code_and_ranges(text);
        std::vector<std::tuple<std::string, double, double>> ranges;
        for (const auto& x : r.ranges) ranges.emplace_back(x.name, x.low, x.high);
        return py::make_tuple(r.program, ranges);
      },
      py::arg("text"));

  // Harmony search
  m.def(
      "harmony_search",
      [](const std::vector<std::tuple<std::string, double, double>>& ranges,
         const std::function<std::optional<double>(const std::vector<double>&)>& objective, int memory_size,
         double hmcr, double par, double bandwidth, int max_iterations, std::uint64_t seed) {
        std::vector<NamedRange> nr;
        for (const auto& [name, lo, hi] : ranges) nr.push_back({name, lo, hi});
        HarmonyConfig cfg{memory_size, hmcr, par, bandwidth, max_iterations};
        cfg.validate();
        std::mt19937_64 rng(seed);
        const auto r = hs_optimize(nr, objective, cfg, rng);
        py::dict d;
        d["values"] = r.best ? py::cast(r.best->values) : py::none();
        d["objective"] = r.best ? py::cast(r.best->objective) : py::none();
        d["history"] = r.best_history;
        d["evaluations"] = r.evaluations;
        d["invalid"] = r.invalid;
        return d;
      },
      py::arg("ranges"), py::arg("objective"), py::arg("memory_size") = 5, py::arg("hmcr") = 0.7,
      py::arg("par") = 0.5, py::arg("bandwidth") = 0.2, py::arg("max_iterations") = 5, py::arg("seed") = 0,
      "Minimize objective over the box; objective may return None for an invalid point.");

  // Bin packing
  m.def(
      "gen_bpo",
      [](std::uint64_t seed, std::size_t n, double capacity) { return gen_bpo(seed, n, capacity).items; },
      py::arg("seed"), py::arg("n_items") = 5000, py::arg("capacity") = 100.0);
  m.def("mt_lower_bound", &mt_lower_bound, py::arg("items"), py::arg("capacity") = 100.0);
  m.def(
      "pack_online",
      [](const std::vector<double>& items, double capacity, const BpoPriorityFn& priority) {
        const BpoInstance inst{items, capacity};
        const auto p = pack_online(inst, priority);
        py::dict d;
        d["loads"] = p.loads;
        d["bin_of"] = p.bin_of;
        d["score"] = bpo_score(inst, p);
        return d;
      },
      py::arg("items"), py::arg("capacity"), py::arg("priority"),
      "Pack items online; priority(item, bins_remain_cap) scores each feasible bin.");
  m.def("bpo_seed_priority", &bpo_seed_priority, py::arg("item"), py::arg("bins_remain_cap"));

  // TSP
  m.def("gen_tsp", [](std::uint64_t seed, std::size_t n) { return from_points(gen_tsp(seed, n).coords); },
        py::arg("seed"), py::arg("n") = 100);
  m.def(
      "exact_tsp",
      [](const Array& coords) {
        const auto s = exact_tsp(TspInstance{to_points(coords)});
        return py::make_tuple(s.tour, s.length);
      },
      py::arg("coords"));
  m.def(
      "gls_solve",
      [](const Array& coords, const std::function<Array(Array, std::vector<std::int64_t>, Array)>& guide,
         int iterations, int perturbation_moves, double lambda) {
        const TspGuideFn fn = [&](const Matrix& d, const std::vector<std::int64_t>& tour, const Matrix& used) {
          return to_matrix(guide(to_numpy(d), tour, to_numpy(used)));
        };
        const auto r = gls_solve(TspInstance{to_points(coords)}, fn, GlsConfig{iterations, perturbation_moves, lambda});
        return py::make_tuple(r.best.tour, r.best.length, r.heuristic_calls);
      },
      py::arg("coords"), py::arg("guide"), py::arg("iterations") = 1000, py::arg("perturbation_moves") = 1,
      py::arg("lam") = 0.1, "Guided local search; guide(edge_distance, tour, edge_n_used) returns a penalty matrix.");
  m.def(
      "tsp_seed_update",
      [](const Array& d, const std::vector<std::int64_t>& tour, const Array& used) {
        return to_numpy(tsp_seed_update(to_matrix(d), tour, to_matrix(used)));
      },
      py::arg("edge_distance"), py::arg("local_opt_tour"), py::arg("edge_n_used"));

  // Orienteering
  m.def(
      "gen_op",
      [](std::uint64_t seed, std::size_t n, double max_len, const std::string& convention) {
        const auto inst = gen_op(seed, n, max_len,
                                 convention == "kool" ? PrizeConvention::kool : PrizeConvention::printed);
        return py::make_tuple(from_points(inst.coords), inst.prizes);
      },
      py::arg("seed"), py::arg("n") = 50, py::arg("max_len") = 3.0, py::arg("convention") = "printed");
  m.def(
      "exact_op",
      [](const Array& coords, const std::vector<double>& prizes, double max_len) {
        return op_tour_dict(exact_op(op_instance(coords, prizes, max_len)));
      },
      py::arg("coords"), py::arg("prizes"), py::arg("max_len") = 3.0);
  m.def(
      "op_seed_heuristic",
      [](const std::vector<double>& prizes, const Array& dist, double max_len) {
        return to_numpy(op_seed_heuristic(prizes, to_matrix(dist), max_len));
      },
      py::arg("node_attr"), py::arg("edge_attr"), py::arg("constraint"));
  m.def(
      "aco_solve",
      [](const Array& coords, const std::vector<double>& prizes, double max_len, const Array& eta, int n_ants,
         int iterations, std::uint64_t seed) {
        AcoConfig cfg;
        cfg.n_ants = n_ants;
        cfg.iterations = iterations;
        std::mt19937_64 rng(seed);
        const auto r = aco_solve(op_instance(coords, prizes, max_len), to_matrix(eta), cfg, rng);
        py::dict d = op_tour_dict(r.best);
        d["tours_sampled"] = r.tours_sampled;
        d["all_feasible"] = r.all_feasible;
        return d;
      },
      py::arg("coords"), py::arg("prizes"), py::arg("max_len"), py::arg("eta"), py::arg("n_ants") = 20,
      py::arg("iterations") = 50, py::arg("seed") = 0);

  m.def(
      "cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "hsevo");
        std::ostringstream out, err;
        int rc;
        {
          py::gil_scoped_release release;
          rc = cli::run(args, out, err);
        }
        return py::make_tuple(rc, out.str(), err.str());
      },
      py::arg("args"), "Run a CLI subcommand in-process; returns (exit_code, stdout, stderr).");
}
