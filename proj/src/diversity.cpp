#include "hsevo/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hsevo/errors.hpp"
#include "hsevo/normalizer.hpp"
#include "hsevo/text_util.hpp"

namespace hsevo {
namespace {

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("embedding dimensions differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

struct DisjointSet {
  std::vector<std::size_t> parent, rank;
  explicit DisjointSet(std::size_t n) : parent(n), rank(n, 0) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank[a] < rank[b]) std::swap(a, b);
    parent[b] = a;
    if (rank[a] == rank[b]) ++rank[a];
    return true;
  }
};

}  // namespace

ClusterPartition cluster_archive(std::span<const CodeEmbedding> embeddings, double alpha) {
  if (embeddings.empty()) throw EmptyArchiveError("cannot cluster an empty archive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  ClusterPartition out;
  out.alpha = alpha;
  out.total = embeddings.size();
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    bool placed = false;
    for (std::size_t c = 0; c < members.size() && !placed; ++c) {
      const bool fits = std::all_of(members[c].begin(), members[c].end(), [&](std::size_t k) {
        return cosine_similarity(embeddings[i], embeddings[k]) >= alpha;
      });
      if (fits) {
        members[c].push_back(i);
        out.clusters[c].push_back(embeddings[i].source_id);
        placed = true;
      }
    }
    if (!placed) {
      members.push_back({i});
      out.clusters.push_back({embeddings[i].source_id});
    }
  }
  return out;
}

double entropy_of_weights(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and non-negative");
    total += w;
  }
  if (total == 0.0) return 0.0;
  double h = 0.0;
  for (double w : weights) {
    if (w == 0.0) continue;
    const double p = w / total;
    h -= p * std::log(p);
  }
  return h < 0.0 ? 0.0 : h;
}

double swdi(const ClusterPartition& partition) {
  std::vector<double> sizes;
  sizes.reserve(partition.clusters.size());
  for (const auto& c : partition.clusters) sizes.push_back(static_cast<double>(c.size()));
  return entropy_of_weights(sizes);
}

MstSummary minimum_spanning_tree(std::span<const CodeEmbedding> embeddings) {
  const std::size_t n = embeddings.size();
  if (n < 2) throw InsufficientArchiveError("a spanning tree needs at least two embeddings");
  struct Cand {
    double len;
    std::size_t i, j;
  };
  std::vector<Cand> cands;
  cands.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      cands.push_back({euclidean(embeddings[i].vector, embeddings[j].vector), i, j});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    if (x.len != y.len) return x.len < y.len;
    if (x.i != y.i) return x.i < y.i;
    return x.j < y.j;
  });
  DisjointSet ds(n);
  MstSummary out;
  for (const auto& c : cands) {
    if (!ds.unite(c.i, c.j)) continue;
    out.edges.push_back({embeddings[c.i].source_id, embeddings[c.j].source_id, c.len});
    out.total_length += c.len;
    if (out.edges.size() == n - 1) break;
  }
  return out;
}

double cdi(const MstSummary& mst) {
  std::vector<double> lengths;
  lengths.reserve(mst.edges.size());
  for (const auto& e : mst.edges) lengths.push_back(e.length);
  return entropy_of_weights(lengths);
}

double cdi(std::span<const CodeEmbedding> embeddings) { return cdi(minimum_spanning_tree(embeddings)); }

DiversityReport compute_report(std::span<const Individual> snapshot, int timestep, Embedder& embedder,
                               const DiversityOptions& opts) {
  std::vector<CodeEmbedding> embs;
  for (const auto& ind : snapshot) {
    if (!opts.include_invalid && !ind.objective.valid()) continue;
    if (opts.scope == DiversityScope::per_generation && ind.generation != timestep) continue;
    embs.push_back(embedder.embed(normalize_or_fallback(ind.source, ind.id)));
  }
  if (embs.empty()) throw EmptyArchiveError("no individuals eligible for diversity at timestep " +
                                            std::to_string(timestep));
  DiversityReport r;
  r.timestep = timestep;
  r.archive_size = embs.size();
  r.partition = cluster_archive(embs, opts.alpha);
  r.swdi = swdi(r.partition);
  if (embs.size() >= 2) {
    r.mst = minimum_spanning_tree(embs);
    r.cdi = cdi(r.mst);
  }
  return r;
}

std::vector<DiversityReport> diversity_series(const Archive& archive, Embedder& embedder,
                                              const DiversityOptions& opts) {
  const auto all = archive.entries();
  std::vector<DiversityReport> out;
  if (all.empty()) return out;
  const int last = all.back().generation;
  for (int t = 0; t <= last; ++t) {
    std::vector<Individual> snap;
    for (const auto& ind : all) {
      if (ind.generation <= t) snap.push_back(ind);
    }
    try {
      out.push_back(compute_report(snap, t, embedder, opts));
    } catch (const EmptyArchiveError&) {
      DiversityReport empty;
      empty.timestep = t;
      out.push_back(empty);
    }
  }
  return out;
}

std::string diversity_csv_header() { return "timestep,swdi,cdi,n_clusters,archive_size,mst_total_length\n"; }

std::string diversity_csv_row(const DiversityReport& r) {
  return std::to_string(r.timestep) + "," + format_double(r.swdi) + "," + format_double(r.cdi) + "," +
         std::to_string(r.partition.clusters.size()) + "," + std::to_string(r.archive_size) + "," +
         format_double(r.mst.total_length) + "\n";
}

void write_diversity_csv(const std::filesystem::path& path, std::span<const DiversityReport> reports) {
  std::string content = diversity_csv_header();
  for (const auto& r : reports) content += diversity_csv_row(r);
  write_file_atomic(path, content);
}

}  // namespace hsevo
