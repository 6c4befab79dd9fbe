#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "hsevo/archive.hpp"
#include "hsevo/embedding.hpp"

namespace hsevo {

struct ClusterPartition {
  std::vector<std::vector<IndividualId>> clusters;
  double alpha = 0.95;
  std::size_t total = 0;
};

struct MstEdge {
  IndividualId a{};
  IndividualId b{};
  double length = 0.0;
};

struct MstSummary {
  std::vector<MstEdge> edges;
  double total_length = 0.0;
};

struct DiversityReport {
  int timestep = 0;
  double swdi = 0.0;
  double cdi = 0.0;
  ClusterPartition partition;
  MstSummary mst;
  std::size_t archive_size = 0;
};

// First-fit clustering: each embedding, in order, joins the first cluster
// whose every member has cosine similarity >= alpha with it.
ClusterPartition cluster_archive(std::span<const CodeEmbedding> embeddings, double alpha);

// Shannon entropy (natural log) of the cluster-size distribution.
double swdi(const ClusterPartition& partition);

// Kruskal over the complete Euclidean graph; ties broken by (length, i, j)
// with i < j positions in the input.
MstSummary minimum_spanning_tree(std::span<const CodeEmbedding> embeddings);

// Entropy of the normalized MST edge lengths; 0 when all lengths are zero.
double cdi(const MstSummary& mst);
double cdi(std::span<const CodeEmbedding> embeddings);

// Entropy of an unnormalized weight vector, with 0 ln 0 = 0.
double entropy_of_weights(std::span<const double> weights);

enum class DiversityScope { cumulative, per_generation };

struct DiversityOptions {
  double alpha = 0.95;
  bool include_invalid = true;
  DiversityScope scope = DiversityScope::cumulative;
};

// Embeds every eligible individual in `snapshot` (normalized first) and
// computes both metrics. A single eligible individual gives cdi = 0 and an
// empty tree.
DiversityReport compute_report(std::span<const Individual> snapshot, int timestep, Embedder& embedder,
                               const DiversityOptions& opts);

// Report per timestep 0..last generation present in the archive. Timesteps
// with no eligible individual get an all-zero report.
std::vector<DiversityReport> diversity_series(const Archive& archive, Embedder& embedder,
                                              const DiversityOptions& opts);

std::string diversity_csv_header();
std::string diversity_csv_row(const DiversityReport& r);
void write_diversity_csv(const std::filesystem::path& path, std::span<const DiversityReport> reports);

}  // namespace hsevo
