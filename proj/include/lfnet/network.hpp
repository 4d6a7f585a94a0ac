// Undirected binary networks in compressed sparse row form, plus the
// synthetic scenario generators used throughout the test and benchmark
// harnesses.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lfnet {

// Simple undirected graph: no self-loops, no multi-edges.  Rows are strictly
// ascending; every edge appears in both endpoint rows.
struct SparseNetwork {
  std::int32_t n = 0;
  std::int64_t m = 0;                  // undirected edge count
  std::vector<std::int64_t> offsets;   // size n + 1
  std::vector<std::int32_t> adj;       // size 2m, row i = neighbors of i

  std::span<const std::int32_t> neighbors(std::int32_t i) const {
    const auto b = static_cast<std::size_t>(offsets[std::size_t(i)]);
    const auto e = static_cast<std::size_t>(offsets[std::size_t(i) + 1]);
    return {adj.data() + b, e - b};
  }
  std::int64_t degree(std::int32_t i) const {
    return offsets[std::size_t(i) + 1] - offsets[std::size_t(i)];
  }
  bool has_edge(std::int32_t i, std::int32_t j) const;

  // Builds from an arbitrary pair list: normalizes orientation, drops
  // self-loops and duplicates (counts reported through the out-params),
  // then validates the CSR invariants.
  static SparseNetwork from_edges(std::int32_t n,
                                  std::vector<std::pair<std::int32_t, std::int32_t>> edges,
                                  std::int64_t* dropped_self_loops = nullptr,
                                  std::int64_t* dropped_duplicates = nullptr);

  // Throws std::runtime_error if any structural invariant is violated.
  void validate() const;
};

enum class Scenario { s1, s2, s3 };

struct GeneratorSpec {
  Scenario scenario = Scenario::s1;
  std::int32_t n = 0;
  std::uint64_t seed = 0;
  double s1_sd = 3.0;       // latent coordinate standard deviation (s1)
  int s1_dim = 2;           // latent dimension (s1)
  double s3_within = 0.6;   // within-block edge probability (s3)
  double s3_between = 0.2;  // between-block edge probability (s3)
};

// Draws one network from the spec.  One uniform per dyad, keyed by
// (seed, i, j), so enlarging n leaves earlier dyads unchanged.
SparseNetwork generate(const GeneratorSpec& spec);

struct EdgeListStats {
  std::int64_t self_loops = 0;
  std::int64_t duplicates = 0;
};

// Whitespace-separated "i j" lines; '#' starts a comment line.  With
// remap_ids the vertex ids are renumbered by first appearance, otherwise
// ids are taken literally and n = max id + 1.
SparseNetwork read_edge_list(const std::string& path, bool remap_ids = false,
                             EdgeListStats* stats = nullptr);

// One "i j" line per edge with i < j, ascending, LF line endings.
void write_edge_list(const SparseNetwork& net, const std::string& path);

double density(const SparseNetwork& net);

// Number of non-neighbors of i (excluding i itself).
std::int64_t complement_size(const SparseNetwork& net, std::int32_t i);

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

}  // namespace lfnet
