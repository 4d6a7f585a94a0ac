#include "lfnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "lfnet/rng.hpp"

namespace lfnet {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

bool SparseNetwork::has_edge(std::int32_t i, std::int32_t j) const {
  if (i == j) return false;
  auto row = neighbors(i);
  return std::binary_search(row.begin(), row.end(), j);
}

SparseNetwork SparseNetwork::from_edges(
    std::int32_t n, std::vector<std::pair<std::int32_t, std::int32_t>> edges,
    std::int64_t* dropped_self_loops, std::int64_t* dropped_duplicates) {
  if (n < 0) throw std::invalid_argument("network size must be nonnegative");
  std::int64_t self_loops = 0;
  std::size_t keep = 0;
  for (auto& e : edges) {
    if (e.first < 0 || e.first >= n || e.second < 0 || e.second >= n)
      throw std::invalid_argument("edge endpoint out of range");
    if (e.first == e.second) {
      ++self_loops;
      continue;
    }
    if (e.first > e.second) std::swap(e.first, e.second);
    edges[keep++] = e;
  }
  edges.resize(keep);
  std::sort(edges.begin(), edges.end());
  const auto last = std::unique(edges.begin(), edges.end());
  const std::int64_t duplicates =
      static_cast<std::int64_t>(edges.end() - last);
  edges.erase(last, edges.end());
  if (dropped_self_loops) *dropped_self_loops = self_loops;
  if (dropped_duplicates) *dropped_duplicates = duplicates;

  SparseNetwork net;
  net.n = n;
  net.m = static_cast<std::int64_t>(edges.size());
  net.offsets.assign(std::size_t(n) + 1, 0);
  for (const auto& [i, j] : edges) {
    ++net.offsets[std::size_t(i) + 1];
    ++net.offsets[std::size_t(j) + 1];
  }
  for (std::size_t i = 1; i < net.offsets.size(); ++i)
    net.offsets[i] += net.offsets[i - 1];
  net.adj.resize(std::size_t(2) * std::size_t(net.m));
  std::vector<std::int64_t> cursor(net.offsets.begin(), net.offsets.end() - 1);
  // Edges are sorted lexicographically, so each row fills in ascending order.
  for (const auto& [i, j] : edges) {
    net.adj[std::size_t(cursor[std::size_t(i)]++)] = j;
    net.adj[std::size_t(cursor[std::size_t(j)]++)] = i;
  }
  net.validate();
  return net;
}

void SparseNetwork::validate() const {
  if (n < 0) throw std::runtime_error("network: negative size");
  if (offsets.size() != std::size_t(n) + 1)
    throw std::runtime_error("network: offsets size mismatch");
  if (offsets.front() != 0 ||
      offsets.back() != static_cast<std::int64_t>(adj.size()))
    throw std::runtime_error("network: offsets endpoints mismatch");
  if (static_cast<std::int64_t>(adj.size()) != 2 * m)
    throw std::runtime_error("network: adjacency size is not 2m");
  for (std::int32_t i = 0; i < n; ++i) {
    auto row = neighbors(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const std::int32_t j = row[k];
      if (j < 0 || j >= n) throw std::runtime_error("network: neighbor out of range");
      if (j == i) throw std::runtime_error("network: self-loop present");
      if (k > 0 && row[k - 1] >= j)
        throw std::runtime_error("network: row not strictly ascending");
    }
  }
  // Symmetry: every arc has its reverse.
  for (std::int32_t i = 0; i < n; ++i)
    for (std::int32_t j : neighbors(i))
      if (!has_edge(j, i)) throw std::runtime_error("network: asymmetric arc");
}

SparseNetwork generate(const GeneratorSpec& spec) {
  if (spec.n < 2) throw std::invalid_argument("generator: n must be at least 2");
  if (spec.scenario == Scenario::s1 && (spec.s1_dim < 1 || spec.s1_sd <= 0.0))
    throw std::invalid_argument("generator: invalid s1 latent parameters");
  if (spec.scenario == Scenario::s3 &&
      (spec.s3_within < 0.0 || spec.s3_within > 1.0 || spec.s3_between < 0.0 ||
       spec.s3_between > 1.0))
    throw std::invalid_argument("generator: block probabilities must lie in [0,1]");

  const std::int32_t n = spec.n;
  std::vector<std::vector<double>> w;
  std::vector<std::int8_t> block;
  if (spec.scenario == Scenario::s1 || spec.scenario == Scenario::s2) {
    const int dim = spec.scenario == Scenario::s1 ? spec.s1_dim : 2;
    const double sd = spec.scenario == Scenario::s1 ? spec.s1_sd : 1.0;
    w.assign(std::size_t(n), std::vector<double>(std::size_t(dim)));
    for (std::int32_t i = 0; i < n; ++i) {
      auto s = rng::make_stream(spec.seed, rng::kTagLatent, std::uint64_t(i));
      for (int h = 0; h < dim; ++h) w[std::size_t(i)][std::size_t(h)] = sd * rng::normal01(s);
    }
  } else {
    block.resize(std::size_t(n));
    for (std::int32_t i = 0; i < n; ++i) {
      auto s = rng::make_stream(spec.seed, rng::kTagBlock, std::uint64_t(i));
      block[std::size_t(i)] = rng::uniform01(s) < 0.5 ? 0 : 1;
    }
  }

  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  for (std::int32_t i = 0; i < n; ++i) {
    for (std::int32_t j = i + 1; j < n; ++j) {
      double pi;
      switch (spec.scenario) {
        case Scenario::s1: {
          double dot = 0.0;
          for (std::size_t h = 0; h < w[std::size_t(i)].size(); ++h)
            dot += w[std::size_t(i)][h] * w[std::size_t(j)][h];
          pi = sigmoid(dot);
          break;
        }
        case Scenario::s2: {
          double d2 = 0.0;
          for (std::size_t h = 0; h < w[std::size_t(i)].size(); ++h) {
            const double d = w[std::size_t(i)][h] - w[std::size_t(j)][h];
            d2 += d * d;
          }
          pi = sigmoid(std::sqrt(d2));
          break;
        }
        case Scenario::s3:
        default:
          pi = block[std::size_t(i)] == block[std::size_t(j)] ? spec.s3_within
                                                              : spec.s3_between;
          break;
      }
      auto s = rng::make_stream(spec.seed, rng::kTagDyad, std::uint64_t(i),
                                std::uint64_t(j));
      if (rng::uniform01(s) < pi) edges.emplace_back(i, j);
    }
  }
  return SparseNetwork::from_edges(n, std::move(edges));
}

SparseNetwork read_edge_list(const std::string& path, bool remap_ids,
                             EdgeListStats* stats) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);

  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  std::unordered_map<std::int64_t, std::int32_t> remap;
  std::int64_t max_id = -1;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::int64_t a = 0, b = 0;
    if (!(ls >> a >> b)) {
      throw std::runtime_error("edge list parse error at line " +
                               std::to_string(line_no) + " of " + path);
    }
    std::string trail;
    if (ls >> trail) {
      throw std::runtime_error("edge list parse error at line " +
                               std::to_string(line_no) + " of " + path +
                               ": expected two integers");
    }
    if (a < 0 || b < 0) {
      throw std::runtime_error("negative vertex id at line " +
                               std::to_string(line_no) + " of " + path);
    }
    std::int32_t ia, ib;
    if (remap_ids) {
      auto id_of = [&](std::int64_t v) {
        auto [it, inserted] =
            remap.try_emplace(v, static_cast<std::int32_t>(remap.size()));
        (void)inserted;
        return it->second;
      };
      ia = id_of(a);
      ib = id_of(b);
    } else {
      if (a > 0x7fffffff || b > 0x7fffffff) {
        throw std::runtime_error("vertex id too large at line " +
                                 std::to_string(line_no) + " of " + path +
                                 " (use id remapping)");
      }
      ia = static_cast<std::int32_t>(a);
      ib = static_cast<std::int32_t>(b);
    }
    max_id = std::max({max_id, std::int64_t(ia), std::int64_t(ib)});
    edges.emplace_back(ia, ib);
  }
  if (edges.empty())
    throw std::runtime_error("edge list is empty: " + path);

  std::int64_t self_loops = 0, duplicates = 0;
  auto net = SparseNetwork::from_edges(static_cast<std::int32_t>(max_id + 1),
                                       std::move(edges), &self_loops,
                                       &duplicates);
  if (net.m == 0) throw std::runtime_error("edge list has no usable edges: " + path);
  if (stats) {
    stats->self_loops = self_loops;
    stats->duplicates = duplicates;
  }
  return net;
}

void write_edge_list(const SparseNetwork& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[64];
  for (std::int32_t i = 0; i < net.n; ++i) {
    for (std::int32_t j : net.neighbors(i)) {
      if (j <= i) continue;
      const int len = std::snprintf(buf, sizeof buf, "%d %d\n", i, j);
      out.write(buf, len);
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

double density(const SparseNetwork& net) {
  if (net.n < 2) return 0.0;
  return 2.0 * double(net.m) / (double(net.n) * double(net.n - 1));
}

std::int64_t complement_size(const SparseNetwork& net, std::int32_t i) {
  return std::int64_t(net.n) - 1 - net.degree(i);
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::s1: return "s1";
    case Scenario::s2: return "s2";
    case Scenario::s3: return "s3";
  }
  return "?";
}

Scenario scenario_from_name(const std::string& name) {
  if (name == "s1") return Scenario::s1;
  if (name == "s2") return Scenario::s2;
  if (name == "s3") return Scenario::s3;
  throw std::invalid_argument("unknown scenario: " + name);
}

}  // namespace lfnet
