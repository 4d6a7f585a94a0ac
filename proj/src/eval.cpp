#include "lfnet/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "lfnet/rng.hpp"

namespace lfnet {

double predict_prob(const FactorState& state, std::int32_t i, std::int32_t j,
                    Link link) {
  if (i == j) throw std::invalid_argument("predict_prob: i == j has no dyad");
  const auto n = static_cast<std::int32_t>(state.factors.size());
  if (i < 0 || j < 0 || i >= n || j >= n)
    throw std::out_of_range("predict_prob: node out of range");
  return link_inverse(
      psi_pair(state.factors[std::size_t(i)].mu, state.factors[std::size_t(j)].mu),
      link);
}

std::vector<std::pair<std::int32_t, std::int32_t>> select_dyads(
    const SparseNetwork& net, DyadMode mode, std::int64_t cap,
    std::uint64_t seed) {
  const std::int64_t total = std::int64_t(net.n) * (net.n - 1) / 2;
  std::vector<std::pair<std::int32_t, std::int32_t>> dyads;
  if (mode == DyadMode::all) {
    if (cap > 0 && total > cap) {
      throw std::length_error(
          "select_dyads: " + std::to_string(total) +
          " dyads exceed the cap (" + std::to_string(cap) +
          "); use balanced mode");
    }
    dyads.reserve(std::size_t(total));
    for (std::int32_t i = 0; i < net.n; ++i)
      for (std::int32_t j = i + 1; j < net.n; ++j) dyads.emplace_back(i, j);
    return dyads;
  }

  // Balanced: all edges, plus an equal number of distinct non-edges.
  const std::int64_t negatives_available = total - net.m;
  const std::int64_t want = std::min<std::int64_t>(net.m, negatives_available);
  if (net.m == 0 || want == 0)
    throw std::invalid_argument(
        "select_dyads: balanced mode needs both edges and non-edges");
  dyads.reserve(std::size_t(net.m + want));
  for (std::int32_t i = 0; i < net.n; ++i)
    for (std::int32_t j : net.neighbors(i))
      if (j > i) dyads.emplace_back(i, j);

  auto stream = rng::make_stream(seed, rng::kTagDyadSample);
  if (2 * net.m > total) {
    // Dense graph: materialize the non-edges and take a partial shuffle.
    std::vector<std::pair<std::int32_t, std::int32_t>> pool;
    pool.reserve(std::size_t(negatives_available));
    for (std::int32_t i = 0; i < net.n; ++i) {
      auto row = net.neighbors(i);
      std::size_t k = 0;
      for (std::int32_t j = i + 1; j < net.n; ++j) {
        while (k < row.size() && row[k] < j) ++k;
        if (k < row.size() && row[k] == j) continue;
        pool.emplace_back(i, j);
      }
    }
    for (std::int64_t k = 0; k < want; ++k) {
      const auto r = k + std::int64_t(rng::below(
                             stream, std::uint64_t(std::int64_t(pool.size()) - k)));
      std::swap(pool[std::size_t(k)], pool[std::size_t(r)]);
    }
    dyads.insert(dyads.end(), pool.begin(), pool.begin() + want);
  } else {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(std::size_t(want) * 2);
    while (static_cast<std::int64_t>(seen.size()) < want) {
      auto i = static_cast<std::int32_t>(rng::below(stream, std::uint64_t(net.n)));
      auto j = static_cast<std::int32_t>(rng::below(stream, std::uint64_t(net.n)));
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      if (net.has_edge(i, j)) continue;
      const std::uint64_t key = std::uint64_t(i) * std::uint64_t(net.n) + std::uint64_t(j);
      if (seen.insert(key).second) dyads.emplace_back(i, j);
    }
  }
  return dyads;
}

DyadScoreSet score_dyads(const SparseNetwork& net, const FactorState& state,
                         Link link,
                         const std::vector<std::pair<std::int32_t, std::int32_t>>& dyads) {
  if (static_cast<std::int32_t>(state.factors.size()) != net.n)
    throw std::invalid_argument("score_dyads: state and network size differ");
  DyadScoreSet set;
  set.dyads = dyads;
  set.scores.reserve(dyads.size());
  set.labels.reserve(dyads.size());
  for (const auto& [i, j] : dyads) {
    set.scores.push_back(predict_prob(state, i, j, link));
    set.labels.push_back(net.has_edge(i, j) ? 1 : 0);
  }
  return set;
}

AucCounts auc_counts(const DyadScoreSet& set) {
  if (set.scores.size() != set.labels.size())
    throw std::invalid_argument("auc: scores and labels differ in length");
  std::uint64_t pos = 0, neg = 0;
  for (auto l : set.labels) (l ? pos : neg)++;
  if (pos == 0 || neg == 0)
    throw std::domain_error("auc: needs at least one positive and one negative");

  std::vector<std::uint32_t> order(set.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return set.scores[a] < set.scores[b];
  });

  // Walk ascending score groups; positives beat every negative strictly
  // below, and tie with negatives inside the group.
  AucCounts counts;
  counts.pairs = pos * neg;
  std::uint64_t neg_below = 0;
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t e = k;
    std::uint64_t pos_here = 0, neg_here = 0;
    while (e < order.size() && set.scores[order[e]] == set.scores[order[k]]) {
      (set.labels[order[e]] ? pos_here : neg_here)++;
      ++e;
    }
    counts.num2 += 2 * pos_here * neg_below + pos_here * neg_here;
    neg_below += neg_here;
    k = e;
  }
  return counts;
}

double auc(const DyadScoreSet& set) {
  const auto counts = auc_counts(set);
  return double(counts.num2) / (2.0 * double(counts.pairs));
}

std::vector<std::pair<double, double>> roc_points(const DyadScoreSet& set) {
  std::uint64_t pos = 0, neg = 0;
  for (auto l : set.labels) (l ? pos : neg)++;
  if (pos == 0 || neg == 0)
    throw std::domain_error("roc: needs at least one positive and one negative");

  std::vector<std::uint32_t> order(set.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return set.scores[a] > set.scores[b];
  });

  std::vector<std::pair<double, double>> points;
  points.emplace_back(0.0, 0.0);
  std::uint64_t tp = 0, fp = 0;
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t e = k;
    while (e < order.size() && set.scores[order[e]] == set.scores[order[k]]) {
      (set.labels[order[e]] ? tp : fp)++;
      ++e;
    }
    points.emplace_back(double(fp) / double(neg), double(tp) / double(pos));
    k = e;
  }
  return points;
}

void write_roc_csv(const std::vector<std::pair<double, double>>& points,
                   const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "fpr,tpr\n";
  char buf[64];
  for (const auto& [fpr, tpr] : points) {
    const int len = std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", fpr, tpr);
    out.write(buf, len);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace lfnet
