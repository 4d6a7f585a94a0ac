// In-sample link prediction: dyad scoring, exact Mann-Whitney AUC with tie
// handling, and stepwise ROC curves.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lfnet/varmath.hpp"

namespace lfnet {

struct DyadScoreSet {
  std::vector<std::pair<std::int32_t, std::int32_t>> dyads;
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
};

// Posterior-mean edge probability g^{-1}(mu_i . mu_j); i == j is an error.
double predict_prob(const FactorState& state, std::int32_t i, std::int32_t j,
                    Link link);

enum class DyadMode { all, balanced };

// `all` enumerates every i < j (rejected when the count exceeds `cap`);
// `balanced` takes every edge plus an equal number of uniformly sampled
// non-edges (seeded, without replacement).
std::vector<std::pair<std::int32_t, std::int32_t>> select_dyads(
    const SparseNetwork& net, DyadMode mode, std::int64_t cap,
    std::uint64_t seed);

// Scores and labels the given dyads against the network.
DyadScoreSet score_dyads(const SparseNetwork& net, const FactorState& state,
                         Link link,
                         const std::vector<std::pair<std::int32_t, std::int32_t>>& dyads);

// Exact pair counts behind the AUC: auc = num2 / (2 * pairs), where num2
// counts concordant pairs twice and ties once.
struct AucCounts {
  std::uint64_t num2 = 0;
  std::uint64_t pairs = 0;
};
AucCounts auc_counts(const DyadScoreSet& set);

// Mann-Whitney AUC with ties at half credit; O(k log k).  Requires at
// least one positive and one negative label.
double auc(const DyadScoreSet& set);

// Stepwise ROC points from (0,0) to (1,1), one step per distinct score.
std::vector<std::pair<double, double>> roc_points(const DyadScoreSet& set);

// "fpr,tpr" CSV rows at six decimals, with a header line.
void write_roc_csv(const std::vector<std::pair<double, double>>& points,
                   const std::string& path);

}  // namespace lfnet
