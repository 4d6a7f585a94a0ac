// Coordinate-ascent variational inference for the latent factor network
// model.  One sweep recomputes every factor's natural parameters from the
// previous iteration's state (Jacobi semantics), so a sweep is a pure
// function of (network, state).
#pragma once

#include <cstdint>
#include <vector>

#include "lfnet/varmath.hpp"

namespace lfnet {

struct CaviConfig {
  double tol = 1e-5;   // mean squared parameter change per iteration
  int max_iter = 1000;
  std::uint64_t seed = 0;
};

struct FitResult {
  FactorState state;
  int iterations = 0;
  bool converged = false;
  std::vector<double> delta_trace;          // one entry per iteration
  double elapsed_seconds = 0.0;
  std::vector<std::uint64_t> pair_visits;   // inner-loop dyad visits per iteration
  std::uint64_t state_bytes = 0;            // working-state allocation estimate
};

// Random initialization: mu entries are 0.1 * N(0,1) keyed by (seed, node),
// Sigma = I.
FactorState init_state(const SparseNetwork& net, const ModelConfig& config,
                       std::uint64_t seed);

// One full sweep; reads `cur`, writes all factors of `next`.
void cavi_step_logit(const SparseNetwork& net, const ModelConfig& config,
                     const FactorState& cur, FactorState& next);
void cavi_step_probit(const SparseNetwork& net, const ModelConfig& config,
                      const FactorState& cur, FactorState& next);

// Convenience wrapper returning the swept state.
FactorState cavi_step(const SparseNetwork& net, const ModelConfig& config,
                      const FactorState& cur);

FitResult cavi_fit(const SparseNetwork& net, const ModelConfig& config,
                   const CaviConfig& cfg);

// Mean squared entrywise difference over all means and covariances.
double mean_sq_param_diff(const FactorState& a, const FactorState& b);

}  // namespace lfnet
