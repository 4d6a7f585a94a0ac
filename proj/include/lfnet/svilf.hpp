// Stochastic variational inference for the latent factor network model with
// stratified node subsampling: each node update uses all of its neighbors
// plus a weighted subsample of its non-neighbors, giving an unbiased
// estimate of the full coordinate update at per-iteration cost
// O((1 + gamma) * 2m) dyad visits.
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "lfnet/cavi.hpp"
#include "lfnet/rng.hpp"
#include "lfnet/varmath.hpp"

namespace lfnet {

enum class Sampling { uniform, adaptive };
enum class Schedule { gauss_seidel, jacobi };

std::string sampling_name(Sampling s);
Sampling sampling_from_name(const std::string& name);
std::string schedule_name(Schedule s);
Schedule schedule_from_name(const std::string& name);

struct SvilfConfig {
  double gamma = 2.0;   // non-neighbor budget per neighbor; +inf = exhaustive
  double alpha = 1.0;   // step-size offset
  double beta = 0.75;   // step-size decay exponent, must lie in (0.5, 1]
  Sampling sampling = Sampling::uniform;
  Schedule schedule = Schedule::gauss_seidel;
  double tol = 1e-5;
  int max_iter = 500;
  std::uint64_t seed = 0;
  std::optional<double> rho_override;  // constant step, for testing
  std::int64_t min_zero_sample = 0;    // optional floor on the subsample size
};

// One node's stratum: every neighbor, plus a without-replacement subsample
// of non-neighbors whose contribution is reweighted by `weight` (the
// inverse inclusion rate; 0 by convention when the subsample is empty).
struct StratumSample {
  std::int32_t node = -1;
  std::span<const std::int32_t> connected;   // view into the network's row
  std::vector<std::int32_t> sampled_zero;    // ascending
  double weight = 0.0;
};

// min(n_i0, floor(gamma * n_i1)); gamma = +inf selects the whole complement.
std::int64_t stratum_size(std::int64_t n_i0, std::int64_t n_i1, double gamma);

// Robbins-Monro step (t + alpha)^(-beta) for iteration t >= 1.
double step_size(int t, double alpha, double beta);

// Uniform without-replacement subsample of node i's non-neighbors.
// Rejection against the sorted neighbor row, falling back to explicit
// complement materialization when the row is dense or the subsample large.
StratumSample sample_uniform(const SparseNetwork& net, std::int32_t i,
                             std::int64_t size, rng::Stream& stream);

// Weighted without-replacement subsample with inclusion weights
// g^{-1}(mu_i . mu_j) computed over the full complement; the correction
// weight becomes (total weight) / (sampled weight).
StratumSample sample_adaptive(const SparseNetwork& net, std::int32_t i,
                              std::int64_t size, const FactorState& state,
                              const ModelConfig& config, rng::Stream& stream);

// Natural-gradient estimates B = (B1, B2) such that the exact coordinate
// update equals lambda + B when the sample is exhaustive.
void gradient_estimate_logit(const SparseNetwork& net, std::int32_t i,
                             const StratumSample& sample,
                             const FactorState& state,
                             const ModelConfig& config, Eigen::VectorXd& B1,
                             Eigen::MatrixXd& B2);
void gradient_estimate_probit(const SparseNetwork& net, std::int32_t i,
                              const StratumSample& sample,
                              const FactorState& state,
                              const ModelConfig& config, Eigen::VectorXd& B1,
                              Eigen::MatrixXd& B2);

// lambda^{(t)} = lambda^{(t-1)} + rho_t B, with the step halved (at most 30
// times) if the implied precision ever fails its Cholesky factorization.
GaussianFactor svilf_update_node(const SparseNetwork& net, std::int32_t i,
                                 int t, const StratumSample& sample,
                                 const FactorState& read_state,
                                 const ModelConfig& config,
                                 const SvilfConfig& cfg);

FitResult svilf_fit(const SparseNetwork& net, const ModelConfig& config,
                    const SvilfConfig& cfg);

}  // namespace lfnet
