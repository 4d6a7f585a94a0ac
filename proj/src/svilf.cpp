#include "lfnet/svilf.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace lfnet {

namespace {

// Ascending complement of ({i} union neighbors(i)).
std::vector<std::int32_t> complement_row(const SparseNetwork& net,
                                         std::int32_t i) {
  std::vector<std::int32_t> comp;
  comp.reserve(std::size_t(complement_size(net, i)));
  auto row = net.neighbors(i);
  std::size_t k = 0;
  for (std::int32_t j = 0; j < net.n; ++j) {
    if (j == i) continue;
    if (k < row.size() && row[k] == j) {
      ++k;
      continue;
    }
    comp.push_back(j);
  }
  return comp;
}

void check_svilf_config(const SvilfConfig& cfg) {
  if (!(cfg.gamma > 0.0))
    throw std::invalid_argument("svilf: gamma must be positive");
  if (cfg.alpha < 0.0)
    throw std::invalid_argument("svilf: alpha must be nonnegative");
  if (!(cfg.beta > 0.5 && cfg.beta <= 1.0))
    throw std::invalid_argument("svilf: beta must lie in (0.5, 1]");
  if (cfg.max_iter < 1)
    throw std::invalid_argument("svilf: max_iter must be positive");
  if (cfg.rho_override && !(*cfg.rho_override > 0.0 && *cfg.rho_override <= 1.0))
    throw std::invalid_argument("svilf: rho override must lie in (0, 1]");
  if (cfg.min_zero_sample < 0)
    throw std::invalid_argument("svilf: min_zero_sample must be nonnegative");
}

std::int64_t node_sample_size(const SparseNetwork& net, std::int32_t i,
                              const SvilfConfig& cfg) {
  const std::int64_t n_i0 = complement_size(net, i);
  if (std::isinf(cfg.gamma)) return n_i0;
  std::int64_t size = stratum_size(n_i0, net.degree(i), cfg.gamma);
  if (cfg.min_zero_sample > 0)
    size = std::min(n_i0, std::max(size, cfg.min_zero_sample));
  return size;
}

}  // namespace

std::string sampling_name(Sampling s) {
  return s == Sampling::uniform ? "uniform" : "adaptive";
}

Sampling sampling_from_name(const std::string& name) {
  if (name == "uniform") return Sampling::uniform;
  if (name == "adaptive") return Sampling::adaptive;
  throw std::invalid_argument("unknown sampling mode: " + name);
}

std::string schedule_name(Schedule s) {
  return s == Schedule::gauss_seidel ? "gauss_seidel" : "jacobi";
}

Schedule schedule_from_name(const std::string& name) {
  if (name == "gauss_seidel" || name == "gs") return Schedule::gauss_seidel;
  if (name == "jacobi") return Schedule::jacobi;
  throw std::invalid_argument("unknown schedule: " + name);
}

std::int64_t stratum_size(std::int64_t n_i0, std::int64_t n_i1, double gamma) {
  if (n_i0 < 0 || n_i1 < 0)
    throw std::invalid_argument("stratum_size: negative stratum count");
  if (!(gamma > 0.0))
    throw std::invalid_argument("stratum_size: gamma must be positive");
  if (std::isinf(gamma)) return n_i0;
  const double budget = std::floor(gamma * double(n_i1));
  if (budget >= double(n_i0)) return n_i0;
  return static_cast<std::int64_t>(budget);
}

double step_size(int t, double alpha, double beta) {
  if (t < 0) throw std::invalid_argument("step_size: t must be nonnegative");
  return std::pow(double(t) + alpha, -beta);
}

StratumSample sample_uniform(const SparseNetwork& net, std::int32_t i,
                             std::int64_t size, rng::Stream& stream) {
  const std::int64_t n_i0 = complement_size(net, i);
  if (size < 0 || size > n_i0)
    throw std::invalid_argument("sample_uniform: size exceeds complement");

  StratumSample out;
  out.node = i;
  out.connected = net.neighbors(i);
  if (size == 0) {
    out.weight = 0.0;
    return out;
  }
  if (size == n_i0) {
    out.sampled_zero = complement_row(net, i);
    out.weight = 1.0;
    return out;
  }

  const bool dense_row = 2 * (net.degree(i) + 1) > net.n;
  if (dense_row || 2 * size > n_i0) {
    // Partial Fisher-Yates over the materialized complement.
    auto comp = complement_row(net, i);
    for (std::int64_t k = 0; k < size; ++k) {
      const auto r =
          k + std::int64_t(rng::below(stream, std::uint64_t(n_i0 - k)));
      std::swap(comp[std::size_t(k)], comp[std::size_t(r)]);
    }
    comp.resize(std::size_t(size));
    out.sampled_zero = std::move(comp);
  } else {
    // Rejection against the sorted neighbor row; expected O(size) draws
    // because the acceptance rate stays above 1/4 on this branch.
    auto row = net.neighbors(i);
    std::unordered_set<std::int32_t> seen;
    seen.reserve(std::size_t(size) * 2);
    out.sampled_zero.reserve(std::size_t(size));
    while (static_cast<std::int64_t>(out.sampled_zero.size()) < size) {
      const auto c =
          static_cast<std::int32_t>(rng::below(stream, std::uint64_t(net.n)));
      if (c == i) continue;
      if (std::binary_search(row.begin(), row.end(), c)) continue;
      if (!seen.insert(c).second) continue;
      out.sampled_zero.push_back(c);
    }
  }
  std::sort(out.sampled_zero.begin(), out.sampled_zero.end());
  out.weight = double(n_i0) / double(size);
  return out;
}

StratumSample sample_adaptive(const SparseNetwork& net, std::int32_t i,
                              std::int64_t size, const FactorState& state,
                              const ModelConfig& config, rng::Stream& stream) {
  const std::int64_t n_i0 = complement_size(net, i);
  if (size < 0 || size > n_i0)
    throw std::invalid_argument("sample_adaptive: size exceeds complement");

  StratumSample out;
  out.node = i;
  out.connected = net.neighbors(i);
  if (size == 0) {
    out.weight = 0.0;
    return out;
  }

  const auto comp = complement_row(net, i);
  const auto& mu_i = state.factors[std::size_t(i)].mu;
  std::vector<double> w(comp.size());
  double total = 0.0;
  for (std::size_t k = 0; k < comp.size(); ++k) {
    w[k] = link_inverse(mu_i.dot(state.factors[std::size_t(comp[k])].mu),
                        config.link);
    total += w[k];
  }
  if (!(total > 0.0) || !std::isfinite(total))
    throw std::runtime_error(
        "sample_adaptive: degenerate inclusion weights at node " +
        std::to_string(i));

  if (size == n_i0) {
    out.sampled_zero = comp;
    out.weight = 1.0;
    return out;
  }

  // Weighted without-replacement draw via exponential keys: keep the `size`
  // smallest E_k / w_k.
  std::vector<double> key(comp.size());
  for (std::size_t k = 0; k < comp.size(); ++k)
    key[k] = rng::exponential(stream) / w[k];
  std::vector<std::int32_t> order(comp.size());
  std::iota(order.begin(), order.end(), 0);
  std::nth_element(order.begin(), order.begin() + (size - 1), order.end(),
                   [&](std::int32_t a, std::int32_t b) {
                     return key[std::size_t(a)] < key[std::size_t(b)];
                   });
  double sampled_total = 0.0;
  out.sampled_zero.reserve(std::size_t(size));
  for (std::int64_t k = 0; k < size; ++k) {
    const auto idx = std::size_t(order[std::size_t(k)]);
    out.sampled_zero.push_back(comp[idx]);
    sampled_total += w[idx];
  }
  if (!(sampled_total > 0.0))
    throw std::runtime_error(
        "sample_adaptive: sampled weight mass vanished at node " +
        std::to_string(i));
  std::sort(out.sampled_zero.begin(), out.sampled_zero.end());
  out.weight = total / sampled_total;
  return out;
}

void gradient_estimate_logit(const SparseNetwork& net, std::int32_t i,
                             const StratumSample& sample,
                             const FactorState& state,
                             const ModelConfig& config, Eigen::VectorXd& B1,
                             Eigen::MatrixXd& B2) {
  (void)net;
  const int H = config.H;
  const auto& fi = state.factors[std::size_t(i)];
  B1 = config.a0 - fi.lambda1;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(H, H);
  for (std::int32_t j : sample.connected) {
    const auto& fj = state.factors[std::size_t(j)];
    B1 += 0.5 * fj.mu;
    acc += pg_mean(xi_pair(fi.S, fj.S)) * fj.S;
  }
  if (!sample.sampled_zero.empty()) {
    Eigen::VectorXd mu_zero = Eigen::VectorXd::Zero(H);
    Eigen::MatrixXd acc_zero = Eigen::MatrixXd::Zero(H, H);
    for (std::int32_t j : sample.sampled_zero) {
      const auto& fj = state.factors[std::size_t(j)];
      mu_zero += fj.mu;
      acc_zero += pg_mean(xi_pair(fi.S, fj.S)) * fj.S;
    }
    B1 -= 0.5 * sample.weight * mu_zero;
    acc += sample.weight * acc_zero;
  }
  B2 = -0.5 * acc - fi.lambda2;
}

void gradient_estimate_probit(const SparseNetwork& net, std::int32_t i,
                              const StratumSample& sample,
                              const FactorState& state,
                              const ModelConfig& config, Eigen::VectorXd& B1,
                              Eigen::MatrixXd& B2) {
  (void)net;
  const int H = config.H;
  const auto& fi = state.factors[std::size_t(i)];
  B1 = config.a0 - fi.lambda1;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(H, H);
  for (std::int32_t j : sample.connected) {
    const auto& fj = state.factors[std::size_t(j)];
    B1 += tn_mean(psi_pair(fi.mu, fj.mu), 1) * fj.mu;
    acc += fj.S;
  }
  if (!sample.sampled_zero.empty()) {
    Eigen::VectorXd mu_zero = Eigen::VectorXd::Zero(H);
    Eigen::MatrixXd acc_zero = Eigen::MatrixXd::Zero(H, H);
    for (std::int32_t j : sample.sampled_zero) {
      const auto& fj = state.factors[std::size_t(j)];
      mu_zero += tn_mean(psi_pair(fi.mu, fj.mu), 0) * fj.mu;
      acc_zero += fj.S;
    }
    B1 += sample.weight * mu_zero;
    acc += sample.weight * acc_zero;
  }
  B2 = -0.5 * acc - fi.lambda2;
}

GaussianFactor svilf_update_node(const SparseNetwork& net, std::int32_t i,
                                 int t, const StratumSample& sample,
                                 const FactorState& read_state,
                                 const ModelConfig& config,
                                 const SvilfConfig& cfg) {
  Eigen::VectorXd B1;
  Eigen::MatrixXd B2;
  if (config.link == Link::logit)
    gradient_estimate_logit(net, i, sample, read_state, config, B1, B2);
  else
    gradient_estimate_probit(net, i, sample, read_state, config, B1, B2);

  const auto& old = read_state.factors[std::size_t(i)];
  double rho = cfg.rho_override ? *cfg.rho_override
                                : step_size(t, cfg.alpha, cfg.beta);
  GaussianFactor f;
  for (int attempt = 0; attempt <= 30; ++attempt) {
    f.lambda1 = old.lambda1 + rho * B1;
    f.lambda2 = old.lambda2 + rho * B2;
    if (try_natural_to_moments(f.lambda1, f.lambda2, f.mu, f.Sigma, f.S))
      return f;
    rho *= 0.5;  // transient indefiniteness: shrink the stochastic step
  }
  throw std::runtime_error("svilf: step halving failed at node " +
                           std::to_string(i) + ", iteration " +
                           std::to_string(t));
}

FitResult svilf_fit(const SparseNetwork& net, const ModelConfig& config,
                    const SvilfConfig& cfg) {
  check_svilf_config(cfg);
  const auto start = std::chrono::steady_clock::now();

  FitResult result;
  FactorState state = init_state(net, config, cfg.seed);
  const int H = config.H;

  // Previous-iteration means and covariances, flattened for the
  // convergence statistic.
  const std::size_t entries_per_node = std::size_t(H) + std::size_t(H) * std::size_t(H);
  std::vector<double> prev(std::size_t(net.n) * entries_per_node);
  auto snapshot_params = [&](const FactorState& s) {
    std::size_t pos = 0;
    for (const auto& f : s.factors) {
      for (int h = 0; h < H; ++h) prev[pos++] = f.mu(h);
      for (int r = 0; r < H; ++r)
        for (int c = 0; c < H; ++c) prev[pos++] = f.Sigma(r, c);
    }
  };
  auto delta_from_snapshot = [&](const FactorState& s) {
    double sum = 0.0;
    std::size_t pos = 0;
    for (const auto& f : s.factors) {
      for (int h = 0; h < H; ++h) {
        const double d = f.mu(h) - prev[pos++];
        sum += d * d;
      }
      for (int r = 0; r < H; ++r)
        for (int c = 0; c < H; ++c) {
          const double d = f.Sigma(r, c) - prev[pos++];
          sum += d * d;
        }
    }
    return sum / (double(net.n) * double(entries_per_node));
  };

  const bool jacobi = cfg.schedule == Schedule::jacobi;
  const std::uint64_t factor_bytes =
      std::uint64_t(net.n) * std::uint64_t(3 * H * H + 2 * H) * 8u;
  result.state_bytes = factor_bytes * (jacobi ? 2u : 1u) +
                       std::uint64_t(prev.size()) * 8u +
                       std::uint64_t(net.n) * 4u;

  FactorState snapshot;
  for (int t = 1; t <= cfg.max_iter; ++t) {
    snapshot_params(state);
    const FactorState* read = &state;
    if (jacobi) {
      snapshot = state;
      read = &snapshot;
    }
    auto perm_stream = rng::make_stream(cfg.seed, rng::kTagPerm, std::uint64_t(t));
    const auto perm = rng::permutation(net.n, perm_stream);

    std::uint64_t visits = 0;
    for (const std::int32_t i : perm) {
      auto node_stream = rng::make_stream(cfg.seed, rng::kTagNode,
                                          std::uint64_t(t), std::uint64_t(i));
      const std::int64_t size = node_sample_size(net, i, cfg);
      const StratumSample sample =
          cfg.sampling == Sampling::uniform
              ? sample_uniform(net, i, size, node_stream)
              : sample_adaptive(net, i, size, *read, config, node_stream);
      visits += std::uint64_t(sample.connected.size()) +
                std::uint64_t(sample.sampled_zero.size());
      state.factors[std::size_t(i)] =
          svilf_update_node(net, i, t, sample, *read, config, cfg);
    }
    result.pair_visits.push_back(visits);
    const double delta = delta_from_snapshot(state);
    result.delta_trace.push_back(delta);
    result.iterations = t;
    if (delta < cfg.tol) {
      result.converged = true;
      break;
    }
  }
  state.iteration = result.iterations;
  result.state = std::move(state);
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace lfnet
