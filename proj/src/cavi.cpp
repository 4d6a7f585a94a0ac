#include "lfnet/cavi.hpp"

#include <chrono>
#include <stdexcept>

#include "lfnet/rng.hpp"

namespace lfnet {

namespace {

void check_config(const SparseNetwork& net, const ModelConfig& config) {
  if (config.H < 1) throw std::invalid_argument("model: H must be positive");
  if (config.a0.size() != config.H)
    throw std::invalid_argument("model: prior mean size differs from H");
  if (net.n < 2) throw std::invalid_argument("model: network needs >= 2 nodes");
}

}  // namespace

FactorState init_state(const SparseNetwork& net, const ModelConfig& config,
                       std::uint64_t seed) {
  check_config(net, config);
  const int H = config.H;
  FactorState state;
  state.iteration = 0;
  state.factors.reserve(std::size_t(net.n));
  for (std::int32_t i = 0; i < net.n; ++i) {
    auto s = rng::make_stream(seed, rng::kTagInit, std::uint64_t(i));
    GaussianFactor f;
    f.mu.resize(H);
    for (int h = 0; h < H; ++h) f.mu(h) = 0.1 * rng::normal01(s);
    f.Sigma = Eigen::MatrixXd::Identity(H, H);
    // With Sigma = I the natural parameters are available in closed form.
    f.lambda1 = f.mu;
    f.lambda2 = -0.5 * Eigen::MatrixXd::Identity(H, H);
    f.S = f.Sigma + f.mu * f.mu.transpose();
    state.factors.push_back(std::move(f));
  }
  return state;
}

void cavi_step_logit(const SparseNetwork& net, const ModelConfig& config,
                     const FactorState& cur, FactorState& next) {
  check_config(net, config);
  const int H = config.H;
  const std::int32_t n = net.n;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(H, H);
  next.factors.resize(std::size_t(n));

  Eigen::VectorXd mu_total = Eigen::VectorXd::Zero(H);
  for (const auto& f : cur.factors) mu_total += f.mu;

  Eigen::VectorXd l1(H);
  Eigen::MatrixXd acc(H, H);
  for (std::int32_t i = 0; i < n; ++i) {
    const auto& fi = cur.factors[std::size_t(i)];
    // lambda_i1 = sum_{j in N(i)} mu_j - 0.5 (sum_{j != i} mu_j) + a0,
    // since y - 1/2 is +1/2 on edges and -1/2 elsewhere.
    l1 = config.a0 - 0.5 * (mu_total - fi.mu);
    for (std::int32_t j : net.neighbors(i)) l1 += cur.factors[std::size_t(j)].mu;

    acc = eye;
    for (std::int32_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto& fj = cur.factors[std::size_t(j)];
      acc += pg_mean(xi_pair(fi.S, fj.S)) * fj.S;
    }
    next.factors[std::size_t(i)] =
        GaussianFactor::from_natural(l1, -0.5 * acc, i);
  }
  next.iteration = cur.iteration + 1;
}

void cavi_step_probit(const SparseNetwork& net, const ModelConfig& config,
                      const FactorState& cur, FactorState& next) {
  check_config(net, config);
  const int H = config.H;
  const std::int32_t n = net.n;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(H, H);
  next.factors.resize(std::size_t(n));

  Eigen::MatrixXd s_total = Eigen::MatrixXd::Zero(H, H);
  for (const auto& f : cur.factors) s_total += f.S;

  Eigen::VectorXd l1(H);
  for (std::int32_t i = 0; i < n; ++i) {
    const auto& fi = cur.factors[std::size_t(i)];
    l1 = config.a0;
    auto row = net.neighbors(i);
    std::size_t k = 0;
    for (std::int32_t j = 0; j < n; ++j) {
      if (j == i) continue;
      int y = 0;
      if (k < row.size() && row[k] == j) {
        y = 1;
        ++k;
      }
      const auto& fj = cur.factors[std::size_t(j)];
      l1 += tn_mean(psi_pair(fi.mu, fj.mu), y) * fj.mu;
    }
    const Eigen::MatrixXd l2 = -0.5 * (s_total - fi.S + eye);
    next.factors[std::size_t(i)] = GaussianFactor::from_natural(l1, l2, i);
  }
  next.iteration = cur.iteration + 1;
}

FactorState cavi_step(const SparseNetwork& net, const ModelConfig& config,
                      const FactorState& cur) {
  FactorState next;
  if (config.link == Link::logit)
    cavi_step_logit(net, config, cur, next);
  else
    cavi_step_probit(net, config, cur, next);
  return next;
}

double mean_sq_param_diff(const FactorState& a, const FactorState& b) {
  if (a.factors.size() != b.factors.size())
    throw std::invalid_argument("mean_sq_param_diff: state size mismatch");
  if (a.factors.empty()) return 0.0;
  const auto H = a.factors.front().mu.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.factors.size(); ++i) {
    sum += (a.factors[i].mu - b.factors[i].mu).squaredNorm();
    sum += (a.factors[i].Sigma - b.factors[i].Sigma).squaredNorm();
  }
  return sum / (double(a.factors.size()) * double(H + H * H));
}

FitResult cavi_fit(const SparseNetwork& net, const ModelConfig& config,
                   const CaviConfig& cfg) {
  if (cfg.max_iter < 1)
    throw std::invalid_argument("cavi: max_iter must be positive");
  const auto start = std::chrono::steady_clock::now();

  FitResult result;
  FactorState cur = init_state(net, config, cfg.seed);
  FactorState next;

  const int H = config.H;
  result.state_bytes =
      2u * std::uint64_t(net.n) * std::uint64_t(3 * H * H + 2 * H) * 8u;

  for (int t = 1; t <= cfg.max_iter; ++t) {
    if (config.link == Link::logit)
      cavi_step_logit(net, config, cur, next);
    else
      cavi_step_probit(net, config, cur, next);
    result.pair_visits.push_back(std::uint64_t(net.n) *
                                 std::uint64_t(net.n - 1));
    const double delta = mean_sq_param_diff(cur, next);
    result.delta_trace.push_back(delta);
    std::swap(cur, next);
    result.iterations = t;
    if (delta < cfg.tol) {
      result.converged = true;
      break;
    }
  }
  result.state = std::move(cur);
  result.state.iteration = result.iterations;
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace lfnet
