#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "lfnet/eval.hpp"
#include "lfnet/svilf.hpp"
#include "oracles.hpp"

using namespace lfnet;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SparseNetwork random_net(std::int32_t n, double p, std::uint64_t seed) {
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  auto s = rng::make_stream(seed, 3001);
  for (std::int32_t i = 0; i < n; ++i)
    for (std::int32_t j = i + 1; j < n; ++j)
      if (rng::uniform01(s) < p) edges.emplace_back(i, j);
  return SparseNetwork::from_edges(n, std::move(edges));
}

ModelConfig model_for(const SparseNetwork& net, int H, Link link) {
  ModelConfig cfg;
  cfg.H = H;
  cfg.link = link;
  cfg.a0 = default_prior_mean(net, cfg);
  return cfg;
}

FactorState random_state(std::int32_t n, int H, std::uint64_t seed) {
  FactorState state;
  auto s = rng::make_stream(seed, 3002);
  for (std::int32_t i = 0; i < n; ++i) {
    Eigen::VectorXd mu(H);
    for (int h = 0; h < H; ++h) mu(h) = 0.6 * rng::normal01(s);
    Eigen::MatrixXd A(H, H);
    for (int r = 0; r < H; ++r)
      for (int c = 0; c < H; ++c) A(r, c) = 0.25 * rng::normal01(s);
    const Eigen::MatrixXd Sigma =
        A * A.transpose() + Eigen::MatrixXd::Identity(H, H) * 0.5;
    state.factors.push_back(GaussianFactor::from_moments(mu, Sigma, i));
  }
  return state;
}

std::vector<std::int32_t> complement_of(const SparseNetwork& net,
                                        std::int32_t i) {
  std::vector<std::int32_t> comp;
  for (std::int32_t j = 0; j < net.n; ++j)
    if (j != i && !net.has_edge(i, j)) comp.push_back(j);
  return comp;
}

StratumSample exhaustive_sample(const SparseNetwork& net, std::int32_t i) {
  StratumSample s;
  s.node = i;
  s.connected = net.neighbors(i);
  s.sampled_zero = complement_of(net, i);
  s.weight = 1.0;
  return s;
}

}  // namespace

TEST_CASE("stratum_size: budget, clamp, and exhaustive sentinel") {
  CHECK(stratum_size(100, 10, 2.0) == 20);
  CHECK(stratum_size(5, 10, 2.0) == 5);        // clamps to the complement
  CHECK(stratum_size(100, 10, 0.25) == 2);     // floor(2.5)
  CHECK(stratum_size(100, 0, 2.0) == 0);       // no neighbors, no budget
  CHECK(stratum_size(100, 10, kInf) == 100);   // exhaustive sentinel
  CHECK(stratum_size(0, 10, 2.0) == 0);
  CHECK_THROWS_AS(stratum_size(-1, 10, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(stratum_size(10, 10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(stratum_size(10, 10, -1.0), std::invalid_argument);
}

TEST_CASE("step_size: frozen values and decay") {
  CHECK(step_size(1, 1.0, 0.75) ==
        doctest::Approx(std::pow(2.0, -0.75)).epsilon(1e-15));
  CHECK(std::pow(2.0, -0.75) == doctest::Approx(0.5946035575).epsilon(1e-9));
  CHECK(step_size(0, 1.0, 0.9) == 1.0);
  for (int t = 1; t < 50; ++t)
    CHECK(step_size(t + 1, 1.0, 0.75) < step_size(t, 1.0, 0.75));
  CHECK_THROWS_AS(step_size(-1, 1.0, 0.75), std::invalid_argument);
}

TEST_CASE("sample_uniform: contract on membership, order, and weight") {
  const auto net = random_net(40, 0.2, 4);
  for (std::int32_t i : {0, 7, 21}) {
    const auto n_i0 = complement_size(net, i);
    auto s = rng::make_stream(99, rng::kTagNode, 1, std::uint64_t(i));
    const auto sample = sample_uniform(net, i, n_i0 / 2, s);
    CHECK(sample.node == i);
    CHECK(std::int64_t(sample.sampled_zero.size()) == n_i0 / 2);
    CHECK(sample.weight ==
          doctest::Approx(double(n_i0) / double(n_i0 / 2)).epsilon(1e-15));
    CHECK(std::is_sorted(sample.sampled_zero.begin(),
                         sample.sampled_zero.end()));
    for (std::size_t k = 1; k < sample.sampled_zero.size(); ++k)
      CHECK(sample.sampled_zero[k] != sample.sampled_zero[k - 1]);
    for (std::int32_t j : sample.sampled_zero) {
      CHECK(j != i);
      CHECK_FALSE(net.has_edge(i, j));
    }
  }

  // Exhaustive request returns the whole complement with unit weight.
  auto s = rng::make_stream(1, rng::kTagNode, 1, 0);
  const auto full = sample_uniform(net, 0, complement_size(net, 0), s);
  CHECK(full.weight == 1.0);
  CHECK(full.sampled_zero == complement_of(net, 0));

  // Empty request carries the zero-weight convention.
  const auto empty = sample_uniform(net, 0, 0, s);
  CHECK(empty.sampled_zero.empty());
  CHECK(empty.weight == 0.0);

  CHECK_THROWS_AS(sample_uniform(net, 0, complement_size(net, 0) + 1, s),
                  std::invalid_argument);

  // Same stream state implies the same draw.
  auto s1 = rng::make_stream(7, rng::kTagNode, 3, 5);
  auto s2 = rng::make_stream(7, rng::kTagNode, 3, 5);
  CHECK(sample_uniform(net, 5, 8, s1).sampled_zero ==
        sample_uniform(net, 5, 8, s2).sampled_zero);
}

TEST_CASE("sample_uniform: inclusion frequencies are uniform on both paths") {
  // Node 0 sparse (rejection path) and node 9 dense (Fisher-Yates path).
  const auto net = SparseNetwork::from_edges(
      10, {{0, 1}, {0, 2}, {0, 3}, {9, 1}, {9, 2}, {9, 3}, {9, 4}, {9, 5},
           {9, 6}});
  const int reps = 100000;

  for (std::int32_t node : {0, 9}) {
    const auto n_i0 = complement_size(net, node);
    const std::int64_t size = 2;
    std::map<std::int32_t, int> hits;
    auto s = rng::make_stream(2024, rng::kTagNode, 0, std::uint64_t(node));
    for (int r = 0; r < reps; ++r) {
      const auto sample = sample_uniform(net, node, size, s);
      for (std::int32_t j : sample.sampled_zero) hits[j]++;
    }
    const double p = double(size) / double(n_i0);
    const double se = std::sqrt(p * (1.0 - p) / reps);
    CHECK(std::int64_t(hits.size()) == n_i0);
    for (const auto& [j, count] : hits) {
      (void)j;
      CHECK(std::abs(double(count) / reps - p) < 4.0 * se + 1e-12);
    }
  }
}

TEST_CASE("sample_adaptive: inclusion follows the edge-probability weights") {
  // Node 0 is isolated; its complement is {1..5}.  One hot candidate with
  // inclusion weight 0.9 and four cold ones at 0.1.
  const auto net = SparseNetwork::from_edges(6, {{1, 2}, {3, 4}, {4, 5}});
  ModelConfig cfg;
  cfg.H = 1;
  cfg.link = Link::logit;
  cfg.a0 = Eigen::VectorXd::Zero(1);

  const double hot = std::log(9.0);  // sigmoid(log 9) = 0.9
  FactorState state;
  for (int i = 0; i < 6; ++i) {
    Eigen::VectorXd mu(1);
    mu << (i == 0 ? 1.0 : (i == 1 ? hot : -hot));
    Eigen::MatrixXd Sigma(1, 1);
    Sigma << 0.5;
    state.factors.push_back(GaussianFactor::from_moments(mu, Sigma, i));
  }

  const double total = 0.9 + 4 * 0.1;
  const int reps = 100000;
  int hot_hits = 0;
  auto s = rng::make_stream(31, rng::kTagNode, 0, 0);
  for (int r = 0; r < reps; ++r) {
    const auto sample = sample_adaptive(net, 0, 1, state, cfg, s);
    REQUIRE(sample.sampled_zero.size() == 1);
    const bool is_hot = sample.sampled_zero[0] == 1;
    hot_hits += is_hot;
    // weight = total mass / sampled mass, exactly.
    CHECK(sample.weight ==
          doctest::Approx(total / (is_hot ? 0.9 : 0.1)).epsilon(1e-12));
  }
  const double p = 0.9 / total;
  const double se = std::sqrt(p * (1.0 - p) / reps);
  CHECK(std::abs(double(hot_hits) / reps - p) < 4.0 * se);

  // Size-2 samples: the weight is the total over the sampled pair's mass.
  const auto pair = sample_adaptive(net, 0, 2, state, cfg, s);
  double mass = 0.0;
  for (std::int32_t j : pair.sampled_zero) mass += (j == 1 ? 0.9 : 0.1);
  CHECK(pair.weight == doctest::Approx(total / mass).epsilon(1e-12));

  // Exhaustive adaptive degenerates to the full complement at unit weight.
  const auto full = sample_adaptive(net, 0, 5, state, cfg, s);
  CHECK(full.weight == 1.0);
  CHECK(full.sampled_zero == complement_of(net, 0));
}

TEST_CASE("sample_adaptive: equal means reduce to uniform inclusion") {
  const auto net = SparseNetwork::from_edges(8, {{0, 1}, {0, 2}});
  ModelConfig cfg;
  cfg.H = 2;
  cfg.link = Link::probit;
  cfg.a0 = Eigen::VectorXd::Zero(2);
  FactorState state;
  for (int i = 0; i < 8; ++i) {
    Eigen::VectorXd mu(2);
    mu << 0.4, -0.2;
    state.factors.push_back(
        GaussianFactor::from_moments(mu, Eigen::MatrixXd::Identity(2, 2), i));
  }
  const auto n_i0 = complement_size(net, 0);  // 5
  const int reps = 60000;
  std::map<std::int32_t, int> hits;
  auto s = rng::make_stream(77, rng::kTagNode, 0, 0);
  for (int r = 0; r < reps; ++r)
    for (std::int32_t j : sample_adaptive(net, 0, 2, state, cfg, s).sampled_zero)
      hits[j]++;
  const double p = 2.0 / double(n_i0);
  const double se = std::sqrt(p * (1.0 - p) / reps);
  for (const auto& [j, count] : hits) {
    (void)j;
    CHECK(std::abs(double(count) / reps - p) < 4.0 * se);
  }
}

TEST_CASE("sample_adaptive: vanished weight mass is reported with the node") {
  const auto net = SparseNetwork::from_edges(3, {{0, 1}});
  ModelConfig cfg;
  cfg.H = 1;
  cfg.link = Link::logit;
  cfg.a0 = Eigen::VectorXd::Zero(1);
  FactorState state;
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd mu(1);
    mu << (i == 0 ? 40.0 : -40.0);  // sigmoid(-1600) underflows to zero
    Eigen::MatrixXd Sigma(1, 1);
    Sigma << 1.0;
    state.factors.push_back(GaussianFactor::from_moments(mu, Sigma, i));
  }
  auto s = rng::make_stream(5, rng::kTagNode, 0, 0);
  CHECK_THROWS_WITH_AS(sample_adaptive(net, 0, 1, state, cfg, s),
                       doctest::Contains("node 0"), std::runtime_error);
}

TEST_CASE("gradient estimate is unbiased over all equally-likely subsets") {
  const auto net = SparseNetwork::from_edges(
      6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}, {1, 4}});
  for (Link link : {Link::logit, Link::probit}) {
    ModelConfig cfg = model_for(net, 2, link);
    const auto state = random_state(6, 2, 17);
    for (std::int32_t i = 0; i < 6; ++i) {
      const auto comp = complement_of(net, i);
      const auto c = int(comp.size());
      if (c < 2) continue;
      const std::int64_t k = 2;

      Eigen::VectorXd full_B1;
      Eigen::MatrixXd full_B2;
      const auto full = exhaustive_sample(net, i);
      if (link == Link::logit)
        gradient_estimate_logit(net, i, full, state, cfg, full_B1, full_B2);
      else
        gradient_estimate_probit(net, i, full, state, cfg, full_B1, full_B2);

      Eigen::VectorXd mean_B1 = Eigen::VectorXd::Zero(2);
      Eigen::MatrixXd mean_B2 = Eigen::MatrixXd::Zero(2, 2);
      int count = 0;
      oracles::for_each_subset(c, int(k), [&](const std::vector<int>& idx) {
        StratumSample sub;
        sub.node = i;
        sub.connected = net.neighbors(i);
        for (int t : idx) sub.sampled_zero.push_back(comp[std::size_t(t)]);
        sub.weight = double(c) / double(k);
        Eigen::VectorXd B1;
        Eigen::MatrixXd B2;
        if (link == Link::logit)
          gradient_estimate_logit(net, i, sub, state, cfg, B1, B2);
        else
          gradient_estimate_probit(net, i, sub, state, cfg, B1, B2);
        mean_B1 += B1;
        mean_B2 += B2;
        ++count;
      });
      mean_B1 /= double(count);
      mean_B2 /= double(count);
      CHECK((mean_B1 - full_B1).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((mean_B2 - full_B2).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("exhaustive unit-step node update lands on the exact coordinate "
          "target") {
  const auto net = random_net(15, 0.3, 6);
  for (Link link : {Link::logit, Link::probit}) {
    ModelConfig cfg = model_for(net, 2, link);
    const auto state = random_state(15, 2, 60);
    const auto target = link == Link::logit
                            ? oracles::ref_cavi_step_logit(net, cfg, state)
                            : oracles::ref_cavi_step_probit(net, cfg, state);
    SvilfConfig scfg;
    scfg.rho_override = 1.0;
    for (std::int32_t i = 0; i < 15; ++i) {
      const auto f = svilf_update_node(net, i, 1, exhaustive_sample(net, i),
                                       state, cfg, scfg);
      CHECK((f.lambda1 - target.factors[std::size_t(i)].lambda1)
                .cwiseAbs()
                .maxCoeff() < 1e-12);
      CHECK((f.lambda2 - target.factors[std::size_t(i)].lambda2)
                .cwiseAbs()
                .maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("partial step is the literal natural-parameter blend") {
  const auto net = random_net(12, 0.3, 8);
  ModelConfig cfg = model_for(net, 3, Link::logit);
  const auto state = random_state(12, 3, 80);
  SvilfConfig scfg;
  scfg.rho_override = 0.3;
  const std::int32_t i = 4;
  Eigen::VectorXd B1;
  Eigen::MatrixXd B2;
  gradient_estimate_logit(net, i, exhaustive_sample(net, i), state, cfg, B1,
                          B2);
  const auto f = svilf_update_node(net, i, 1, exhaustive_sample(net, i), state,
                                   cfg, scfg);
  const auto& old = state.factors[std::size_t(i)];
  CHECK((f.lambda1 - (old.lambda1 + 0.3 * B1)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((f.lambda2 - (old.lambda2 + 0.3 * B2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("jacobi + exhaustive + unit step replays the exact coordinate "
          "ascent iterate-for-iterate") {
  const auto net = random_net(30, 0.25, 10);
  for (Link link : {Link::logit, Link::probit}) {
    ModelConfig cfg = model_for(net, 2, link);

    CaviConfig ccfg;
    ccfg.tol = 1e-300;
    ccfg.max_iter = 5;
    ccfg.seed = 42;
    const auto exact = cavi_fit(net, cfg, ccfg);

    SvilfConfig scfg;
    scfg.gamma = kInf;
    scfg.schedule = Schedule::jacobi;
    scfg.rho_override = 1.0;
    scfg.tol = 1e-300;
    scfg.max_iter = 5;
    scfg.seed = 42;
    const auto stoch = svilf_fit(net, cfg, scfg);

    CHECK(oracles::max_abs_param_diff(exact.state, stoch.state) < 1e-12);
    REQUIRE(stoch.delta_trace.size() == exact.delta_trace.size());
    for (std::size_t t = 0; t < exact.delta_trace.size(); ++t)
      CHECK(stoch.delta_trace[t] ==
            doctest::Approx(exact.delta_trace[t]).epsilon(1e-9));
  }
}

TEST_CASE("svilf_fit is bit-deterministic in the seed") {
  const auto net = random_net(25, 0.3, 12);
  ModelConfig cfg = model_for(net, 2, Link::logit);
  SvilfConfig scfg;
  scfg.max_iter = 8;
  scfg.tol = 1e-300;
  scfg.seed = 9001;
  for (Sampling sampling : {Sampling::uniform, Sampling::adaptive}) {
    scfg.sampling = sampling;
    const auto a = svilf_fit(net, cfg, scfg);
    const auto b = svilf_fit(net, cfg, scfg);
    CHECK(oracles::max_abs_param_diff(a.state, b.state) == 0.0);
    CHECK(a.pair_visits == b.pair_visits);
    SvilfConfig other = scfg;
    other.seed = 9002;
    const auto c = svilf_fit(net, cfg, other);
    CHECK(oracles::max_abs_param_diff(a.state, c.state) > 0.0);
  }
}

TEST_CASE("per-iteration dyad visits respect the (1 + gamma) * 2m budget") {
  const auto net = random_net(60, 0.15, 14);
  ModelConfig cfg = model_for(net, 2, Link::logit);
  SvilfConfig scfg;
  scfg.gamma = 2.0;
  scfg.max_iter = 5;
  scfg.tol = 1e-300;
  const auto fit = svilf_fit(net, cfg, scfg);
  const auto budget =
      std::uint64_t((1.0 + scfg.gamma) * 2.0 * double(net.m));
  for (const auto v : fit.pair_visits) CHECK(v <= budget);

  // The exhaustive sentinel visits every ordered pair every iteration.
  scfg.gamma = kInf;
  scfg.max_iter = 2;
  const auto full = svilf_fit(net, cfg, scfg);
  for (const auto v : full.pair_visits)
    CHECK(v == std::uint64_t(net.n) * std::uint64_t(net.n - 1));
}

TEST_CASE("min_zero_sample floors the subsample, observable in the visit "
          "counts") {
  // Star on 6 nodes: the center has a full row (no complement), each leaf
  // has degree 1 and four non-neighbors.
  const auto net = SparseNetwork::from_edges(
      6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  ModelConfig cfg = model_for(net, 2, Link::logit);
  SvilfConfig scfg;
  scfg.gamma = 0.9;  // floor(0.9 * 1) = 0 for every leaf
  scfg.max_iter = 1;
  scfg.tol = 1e-300;

  const auto bare = svilf_fit(net, cfg, scfg);
  CHECK(bare.pair_visits[0] == 10);  // 5 (center row) + 5 leaves * (1 + 0)

  scfg.min_zero_sample = 3;
  const auto floored = svilf_fit(net, cfg, scfg);
  CHECK(floored.pair_visits[0] == 25);  // 5 + 5 leaves * (1 + 3)

  // The floor never exceeds the complement.
  scfg.min_zero_sample = 100;
  const auto capped = svilf_fit(net, cfg, scfg);
  CHECK(capped.pair_visits[0] == 30);  // 5 + 5 leaves * (1 + 4)
}

TEST_CASE("state_bytes tracks storage, not iteration count") {
  const auto net = random_net(40, 0.2, 15);
  ModelConfig cfg = model_for(net, 3, Link::logit);
  SvilfConfig scfg;
  scfg.tol = 1e-300;
  scfg.max_iter = 2;
  const auto short_run = svilf_fit(net, cfg, scfg);
  scfg.max_iter = 9;
  const auto long_run = svilf_fit(net, cfg, scfg);
  CHECK(short_run.state_bytes == long_run.state_bytes);

  scfg.schedule = Schedule::jacobi;
  const auto jac = svilf_fit(net, cfg, scfg);
  CHECK(jac.state_bytes > long_run.state_bytes);
}

TEST_CASE("svilf configuration validation") {
  const auto net = random_net(10, 0.3, 16);
  ModelConfig cfg = model_for(net, 2, Link::logit);
  SvilfConfig bad;
  bad.gamma = 0.0;
  CHECK_THROWS_AS(svilf_fit(net, cfg, bad), std::invalid_argument);
  bad = SvilfConfig{};
  bad.beta = 0.5;
  CHECK_THROWS_AS(svilf_fit(net, cfg, bad), std::invalid_argument);
  bad = SvilfConfig{};
  bad.beta = 1.01;
  CHECK_THROWS_AS(svilf_fit(net, cfg, bad), std::invalid_argument);
  bad = SvilfConfig{};
  bad.alpha = -0.5;
  CHECK_THROWS_AS(svilf_fit(net, cfg, bad), std::invalid_argument);
  bad = SvilfConfig{};
  bad.max_iter = 0;
  CHECK_THROWS_AS(svilf_fit(net, cfg, bad), std::invalid_argument);
  bad = SvilfConfig{};
  bad.rho_override = 0.0;
  CHECK_THROWS_AS(svilf_fit(net, cfg, bad), std::invalid_argument);
  bad = SvilfConfig{};
  bad.rho_override = 1.5;
  CHECK_THROWS_AS(svilf_fit(net, cfg, bad), std::invalid_argument);
  bad = SvilfConfig{};
  bad.min_zero_sample = -1;
  CHECK_THROWS_AS(svilf_fit(net, cfg, bad), std::invalid_argument);
}

TEST_CASE("the exact-ascent fixed point is a fixed point of the exhaustive "
          "unit-step update") {
  // Planted structure at the matching dimension keeps the synchronous
  // sweep contractive down to a deep tolerance.  (Tolerances much below
  // 1e-8 are impractical: the inner-product likelihood is rotation
  // invariant in the factors, leaving a near-unit drift mode that only the
  // prior damps.)
  GeneratorSpec gen;
  gen.scenario = Scenario::s1;
  gen.n = 60;
  gen.seed = 19;
  const auto net = generate(gen);
  ModelConfig cfg = model_for(net, 2, Link::logit);
  CaviConfig ccfg;
  ccfg.tol = 1e-8;
  ccfg.max_iter = 3000;
  ccfg.seed = 5;
  const auto fit = cavi_fit(net, cfg, ccfg);
  REQUIRE(fit.converged);

  // One more exact sweep moves the state by only the residual drift; the
  // exhaustive unit-step stochastic update is the same map, so it must
  // drift no further (up to summation-order noise).
  const auto exact_next = cavi_step(net, cfg, fit.state);
  const double exact_drift =
      oracles::max_abs_param_diff(fit.state, exact_next);

  SvilfConfig scfg;
  scfg.rho_override = 1.0;
  FactorState next = fit.state;
  for (std::int32_t i = 0; i < net.n; ++i)
    next.factors[std::size_t(i)] = svilf_update_node(
        net, i, 1, exhaustive_sample(net, i), fit.state, cfg, scfg);
  const double stochastic_drift =
      oracles::max_abs_param_diff(fit.state, next);
  CHECK(stochastic_drift < exact_drift + 1e-10);
  CHECK(exact_drift < 1e-2);  // the fit really did settle
}

TEST_CASE("stochastic fit recovers structure on a planted factor network") {
  GeneratorSpec gen;
  gen.scenario = Scenario::s1;
  gen.n = 100;
  gen.seed = 23;
  const auto net = generate(gen);
  ModelConfig cfg = model_for(net, 4, Link::logit);
  SvilfConfig scfg;
  scfg.gamma = 2.0;
  scfg.tol = 1e-5;
  scfg.max_iter = 400;
  scfg.seed = 3;
  const auto fit = svilf_fit(net, cfg, scfg);
  CHECK(fit.converged);
  const auto dyads = select_dyads(net, DyadMode::all, 0, 0);
  const double a = auc(score_dyads(net, fit.state, Link::logit, dyads));
  CHECK(a >= 0.80);
}
