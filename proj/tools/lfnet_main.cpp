// lfnet: latent factor network embedding tool.
//
//   lfnet generate   draw a synthetic network and write its edge list
//   lfnet fit        fit factors by coordinate ascent or stochastic updates
//   lfnet evaluate   in-sample AUC / ROC from a factors file
//   lfnet benchmark  run a timing/accuracy grid and write run records
//
// Exit codes: 0 success, 2 usage error, 1 runtime failure.
#include <CLI11.hpp>
#include <cstdio>
#include <json.hpp>
#include <optional>
#include <string>

#include "lfnet/bench.hpp"
#include "lfnet/cavi.hpp"
#include "lfnet/eval.hpp"
#include "lfnet/factors_csv.hpp"
#include "lfnet/network.hpp"
#include "lfnet/svilf.hpp"

namespace {

using nlohmann::json;

struct GenerateArgs {
  std::string scenario = "s1";
  std::int32_t n = 0;
  std::uint64_t seed = 1;
  std::string out;
  double s1_sd = 3.0;
  int s1_dim = 2;
  double s3_within = 0.6;
  double s3_between = 0.2;
};

int cmd_generate(const GenerateArgs& args) {
  lfnet::GeneratorSpec spec;
  spec.scenario = lfnet::scenario_from_name(args.scenario);
  spec.n = args.n;
  spec.seed = args.seed;
  spec.s1_sd = args.s1_sd;
  spec.s1_dim = args.s1_dim;
  spec.s3_within = args.s3_within;
  spec.s3_between = args.s3_between;
  const auto net = lfnet::generate(spec);
  lfnet::write_edge_list(net, args.out);
  json summary = {{"n", net.n}, {"m", net.m}, {"density", lfnet::density(net)}};
  std::printf("%s\n", summary.dump().c_str());
  return 0;
}

struct FitArgs {
  std::string input;
  bool remap = false;
  std::string algo = "svilf";
  std::string link = "logit";
  int H = 4;
  std::optional<double> a0;
  double gamma = 2.0;
  double alpha = 1.0;
  double beta = 0.75;
  std::string sampling = "uniform";
  std::string schedule = "gauss_seidel";
  double tol = 1e-5;
  std::optional<int> max_iter;
  std::uint64_t seed = 1;
  std::string out;
  bool full_cov = false;
  std::optional<double> rho;
  bool exhaustive = false;
};

int cmd_fit(const FitArgs& args) {
  const auto net = lfnet::read_edge_list(args.input, args.remap);

  lfnet::ModelConfig model;
  model.H = args.H;
  model.link = lfnet::link_from_name(args.link);
  model.a0 = args.a0 ? Eigen::VectorXd::Constant(args.H, *args.a0)
                     : lfnet::default_prior_mean(net, model);

  lfnet::FitResult fit;
  if (args.algo == "cavi") {
    lfnet::CaviConfig cfg;
    cfg.tol = args.tol;
    cfg.max_iter = args.max_iter.value_or(1000);
    cfg.seed = args.seed;
    fit = lfnet::cavi_fit(net, model, cfg);
  } else if (args.algo == "svilf") {
    lfnet::SvilfConfig cfg;
    cfg.gamma = args.exhaustive
                    ? std::numeric_limits<double>::infinity()
                    : args.gamma;
    cfg.alpha = args.alpha;
    cfg.beta = args.beta;
    cfg.sampling = lfnet::sampling_from_name(args.sampling);
    cfg.schedule = lfnet::schedule_from_name(args.schedule);
    cfg.tol = args.tol;
    cfg.max_iter = args.max_iter.value_or(500);
    cfg.seed = args.seed;
    cfg.rho_override = args.rho;
    fit = lfnet::svilf_fit(net, model, cfg);
  } else {
    throw std::invalid_argument("unknown algorithm: " + args.algo);
  }

  lfnet::write_factors_csv(fit.state, args.out, args.full_cov);
  json summary = {{"iterations", fit.iterations},
                  {"converged", fit.converged},
                  {"elapsed_seconds", fit.elapsed_seconds},
                  {"final_delta",
                   fit.delta_trace.empty() ? 0.0 : fit.delta_trace.back()}};
  std::printf("%s\n", summary.dump().c_str());
  return 0;
}

struct EvaluateArgs {
  std::string input;
  bool remap = false;
  std::string factors;
  std::string link = "logit";
  std::string dyads = "auto";
  std::int64_t dyad_cap = 4498500;
  std::uint64_t seed = 1;
  std::string roc_out;
};

int cmd_evaluate(const EvaluateArgs& args) {
  const auto net = lfnet::read_edge_list(args.input, args.remap);
  const auto state = lfnet::read_factors_csv(args.factors);
  if (static_cast<std::int32_t>(state.factors.size()) != net.n) {
    throw std::runtime_error(
        "factors file has " + std::to_string(state.factors.size()) +
        " rows but the network has " + std::to_string(net.n) + " nodes");
  }

  lfnet::DyadMode mode;
  if (args.dyads == "all") {
    mode = lfnet::DyadMode::all;
  } else if (args.dyads == "balanced") {
    mode = lfnet::DyadMode::balanced;
  } else if (args.dyads == "auto") {
    const std::int64_t total = std::int64_t(net.n) * (net.n - 1) / 2;
    mode = total <= args.dyad_cap ? lfnet::DyadMode::all
                                  : lfnet::DyadMode::balanced;
  } else {
    throw std::invalid_argument("unknown dyad mode: " + args.dyads);
  }

  const auto link = lfnet::link_from_name(args.link);
  const auto dyads = lfnet::select_dyads(net, mode, args.dyad_cap, args.seed);
  const auto set = lfnet::score_dyads(net, state, link, dyads);
  std::printf("%.4f\n", lfnet::auc(set));
  if (!args.roc_out.empty())
    lfnet::write_roc_csv(lfnet::roc_points(set), args.roc_out);
  return 0;
}

struct BenchmarkArgs {
  std::vector<std::string> scenarios = {"s1", "s2", "s3"};
  std::vector<std::int32_t> sizes = {100, 200, 300, 500, 1000};
  int replicates = 10;
  std::vector<std::string> algos = {"svilf"};
  std::vector<std::string> links = {"logit"};
  std::vector<std::string> samplings = {"uniform"};
  std::vector<int> h_grid = {4};
  std::vector<double> gamma_grid = {2.0};
  double alpha = 1.0;
  double beta = 0.75;
  double tol = 1e-5;
  int max_iter = 500;
  std::uint64_t seed = 1;
  std::string out;
  std::string summary_out;
  bool parallel = false;
  int threads = 0;
};

int cmd_benchmark(const BenchmarkArgs& args) {
  lfnet::BenchGrid grid;
  grid.scenarios.clear();
  for (const auto& s : args.scenarios)
    grid.scenarios.push_back(lfnet::scenario_from_name(s));
  grid.sizes = args.sizes;
  grid.replicates = args.replicates;
  grid.algos = args.algos;
  grid.links.clear();
  for (const auto& l : args.links) grid.links.push_back(lfnet::link_from_name(l));
  grid.samplings.clear();
  for (const auto& s : args.samplings)
    grid.samplings.push_back(lfnet::sampling_from_name(s));
  grid.h_grid = args.h_grid;
  grid.gamma_grid = args.gamma_grid;
  grid.alpha = args.alpha;
  grid.beta = args.beta;
  grid.tol = args.tol;
  grid.max_iter = args.max_iter;
  grid.base_seed = args.seed;
  grid.parallel = args.parallel;
  grid.threads = args.threads;

  if (args.parallel)
    std::fprintf(stderr,
                 "benchmark: --parallel shares cores across cells; "
                 "elapsed timings are contended\n");
  const auto records = lfnet::run_grid(grid);
  lfnet::write_runs_csv(records, args.out);
  if (!args.summary_out.empty())
    lfnet::write_summary_csv(records, args.summary_out);
  json summary = {{"runs", records.size()}, {"out", args.out}};
  std::printf("%s\n", summary.dump().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latent factor network embedding"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* cgen = app.add_subcommand("generate", "draw a synthetic network");
  cgen->add_option("--scenario", gen.scenario, "s1, s2, or s3")
      ->check(CLI::IsMember({"s1", "s2", "s3"}));
  cgen->add_option("--n", gen.n, "number of nodes")->required();
  cgen->add_option("--seed", gen.seed, "generator seed");
  cgen->add_option("--out", gen.out, "edge list output path")->required();
  cgen->add_option("--s1-sd", gen.s1_sd, "s1 latent standard deviation");
  cgen->add_option("--s1-dim", gen.s1_dim, "s1 latent dimension");
  cgen->add_option("--s3-within", gen.s3_within, "s3 within-block probability");
  cgen->add_option("--s3-between", gen.s3_between,
                   "s3 between-block probability");

  FitArgs fit;
  auto* cfit = app.add_subcommand("fit", "fit latent factors");
  cfit->add_option("--input", fit.input, "edge list path")->required();
  cfit->add_flag("--remap", fit.remap, "renumber vertex ids by first appearance");
  cfit->add_option("--algo", fit.algo, "cavi or svilf")
      ->check(CLI::IsMember({"cavi", "svilf"}));
  cfit->add_option("--link", fit.link, "logit or probit")
      ->check(CLI::IsMember({"logit", "probit"}));
  cfit->add_option("--H", fit.H, "latent dimension");
  cfit->add_option("--a0", fit.a0,
                   "constant prior mean (default: link of density)");
  cfit->add_option("--gamma", fit.gamma, "non-neighbor budget multiplier");
  cfit->add_flag("--exhaustive", fit.exhaustive,
                 "use the whole complement instead of a subsample");
  cfit->add_option("--alpha", fit.alpha, "step-size offset");
  cfit->add_option("--beta", fit.beta, "step-size decay exponent");
  cfit->add_option("--sampling", fit.sampling, "uniform or adaptive")
      ->check(CLI::IsMember({"uniform", "adaptive"}));
  cfit->add_option("--schedule", fit.schedule, "gauss_seidel or jacobi")
      ->check(CLI::IsMember({"gauss_seidel", "gs", "jacobi"}));
  cfit->add_option("--tol", fit.tol, "convergence tolerance");
  cfit->add_option("--max-iter", fit.max_iter,
                   "iteration cap (default 500 svilf, 1000 cavi)");
  cfit->add_option("--seed", fit.seed, "fit seed");
  cfit->add_option("--rho", fit.rho, "constant step size (testing)");
  cfit->add_option("--out", fit.out, "factors CSV output path")->required();
  cfit->add_flag("--full-cov", fit.full_cov,
                 "append upper-triangle covariance columns");

  EvaluateArgs ev;
  auto* cev = app.add_subcommand("evaluate", "in-sample AUC / ROC");
  cev->add_option("--input", ev.input, "edge list path")->required();
  cev->add_flag("--remap", ev.remap, "renumber vertex ids by first appearance");
  cev->add_option("--factors", ev.factors, "factors CSV path")->required();
  cev->add_option("--link", ev.link, "logit or probit")
      ->check(CLI::IsMember({"logit", "probit"}));
  cev->add_option("--dyads", ev.dyads, "all, balanced, or auto")
      ->check(CLI::IsMember({"all", "balanced", "auto"}));
  cev->add_option("--dyad-cap", ev.dyad_cap, "all-mode dyad limit");
  cev->add_option("--seed", ev.seed, "balanced-mode sampling seed");
  cev->add_option("--roc-out", ev.roc_out, "ROC CSV output path");

  BenchmarkArgs bm;
  auto* cbm = app.add_subcommand("benchmark", "run a benchmark grid");
  cbm->add_option("--scenarios", bm.scenarios, "subset of {s1,s2,s3}")
      ->delimiter(',');
  cbm->add_option("--sizes", bm.sizes, "network sizes")->delimiter(',');
  cbm->add_option("--replicates", bm.replicates, "replicates per cell");
  cbm->add_option("--algos", bm.algos, "subset of {cavi,svilf}")
      ->delimiter(',');
  cbm->add_option("--links", bm.links, "subset of {logit,probit}")
      ->delimiter(',');
  cbm->add_option("--sampling", bm.samplings, "subset of {uniform,adaptive}")
      ->delimiter(',');
  cbm->add_option("--H-grid", bm.h_grid, "latent dimensions")->delimiter(',');
  cbm->add_option("--gamma-grid", bm.gamma_grid, "gamma values")
      ->delimiter(',');
  cbm->add_option("--alpha", bm.alpha, "step-size offset");
  cbm->add_option("--beta", bm.beta, "step-size decay exponent");
  cbm->add_option("--tol", bm.tol, "convergence tolerance");
  cbm->add_option("--max-iter", bm.max_iter, "iteration cap");
  cbm->add_option("--seed", bm.seed, "base seed");
  cbm->add_option("--out", bm.out, "run records CSV path")->required();
  cbm->add_option("--summary-out", bm.summary_out, "per-cell summary CSV path");
  cbm->add_flag("--parallel", bm.parallel, "run cells concurrently");
  cbm->add_option("--threads", bm.threads, "worker count for --parallel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cgen->parsed()) return cmd_generate(gen);
    if (cfit->parsed()) return cmd_fit(fit);
    if (cev->parsed()) return cmd_evaluate(ev);
    if (cbm->parsed()) return cmd_benchmark(bm);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 2;
}
