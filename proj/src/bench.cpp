#include "lfnet/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "lfnet/eval.hpp"
#include "lfnet/resource.hpp"
#include "lfnet/rng.hpp"

namespace lfnet {

const char* const kRunRecordHeader =
    "name,n,m,algo,link,sampling,H,gamma,alpha,beta,seed,iterations,"
    "converged,elapsed_seconds,peak_rss_bytes,auc";

namespace {

struct Cell {
  Scenario scenario;
  std::int32_t size;
  std::string algo;
  Link link;
  Sampling sampling;
  int H;
  double gamma;
  int replicate;
};

RunRecord run_cell(const BenchGrid& grid, const Cell& cell) {
  RunRecord rec;
  rec.name = scenario_name(cell.scenario);
  rec.n = cell.size;
  rec.algo = cell.algo;
  rec.link = link_name(cell.link);
  rec.sampling = cell.algo == "cavi" ? "none" : sampling_name(cell.sampling);
  rec.H = cell.H;
  rec.gamma = cell.gamma;
  rec.alpha = grid.alpha;
  rec.beta = grid.beta;
  // Replicate-specific seed derived from the base seed and cell identity.
  auto s = rng::make_stream(grid.base_seed, 0x6265,
                            std::uint64_t(cell.scenario) * 1000003u +
                                std::uint64_t(cell.size),
                            std::uint64_t(cell.replicate));
  rec.seed = s();

  GeneratorSpec gen;
  gen.scenario = cell.scenario;
  gen.n = cell.size;
  gen.seed = rec.seed;
  const SparseNetwork net = generate(gen);
  rec.m = net.m;

  ModelConfig model;
  model.H = cell.H;
  model.link = cell.link;
  model.a0 = default_prior_mean(net, model);

  FitResult fit;
  if (cell.algo == "cavi") {
    CaviConfig cfg;
    cfg.tol = grid.tol;
    cfg.max_iter = grid.max_iter;
    cfg.seed = rec.seed;
    fit = cavi_fit(net, model, cfg);
  } else if (cell.algo == "svilf") {
    SvilfConfig cfg;
    cfg.gamma = cell.gamma;
    cfg.alpha = grid.alpha;
    cfg.beta = grid.beta;
    cfg.sampling = cell.sampling;
    cfg.tol = grid.tol;
    cfg.max_iter = grid.max_iter;
    cfg.seed = rec.seed;
    fit = svilf_fit(net, model, cfg);
  } else {
    throw std::invalid_argument("benchmark: unknown algorithm " + cell.algo);
  }
  rec.iterations = fit.iterations;
  rec.converged = fit.converged;
  rec.elapsed_seconds = fit.elapsed_seconds;
  rec.peak_rss_bytes = peak_rss_bytes();

  const std::int64_t total = std::int64_t(net.n) * (net.n - 1) / 2;
  const DyadMode mode =
      total <= grid.dyad_cap ? DyadMode::all : DyadMode::balanced;
  const auto dyads = select_dyads(net, mode, grid.dyad_cap, rec.seed);
  rec.auc = auc(score_dyads(net, fit.state, cell.link, dyads));
  return rec;
}

}  // namespace

std::vector<RunRecord> run_grid(const BenchGrid& grid) {
  if (grid.replicates < 1)
    throw std::invalid_argument("benchmark: replicates must be positive");

  std::vector<Cell> cells;
  for (const auto scenario : grid.scenarios)
    for (const auto size : grid.sizes)
      for (const auto& algo : grid.algos)
        for (const auto link : grid.links)
          for (std::size_t si = 0; si < grid.samplings.size(); ++si)
            for (const auto H : grid.h_grid)
              for (std::size_t gi = 0; gi < grid.gamma_grid.size(); ++gi) {
                // Sampling and gamma do not affect cavi; keep one cell.
                if (algo == "cavi" && (si > 0 || gi > 0)) continue;
                for (int rep = 0; rep < grid.replicates; ++rep)
                  cells.push_back({scenario, size, algo, link,
                                   grid.samplings[si], H, grid.gamma_grid[gi],
                                   rep});
              }

  std::vector<RunRecord> records(cells.size());
  auto run_one = [&](std::size_t k) {
    try {
      records[k] = run_cell(grid, cells[k]);
    } catch (const std::exception& ex) {
      RunRecord rec;
      rec.name = scenario_name(cells[k].scenario);
      rec.n = cells[k].size;
      rec.algo = cells[k].algo;
      rec.link = link_name(cells[k].link);
      rec.sampling =
          cells[k].algo == "cavi" ? "none" : sampling_name(cells[k].sampling);
      rec.H = cells[k].H;
      rec.gamma = cells[k].gamma;
      rec.alpha = grid.alpha;
      rec.beta = grid.beta;
      rec.converged = false;
      rec.auc = std::nan("");
      records[k] = rec;
      std::fprintf(stderr, "benchmark: cell %zu failed: %s\n", k, ex.what());
    }
  };

  if (!grid.parallel) {
    for (std::size_t k = 0; k < cells.size(); ++k) run_one(k);
    return records;
  }

  const unsigned workers =
      grid.threads > 0 ? unsigned(grid.threads)
                       : std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= cells.size()) return;
        run_one(k);
      }
    });
  }
  for (auto& th : pool) th.join();
  return records;
}

void write_runs_csv(const std::vector<RunRecord>& records,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << kRunRecordHeader << "\n";
  char buf[128];
  for (const auto& r : records) {
    out << r.name << ',' << r.n << ',' << r.m << ',' << r.algo << ','
        << r.link << ',' << r.sampling << ',' << r.H << ',';
    int len = std::snprintf(buf, sizeof buf, "%g,%g,%g,", r.gamma, r.alpha,
                            r.beta);
    out.write(buf, len);
    out << r.seed << ',' << r.iterations << ','
        << (r.converged ? "true" : "false") << ',';
    len = std::snprintf(buf, sizeof buf, "%.6f,%llu,%.6f\n",
                        r.elapsed_seconds,
                        static_cast<unsigned long long>(r.peak_rss_bytes),
                        r.auc);
    out.write(buf, len);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_summary_csv(const std::vector<RunRecord>& records,
                       const std::string& path) {
  using Key = std::tuple<std::string, std::int32_t, std::string, std::string,
                         std::string, int, double>;
  struct Agg {
    int count = 0;
    double t_sum = 0, t_sq = 0, a_sum = 0, a_sq = 0;
    std::uint64_t rss_max = 0;
  };
  std::map<Key, Agg> cells;
  for (const auto& r : records) {
    if (std::isnan(r.auc)) continue;
    auto& a = cells[{r.name, r.n, r.algo, r.link, r.sampling, r.H, r.gamma}];
    ++a.count;
    a.t_sum += r.elapsed_seconds;
    a.t_sq += r.elapsed_seconds * r.elapsed_seconds;
    a.a_sum += r.auc;
    a.a_sq += r.auc * r.auc;
    a.rss_max = std::max(a.rss_max, r.peak_rss_bytes);
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "name,n,algo,link,sampling,H,gamma,replicates,elapsed_mean,"
         "elapsed_sd,auc_mean,auc_sd,peak_rss_max\n";
  char buf[160];
  for (const auto& [key, a] : cells) {
    const double k = a.count;
    const double t_mean = a.t_sum / k;
    const double a_mean = a.a_sum / k;
    const double t_sd =
        a.count > 1 ? std::sqrt(std::max(0.0, (a.t_sq - k * t_mean * t_mean) /
                                                  (k - 1)))
                    : 0.0;
    const double a_sd =
        a.count > 1 ? std::sqrt(std::max(0.0, (a.a_sq - k * a_mean * a_mean) /
                                                  (k - 1)))
                    : 0.0;
    out << std::get<0>(key) << ',' << std::get<1>(key) << ','
        << std::get<2>(key) << ',' << std::get<3>(key) << ','
        << std::get<4>(key) << ',' << std::get<5>(key) << ',';
    const int len = std::snprintf(
        buf, sizeof buf, "%g,%d,%.6f,%.6f,%.6f,%.6f,%llu\n",
        std::get<6>(key), a.count, t_mean, t_sd, a_mean, a_sd,
        static_cast<unsigned long long>(a.rss_max));
    out.write(buf, len);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace lfnet
