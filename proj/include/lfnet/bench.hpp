// Benchmark harness: runs a (scenario x size x algorithm x link x sampling
// x H x gamma) grid with replicates, recording runtime, memory, and
// in-sample AUC per run.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lfnet/network.hpp"
#include "lfnet/svilf.hpp"

namespace lfnet {

struct RunRecord {
  std::string name;       // scenario or dataset name
  std::int32_t n = 0;
  std::int64_t m = 0;
  std::string algo;       // "cavi" or "svilf"
  std::string link;       // "logit" or "probit"
  std::string sampling;   // "uniform", "adaptive", or "none" for cavi
  int H = 0;
  double gamma = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  int iterations = 0;
  bool converged = false;
  double elapsed_seconds = 0.0;
  std::uint64_t peak_rss_bytes = 0;
  double auc = 0.0;
};

struct BenchGrid {
  std::vector<Scenario> scenarios = {Scenario::s1, Scenario::s2, Scenario::s3};
  std::vector<std::int32_t> sizes = {100, 200, 300, 500, 1000};
  int replicates = 10;
  std::vector<std::string> algos = {"svilf"};
  std::vector<Link> links = {Link::logit};
  std::vector<Sampling> samplings = {Sampling::uniform};
  std::vector<int> h_grid = {4};
  std::vector<double> gamma_grid = {2.0};
  double alpha = 1.0;
  double beta = 0.75;
  double tol = 1e-5;
  int max_iter = 500;
  std::uint64_t base_seed = 1;
  std::int64_t dyad_cap = 4498500;  // all-dyads evaluation limit
  bool parallel = false;
  int threads = 0;  // 0 = hardware concurrency
};

// Runs every cell; a failed run is recorded with converged = false and the
// grid continues.  Record order is deterministic regardless of `parallel`.
std::vector<RunRecord> run_grid(const BenchGrid& grid);

extern const char* const kRunRecordHeader;

void write_runs_csv(const std::vector<RunRecord>& records,
                    const std::string& path);

// Per-cell mean/sd aggregation over replicates.
void write_summary_csv(const std::vector<RunRecord>& records,
                       const std::string& path);

}  // namespace lfnet
