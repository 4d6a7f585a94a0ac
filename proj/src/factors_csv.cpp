#include "lfnet/factors_csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lfnet {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

void write_factors_csv(const FactorState& state, const std::string& path,
                       bool full_cov) {
  if (state.factors.empty())
    throw std::invalid_argument("write_factors_csv: empty state");
  const auto H = static_cast<int>(state.factors.front().mu.size());

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);

  out << "node";
  for (int h = 1; h <= H; ++h) out << ",mu_" << h;
  for (int h = 1; h <= H; ++h) out << ",sd_" << h;
  if (full_cov)
    for (int r = 1; r <= H; ++r)
      for (int c = r; c <= H; ++c) out << ",cov_" << r << "_" << c;
  out << "\n";

  char buf[40];
  for (std::size_t i = 0; i < state.factors.size(); ++i) {
    const auto& f = state.factors[i];
    out << i;
    auto put = [&](double v) {
      const int len = std::snprintf(buf, sizeof buf, ",%.12g", v);
      out.write(buf, len);
    };
    for (int h = 0; h < H; ++h) put(f.mu(h));
    for (int h = 0; h < H; ++h) put(std::sqrt(f.Sigma(h, h)));
    if (full_cov)
      for (int r = 0; r < H; ++r)
        for (int c = r; c < H; ++c) put(f.Sigma(r, c));
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

FactorState read_factors_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open factors file: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("factors file is empty: " + path);
  const auto header = split_csv(line);
  int H = 0;
  while (std::size_t(H + 1) < header.size() &&
         header[std::size_t(H + 1)] == "mu_" + std::to_string(H + 1))
    ++H;
  if (H == 0 || header.size() < std::size_t(1 + 2 * H))
    throw std::runtime_error("factors file header not recognized: " + path);
  const bool full_cov =
      header.size() == std::size_t(1 + 2 * H + H * (H + 1) / 2);
  if (!full_cov && header.size() != std::size_t(1 + 2 * H))
    throw std::runtime_error("factors file has unexpected columns: " + path);

  FactorState state;
  std::int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size())
      throw std::runtime_error("factors file row width mismatch at line " +
                               std::to_string(line_no) + " of " + path);
    auto num = [&](std::size_t k) {
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(fields[k], &used);
      } catch (const std::exception&) {
        throw std::runtime_error("bad number at line " +
                                 std::to_string(line_no) + " of " + path);
      }
      if (used != fields[k].size())
        throw std::runtime_error("bad number at line " +
                                 std::to_string(line_no) + " of " + path);
      return v;
    };
    if (std::int64_t(num(0)) != std::int64_t(state.factors.size()))
      throw std::runtime_error("node ids must be 0..n-1 in order at line " +
                               std::to_string(line_no) + " of " + path);
    Eigen::VectorXd mu(H);
    for (int h = 0; h < H; ++h) mu(h) = num(std::size_t(1 + h));
    Eigen::MatrixXd Sigma(H, H);
    if (full_cov) {
      std::size_t k = std::size_t(1 + 2 * H);
      for (int r = 0; r < H; ++r)
        for (int c = r; c < H; ++c) {
          Sigma(r, c) = num(k++);
          Sigma(c, r) = Sigma(r, c);
        }
    } else {
      Sigma.setZero();
      for (int h = 0; h < H; ++h) {
        const double sd = num(std::size_t(1 + H + h));
        Sigma(h, h) = sd * sd;
      }
    }
    state.factors.push_back(GaussianFactor::from_moments(
        std::move(mu), std::move(Sigma),
        static_cast<std::int32_t>(state.factors.size())));
  }
  if (state.factors.empty())
    throw std::runtime_error("factors file has no rows: " + path);
  return state;
}

}  // namespace lfnet
