// CSV persistence for fitted factors.
//
// Layout: node,mu_1..mu_H,sd_1..sd_H and, with full_cov, the upper triangle
// of Sigma appended row-major as cov_r_c columns.  Values carry 12
// significant digits.
#pragma once

#include <string>

#include "lfnet/varmath.hpp"

namespace lfnet {

void write_factors_csv(const FactorState& state, const std::string& path,
                       bool full_cov = false);

// Rebuilds a state from the CSV: means exact to the printed digits; the
// covariance is diagonal sd^2 unless the file carries cov columns.
FactorState read_factors_csv(const std::string& path);

}  // namespace lfnet
