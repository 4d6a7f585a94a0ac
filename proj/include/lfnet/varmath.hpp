// Scalar kernels and Gaussian-factor bookkeeping for the variational
// updates: link functions, the Polya-Gamma mean, the truncated-normal mean,
// and conversion between natural parameters and moments.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "lfnet/network.hpp"

namespace lfnet {

enum class Link { logit, probit };

std::string link_name(Link link);
Link link_from_name(const std::string& name);

struct ModelConfig {
  int H = 4;                 // latent dimension
  Eigen::VectorXd a0;        // prior mean, size H (prior covariance is I)
  Link link = Link::logit;
};

// Inverse link g^{-1}: sigmoid for logit, standard normal CDF for probit.
// Saturates smoothly at the floating-point extremes.
double link_inverse(double x, Link link);

// Forward link g on probabilities in (0,1); throws std::domain_error
// outside the open interval.
double link_forward(double p, Link link);

double norm_pdf(double x);
double norm_cdf(double x);
// Inverse standard normal CDF on (0,1); accurate to ~1e-13.
double norm_quantile(double p);
// phi(x)/Phi(x), stable over the whole double range (deep-tail branch uses
// the Mills-ratio continued fraction).
double inv_mills(double x);

// Mean of a Polya-Gamma PG(1, xi) variable: tanh(xi/2)/(2 xi), with the
// even limit 1/4 at xi = 0.  Requires xi >= 0.
double pg_mean(double xi);

// Mean of N(gamma, 1) truncated to (0, inf) when y = 1 and to (-inf, 0]
// when y = 0.
double tn_mean(double gamma, int y);

struct GaussianFactor {
  Eigen::VectorXd lambda1;  // natural parameter, H
  Eigen::MatrixXd lambda2;  // natural parameter, H x H (so -2*lambda2 is SPD)
  Eigen::VectorXd mu;       // cached mean
  Eigen::MatrixXd Sigma;    // cached covariance
  Eigen::MatrixXd S;        // cached second moment Sigma + mu mu^T

  static GaussianFactor from_natural(Eigen::VectorXd l1, Eigen::MatrixXd l2,
                                     std::int32_t node = -1);
  static GaussianFactor from_moments(Eigen::VectorXd mu, Eigen::MatrixXd Sigma,
                                     std::int32_t node = -1);
};

// Solves mu = (-2 lambda2)^{-1} lambda1, Sigma = (-2 lambda2)^{-1},
// S = Sigma + mu mu^T.  Returns false when -2 lambda2 is not positive
// definite (Cholesky failure).
bool try_natural_to_moments(const Eigen::VectorXd& lambda1,
                            const Eigen::MatrixXd& lambda2, Eigen::VectorXd& mu,
                            Eigen::MatrixXd& Sigma, Eigen::MatrixXd& S);

// Throwing wrapper; names the node in the conditioning error.
void natural_to_moments(const Eigen::VectorXd& lambda1,
                        const Eigen::MatrixXd& lambda2, Eigen::VectorXd& mu,
                        Eigen::MatrixXd& Sigma, Eigen::MatrixXd& S,
                        std::int32_t node = -1);

// Logit-link pair scale: sqrt(vec(Si)^T vec(Sj)) = sqrt(trace(Si Sj)).
double xi_pair(const Eigen::MatrixXd& Si, const Eigen::MatrixXd& Sj);

// Probit-link pair location: mu_i^T mu_j.
double psi_pair(const Eigen::VectorXd& mi, const Eigen::VectorXd& mj);

// Constant prior mean g(density) * 1_H.  Throws std::invalid_argument for
// empty or complete networks (supply an explicit prior mean instead).
Eigen::VectorXd default_prior_mean(const SparseNetwork& net,
                                   const ModelConfig& config);

struct FactorState {
  std::vector<GaussianFactor> factors;
  int iteration = 0;
};

}  // namespace lfnet
