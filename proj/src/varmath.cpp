#include "lfnet/varmath.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lfnet {

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2*pi)

}  // namespace

std::string link_name(Link link) {
  return link == Link::logit ? "logit" : "probit";
}

Link link_from_name(const std::string& name) {
  if (name == "logit") return Link::logit;
  if (name == "probit") return Link::probit;
  throw std::invalid_argument("unknown link: " + name);
}

double link_inverse(double x, Link link) {
  if (link == Link::probit) return norm_cdf(x);
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double link_forward(double p, Link link) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("link_forward: probability must lie in (0,1)");
  if (link == Link::probit) return norm_quantile(p);
  return std::log(p / (1.0 - p));
}

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("norm_quantile: argument must lie in (0,1)");
  // Acklam's rational approximation followed by one Halley refinement.
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley step against the erfc-based CDF.
  const double e = norm_cdf(x) - p;
  const double u = e / norm_pdf(x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double inv_mills(double x) {
  if (x > -12.0) return norm_pdf(x) / norm_cdf(x);
  // Deep lower tail: Laplace's continued fraction for the Mills ratio,
  //   Phi(-t)/phi(t) = 1/(t + 1/(t + 2/(t + 3/(...)))) with t = -x,
  // so phi(x)/Phi(x) = t + 1/(t + 2/(t + 3/(...))).
  const double t = -x;
  double f = 0.0;
  for (int k = 40; k >= 1; --k) f = double(k) / (t + f);
  return t + f;
}

double pg_mean(double xi) {
  if (xi < 0.0) throw std::domain_error("pg_mean: xi must be nonnegative");
  if (xi < 1e-6) return 0.25 - xi * xi / 48.0;  // even series about 0
  return std::tanh(0.5 * xi) / (2.0 * xi);
}

double tn_mean(double gamma, int y) {
  if (y != 0 && y != 1) throw std::domain_error("tn_mean: y must be 0 or 1");
  if (y == 1) return gamma + inv_mills(gamma);
  return gamma - inv_mills(-gamma);
}

bool try_natural_to_moments(const Eigen::VectorXd& lambda1,
                            const Eigen::MatrixXd& lambda2, Eigen::VectorXd& mu,
                            Eigen::MatrixXd& Sigma, Eigen::MatrixXd& S) {
  const Eigen::MatrixXd precision = -2.0 * lambda2;
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) return false;
  const auto H = lambda1.size();
  Sigma = llt.solve(Eigen::MatrixXd::Identity(H, H));
  mu = llt.solve(lambda1);
  S = Sigma + mu * mu.transpose();
  return true;
}

void natural_to_moments(const Eigen::VectorXd& lambda1,
                        const Eigen::MatrixXd& lambda2, Eigen::VectorXd& mu,
                        Eigen::MatrixXd& Sigma, Eigen::MatrixXd& S,
                        std::int32_t node) {
  if (!try_natural_to_moments(lambda1, lambda2, mu, Sigma, S)) {
    throw std::runtime_error(
        "natural_to_moments: precision not positive definite at node " +
        std::to_string(node));
  }
}

GaussianFactor GaussianFactor::from_natural(Eigen::VectorXd l1,
                                            Eigen::MatrixXd l2,
                                            std::int32_t node) {
  GaussianFactor f;
  f.lambda1 = std::move(l1);
  f.lambda2 = std::move(l2);
  natural_to_moments(f.lambda1, f.lambda2, f.mu, f.Sigma, f.S, node);
  return f;
}

GaussianFactor GaussianFactor::from_moments(Eigen::VectorXd mu,
                                            Eigen::MatrixXd Sigma,
                                            std::int32_t node) {
  GaussianFactor f;
  f.mu = std::move(mu);
  f.Sigma = std::move(Sigma);
  Eigen::LLT<Eigen::MatrixXd> llt(f.Sigma);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(
        "from_moments: covariance not positive definite at node " +
        std::to_string(node));
  }
  const auto H = f.mu.size();
  const Eigen::MatrixXd precision = llt.solve(Eigen::MatrixXd::Identity(H, H));
  f.lambda1 = precision * f.mu;
  f.lambda2 = -0.5 * precision;
  f.S = f.Sigma + f.mu * f.mu.transpose();
  return f;
}

double xi_pair(const Eigen::MatrixXd& Si, const Eigen::MatrixXd& Sj) {
  const double s = (Si.array() * Sj.array()).sum();
  if (s < 0.0)
    throw std::runtime_error("xi_pair: negative second-moment product");
  return std::sqrt(s);
}

double psi_pair(const Eigen::VectorXd& mi, const Eigen::VectorXd& mj) {
  return mi.dot(mj);
}

Eigen::VectorXd default_prior_mean(const SparseNetwork& net,
                                   const ModelConfig& config) {
  const double d = density(net);
  if (!(d > 0.0 && d < 1.0)) {
    throw std::invalid_argument(
        "default_prior_mean: network density is degenerate (" +
        std::to_string(d) + "); supply an explicit prior mean");
  }
  return Eigen::VectorXd::Constant(config.H, link_forward(d, config.link));
}

}  // namespace lfnet
