// Auxiliary-mixture sampler for AR(1) log-variances. The log chi-square(1)
// observation density is replaced by a 10-component normal mixture
// (Omori, Chib, Shephard & Nakajima 2007); the path proposal from
// forward-filtering backward-sampling is then corrected with an exact
// Metropolis-Hastings step, so the chain targets the true posterior.

#include <array>
#include <cmath>
#include <limits>

#include "dpmvar/mcmc.hpp"

namespace dpmvar::mcmc {
namespace {

constexpr std::array<double, 10> kProb = {0.00609, 0.04775, 0.13057, 0.20674, 0.22715,
                                          0.18842, 0.12047, 0.05591, 0.01575, 0.00115};
constexpr std::array<double, 10> kMean = {1.92677,  1.34744,  0.73504,  0.02266,  -0.85173,
                                          -1.97278, -3.46788, -5.55246, -8.68384, -14.65};
constexpr std::array<double, 10> kVar = {0.11265, 0.17788, 0.26768, 0.40611, 0.62699,
                                         0.98583, 1.57469, 2.54498, 4.16591, 7.33342};
constexpr double kResidualFloor = 1e-300;

double log_weight(const VectorXd& ystar, const VectorXd& h) {
  double acc = 0.0;
  for (Eigen::Index t = 0; t < h.size(); ++t) {
    const double x = ystar[t] - h[t];
    acc += log_chi2_exact_density(x) - log_chi2_mixture_density(x);
  }
  return acc;
}

VectorXd ffbs(const VectorXd& obs, const VectorXd& obs_var, const SvParams& p, RngHandle& rng) {
  const Eigen::Index n = obs.size();
  VectorXd m(n);
  VectorXd c(n);
  double a = p.mu;
  double r = p.sigma2 / (1.0 - p.rho * p.rho);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double gain = r / (r + obs_var[t]);
    m[t] = a + gain * (obs[t] - a);
    c[t] = (1.0 - gain) * r;
    a = p.mu + p.rho * (m[t] - p.mu);
    r = p.rho * p.rho * c[t] + p.sigma2;
  }
  VectorXd h(n);
  h[n - 1] = m[n - 1] + std::sqrt(c[n - 1]) * dist::normal(rng);
  for (Eigen::Index t = n - 2; t >= 0; --t) {
    const double pred_var = p.rho * p.rho * c[t] + p.sigma2;
    const double g = c[t] * p.rho / pred_var;
    const double mean = m[t] + g * (h[t + 1] - p.mu - p.rho * (m[t] - p.mu));
    const double var = std::max(c[t] - g * g * pred_var, 0.0);
    h[t] = mean + std::sqrt(var) * dist::normal(rng);
  }
  return h;
}

double log_rho_target(double rho, double x0, double sigma2, const SvPrior& prior) {
  return (prior.rho_a - 1.0) * std::log1p(rho) + (prior.rho_b - 1.0) * std::log1p(-rho) +
         dist::log_normal_pdf(x0, 0.0, sigma2 / (1.0 - rho * rho));
}

}  // namespace

double log_chi2_exact_density(double x) { return 0.5 * x - 0.5 * std::exp(x) - 0.5 * kLog2Pi; }

double log_chi2_mixture_density(double x) {
  std::array<double, 10> lp{};
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < 10; ++j) {
    lp[j] = std::log(kProb[j]) + dist::log_normal_pdf(x, kMean[j], kVar[j]);
    top = std::max(top, lp[j]);
  }
  double s = 0.0;
  for (double v : lp) s += std::exp(v - top);
  return top + std::log(s);
}

VectorXd simulate_sv_path(const SvParams& p, Eigen::Index t, RngHandle& rng) {
  VectorXd h(t);
  double prev = p.mu + std::sqrt(p.sigma2 / (1.0 - p.rho * p.rho)) * dist::normal(rng);
  for (Eigen::Index i = 0; i < t; ++i) {
    if (i > 0) prev = p.mu + p.rho * (prev - p.mu) + std::sqrt(p.sigma2) * dist::normal(rng);
    h[i] = prev;
  }
  return h;
}

SvDrawInfo draw_sv_equation(Eigen::Ref<VectorXd> h, SvParams& p, const VectorXd& resid, const SvPrior& prior,
                            RngHandle& rng) {
  const Eigen::Index n = resid.size();
  if (!resid.allFinite()) throw Error("volatility step: non-finite residuals");
  SvDrawInfo info;
  VectorXd ystar(n);
  for (Eigen::Index t = 0; t < n; ++t) ystar[t] = std::log(std::max(resid[t] * resid[t], kResidualFloor));

  // Mixture indicators given the current path.
  VectorXd obs(n);
  VectorXd obs_var(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double x = ystar[t] - h[t];
    std::array<double, 10> lp{};
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < 10; ++j) {
      lp[j] = std::log(kProb[j]) + dist::log_normal_pdf(x, kMean[j], kVar[j]);
      top = std::max(top, lp[j]);
    }
    double total = 0.0;
    for (double& v : lp) total += (v = std::exp(v - top));
    double pick = rng.uniform() * total;
    std::size_t j = 0;
    while (j + 1 < 10 && (pick -= lp[j]) > 0.0) ++j;
    obs[t] = ystar[t] - kMean[j];
    obs_var[t] = kVar[j];
  }

  // Path proposal and exact correction.
  const VectorXd proposal = ffbs(obs, obs_var, p, rng);
  const double log_ratio = log_weight(ystar, proposal) - log_weight(ystar, h);
  if (std::log(rng.uniform()) < log_ratio) {
    h = proposal;
    info.path_accepted = true;
  }

  // Level.
  {
    const double s2 = p.sigma2;
    double precision = 1.0 / prior.mu_var + (1.0 - p.rho * p.rho) / s2;
    double linear = prior.mu_mean / prior.mu_var + (1.0 - p.rho * p.rho) * h[0] / s2;
    for (Eigen::Index t = 1; t < n; ++t) {
      precision += (1.0 - p.rho) * (1.0 - p.rho) / s2;
      linear += (1.0 - p.rho) * (h[t] - p.rho * h[t - 1]) / s2;
    }
    p.mu = linear / precision + dist::normal(rng) / std::sqrt(precision);
  }

  // Persistence: independence proposal from the transition regression.
  {
    const VectorXd x = h.array() - p.mu;
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index t = 1; t < n; ++t) {
      num += x[t] * x[t - 1];
      den += x[t - 1] * x[t - 1];
    }
    if (den > 0.0) {
      const double cand = num / den + std::sqrt(p.sigma2 / den) * dist::normal(rng);
      const double u = rng.uniform();
      if (std::abs(cand) < 1.0) {
        const double lr = log_rho_target(cand, x[0], p.sigma2, prior) - log_rho_target(p.rho, x[0], p.sigma2, prior);
        if (std::log(u) < lr) {
          p.rho = cand;
          info.rho_accepted = true;
        }
      }
    }
  }

  // Innovation variance.
  {
    const VectorXd x = h.array() - p.mu;
    double ss = (1.0 - p.rho * p.rho) * x[0] * x[0];
    for (Eigen::Index t = 1; t < n; ++t) ss += (x[t] - p.rho * x[t - 1]) * (x[t] - p.rho * x[t - 1]);
    const dist::GigParams g{prior.sigma2_shape - 0.5 * static_cast<double>(n), ss, 2.0 * prior.sigma2_rate};
    p.sigma2 = dist::gig(g, rng);
  }
  return info;
}

}  // namespace dpmvar::mcmc
