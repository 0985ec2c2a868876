#pragma once

#include "dpmvar/common.hpp"
#include "dpmvar/model.hpp"

namespace dpmvar {

struct SvPrior {
  double mu_mean = 0.0;
  double mu_var = 10.0;
  double rho_a = 25.0;  // (rho + 1) / 2 ~ Beta(rho_a, rho_b)
  double rho_b = 5.0;
  double sigma2_shape = 0.5;  // sigma2 ~ Gamma(shape, rate)
  double sigma2_rate = 0.5;
};

enum class CoefficientPriorKind {
  normal_gamma,  // a ~ N(0, v), v ~ G(theta, theta lambda2 / 2), lambda2 ~ G(shape, rate)
  fixed,         // a ~ N(0, fixed_variance)
};

struct CoefficientPrior {
  CoefficientPriorKind kind = CoefficientPriorKind::normal_gamma;
  double theta = 0.6;
  double lambda_shape = 0.01;
  double lambda_rate = 0.01;
  double fixed_variance = 1.0;
};

struct PriorConfig {
  double c_b = 0.6;
  double d_b = 0.6;
  double c_mu0 = 1e-3;   // mu_0 ~ N(0, c^-1 I)
  double c0 = 0.0;       // Wishart degrees of freedom
  VectorXd sigma0_diag;  // Sigma_0 diagonal
  double alpha_shape = 2.0;
  double alpha_rate = 4.0;
  SvPrior sv;
  double omega_shape = 1e-3;  // homoskedastic omega_i ~ IG(shape, scale)
  double omega_scale = 1e-3;
  CoefficientPrior coef;

  Eigen::Index dimension() const { return sigma0_diag.size(); }
  void validate() const;
};

PriorConfig default_priors(int m);

// Per-series AR(p)-with-intercept OLS residual variances.
VectorXd estimate_sigma0(const Dataset& data, int lags);

// Prior probability that an observation opens a new cluster given the other T - 1.
double new_cluster_prior_prob(double alpha, long t);

}  // namespace dpmvar
