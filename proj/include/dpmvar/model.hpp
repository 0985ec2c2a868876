#pragma once

#include <string>
#include <vector>

#include "dpmvar/common.hpp"

namespace dpmvar {

struct Dataset {
  MatrixXd observations;  // T x M, time-major
  std::vector<std::string> names;
  std::string frequency = "quarterly";
  std::vector<std::string> dates;

  Eigen::Index periods() const { return observations.rows(); }
  Eigen::Index dimension() const { return observations.cols(); }
  void validate(int lags) const;
};

// How the indicator step scores each cluster.
enum class IndicatorDensity {
  conditional,  // N(y - AX - v | mu_k, Sigma_k), the random effect treated as observed
  marginal,     // N(y - AX | mu_k, Sigma_k + Omega_t), random effect redrawn afterwards
};

// What happens when the slice variables ask for more clusters than max_clusters.
enum class TruncationPolicy {
  truncate,  // finite stick-breaking with the last stick fixed at one
  strict,    // abort and ask for a larger cap
};

struct ModelConfig {
  int lags = 1;
  bool stochastic_volatility = false;
  int max_clusters = 30;
  double slice_decay = 0.8;
  IndicatorDensity indicator_density = IndicatorDensity::conditional;
  TruncationPolicy truncation = TruncationPolicy::truncate;

  void validate() const;
};

struct MixtureComponent {
  VectorXd mu;
  MatrixXd sigma;
  MatrixXd chol_q;  // lower Cholesky factor of sigma
  int count = 0;

  static MixtureComponent make(VectorXd mu, MatrixXd sigma);
  void set_sigma(MatrixXd s);
};

struct SvParams {
  double mu = 0.0;
  double rho = 0.9;
  double sigma2 = 0.1;
};

// Regression arrays for an effective sample starting at t = p + 1.
struct LaggedData {
  MatrixXd response;  // T_eff x M
  MatrixXd design;    // T_eff x K, row t = (y'_{t-1}, ..., y'_{t-p})
  int lags = 1;

  Eigen::Index periods() const { return response.rows(); }
  Eigen::Index dimension() const { return response.cols(); }
  Eigen::Index regressors() const { return design.cols(); }
};

LaggedData build_lag_matrix(const Dataset& data, int lags);
LaggedData build_lag_matrix(const MatrixXd& observations, int lags);
// Lag stack (y'_t, ..., y'_{t-p+1}) formed from the last p rows of `history`.
VectorXd lag_vector(const MatrixXd& history, int lags);

struct SamplerState {
  MatrixXd coefficients;     // A, M x K; no intercept column
  MatrixXd coef_prior_var;   // Normal-Gamma local variances, M x K
  VectorXd coef_lambda2;     // equation-level Normal-Gamma scales, M
  std::vector<MixtureComponent> components;
  VectorXd sticks;           // nu_j for the instantiated components
  VectorXd weights;          // eta_j
  double alpha = 0.5;
  std::vector<int> delta;    // 0-based cluster index per period
  VectorXd slice_u;
  MatrixXd random_effects;   // eps_t = mu_delta + Q_delta w_t, T x M
  MatrixXd w;                // standardized random effects, T x M
  VectorXd b;                // diagonal of B_0
  VectorXd mu0;
  MatrixXd log_vol;          // log omega_it, T x M (constant columns when homoskedastic)
  std::vector<SvParams> sv;  // per equation, used when stochastic volatility is on

  Eigen::Index periods() const { return random_effects.rows(); }
  Eigen::Index dimension() const { return coefficients.rows(); }
  int cluster_count() const { return static_cast<int>(components.size()); }
  double weight_remainder() const;
  int effective_clusters() const;
  void recount();
  void check_invariants(Eigen::Index t_eff) const;
};

// eta_1 = nu_1, eta_j = nu_j prod_{i<j} (1 - nu_i).
VectorXd stick_breaking_weights(const VectorXd& sticks);

enum class ResidualKind {
  mixture,        // y_t - A X_t
  idiosyncratic,  // y_t - A X_t - mu_delta - Q_delta w_t
  equation,       // y_t - mu_delta - Q_delta w_t, the response of the coefficient step
};

MatrixXd residuals(const SamplerState& state, const LaggedData& data, ResidualKind kind);

struct CovarianceView {
  MatrixXd xi;         // Sigma_delta + Omega_t
  VectorXd omega_diag;
};

CovarianceView assemble_covariance(const SamplerState& state, Eigen::Index t);

// log N(y_resid | mu, Sigma + diag(omega)).
double log_component_density(const VectorXd& y_resid, const MixtureComponent& comp,
                             const VectorXd& omega_diag);
// log N(y_resid | mu, Sigma) reusing the stored Cholesky factor.
double log_component_density(const VectorXd& y_resid, const MixtureComponent& comp);

}  // namespace dpmvar
