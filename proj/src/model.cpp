#include "dpmvar/model.hpp"

#include <cmath>

#include "dpmvar/distributions.hpp"

namespace dpmvar {

void Dataset::validate(int lags) const {
  if (static_cast<Eigen::Index>(names.size()) != observations.cols()) {
    throw Error("dataset: " + std::to_string(names.size()) + " names for " +
                std::to_string(observations.cols()) + " columns");
  }
  if (!observations.allFinite()) throw Error("dataset: observations contain missing or non-finite values");
  if (observations.rows() <= lags) {
    throw Error("dataset: T=" + std::to_string(observations.rows()) + " must exceed the lag order " +
                std::to_string(lags));
  }
}

void ModelConfig::validate() const {
  if (lags < 1) throw Error("model config: lags must be >= 1");
  if (max_clusters < 1) throw Error("model config: max_clusters must be >= 1");
  if (!(slice_decay > 0.0 && slice_decay < 1.0)) throw Error("model config: slice_decay must lie in (0, 1)");
}

MixtureComponent MixtureComponent::make(VectorXd mu, MatrixXd sigma) {
  MixtureComponent c;
  c.mu = std::move(mu);
  c.set_sigma(std::move(sigma));
  return c;
}

void MixtureComponent::set_sigma(MatrixXd s) {
  sigma = 0.5 * (s + s.transpose());
  chol_q = dist::cholesky_lower(sigma, "cluster covariance");
}

LaggedData build_lag_matrix(const MatrixXd& y, int lags) {
  const Eigen::Index t = y.rows();
  const Eigen::Index m = y.cols();
  if (lags < 1) throw Error("build_lag_matrix: lags must be >= 1");
  if (t <= lags) {
    throw Error("build_lag_matrix: T=" + std::to_string(t) + " must exceed the lag order " + std::to_string(lags));
  }
  LaggedData out;
  out.lags = lags;
  const Eigen::Index t_eff = t - lags;
  out.response = y.bottomRows(t_eff);
  out.design.resize(t_eff, m * lags);
  for (Eigen::Index r = 0; r < t_eff; ++r) {
    for (int l = 1; l <= lags; ++l) {
      out.design.block(r, (l - 1) * m, 1, m) = y.row(r + lags - l);
    }
  }
  return out;
}

LaggedData build_lag_matrix(const Dataset& data, int lags) { return build_lag_matrix(data.observations, lags); }

VectorXd lag_vector(const MatrixXd& history, int lags) {
  const Eigen::Index m = history.cols();
  if (history.rows() < lags) throw Error("lag_vector: history shorter than the lag order");
  VectorXd x(m * lags);
  for (int l = 1; l <= lags; ++l) x.segment((l - 1) * m, m) = history.row(history.rows() - l).transpose();
  return x;
}

VectorXd stick_breaking_weights(const VectorXd& sticks) {
  VectorXd eta(sticks.size());
  double remaining = 1.0;
  for (Eigen::Index j = 0; j < sticks.size(); ++j) {
    eta[j] = sticks[j] * remaining;
    remaining *= (1.0 - sticks[j]);
  }
  return eta;
}

double SamplerState::weight_remainder() const { return std::max(0.0, 1.0 - weights.sum()); }

int SamplerState::effective_clusters() const {
  int g = 0;
  for (const auto& c : components) g += c.count > 0 ? 1 : 0;
  return g;
}

void SamplerState::recount() {
  for (auto& c : components) c.count = 0;
  for (int d : delta) components[static_cast<std::size_t>(d)].count += 1;
}

void SamplerState::check_invariants(Eigen::Index t_eff) const {
  int total = 0;
  for (const auto& c : components) {
    if (c.count < 0) throw Error("state invariant: negative cluster count");
    total += c.count;
  }
  if (total != t_eff) throw Error("state invariant: cluster counts do not sum to T_eff");
  for (int d : delta) {
    if (d < 0 || d >= cluster_count()) throw Error("state invariant: indicator outside the instantiated clusters");
  }
  if ((weights.array() < 0.0).any() || weights.sum() > 1.0 + 1e-12) throw Error("state invariant: invalid weights");
  if (!(alpha > 0.0)) throw Error("state invariant: alpha must be positive");
  if ((b.array() <= 0.0).any()) throw Error("state invariant: shrinkage scales must be positive");
  for (const auto& p : sv) {
    if (!(std::abs(p.rho) < 1.0)) throw Error("state invariant: |rho| must be < 1");
  }
}

MatrixXd residuals(const SamplerState& state, const LaggedData& data, ResidualKind kind) {
  const Eigen::Index t_eff = data.periods();
  if (state.coefficients.rows() != data.dimension() || state.coefficients.cols() != data.regressors()) {
    throw Error("residuals: coefficient matrix does not match the data dimensions");
  }
  if (kind == ResidualKind::mixture) return data.response - data.design * state.coefficients.transpose();
  if (state.random_effects.rows() != t_eff || state.random_effects.cols() != data.dimension()) {
    throw Error("residuals: random effects do not match the data dimensions");
  }
  if (kind == ResidualKind::equation) return data.response - state.random_effects;
  return data.response - data.design * state.coefficients.transpose() - state.random_effects;
}

CovarianceView assemble_covariance(const SamplerState& state, Eigen::Index t) {
  if (t < 0 || t >= state.log_vol.rows()) throw Error("assemble_covariance: time index out of range");
  const auto& comp = state.components.at(static_cast<std::size_t>(state.delta.at(static_cast<std::size_t>(t))));
  CovarianceView view;
  view.omega_diag = state.log_vol.row(t).transpose().array().exp();
  view.xi = comp.sigma;
  view.xi.diagonal() += view.omega_diag;
  return view;
}

double log_component_density(const VectorXd& y_resid, const MixtureComponent& comp, const VectorXd& omega_diag) {
  MatrixXd cov = comp.sigma;
  cov.diagonal() += omega_diag;
  return dist::log_mvn_pdf(y_resid, comp.mu, cov);
}

double log_component_density(const VectorXd& y_resid, const MixtureComponent& comp) {
  return dist::log_mvn_pdf_chol(y_resid, comp.mu, comp.chol_q);
}

}  // namespace dpmvar
