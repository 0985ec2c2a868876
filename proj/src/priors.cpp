#include "dpmvar/priors.hpp"

#include <string>

namespace dpmvar {

void PriorConfig::validate() const {
  const auto m = static_cast<double>(sigma0_diag.size());
  if (sigma0_diag.size() == 0) throw Error("priors: sigma0_diag is empty");
  if ((sigma0_diag.array() <= 0.0).any()) throw Error("priors: sigma0_diag entries must be positive");
  if (!(c0 > m - 1.0)) throw Error("priors: Wishart df c0 must exceed M - 1");
  const double positives[] = {c_b, d_b, c_mu0, alpha_shape, alpha_rate, sv.mu_var, sv.rho_a, sv.rho_b,
                              sv.sigma2_shape, sv.sigma2_rate, omega_shape, omega_scale, coef.theta,
                              coef.lambda_shape, coef.lambda_rate, coef.fixed_variance};
  for (double v : positives) {
    if (!(v > 0.0)) throw Error("priors: shapes, rates and scales must be strictly positive");
  }
}

PriorConfig default_priors(int m) {
  if (m < 1) throw Error("default_priors: M must be >= 1");
  PriorConfig p;
  p.c0 = 2.0 * (2.5 + (m - 1) / 2.0);
  p.sigma0_diag = VectorXd::Ones(m);
  return p;
}

VectorXd estimate_sigma0(const Dataset& data, int lags) {
  const Eigen::Index t = data.periods();
  const Eigen::Index m = data.dimension();
  if (t <= 2 * lags + 1) throw Error("estimate_sigma0: need T > 2p + 1 observations per series");
  VectorXd out(m);
  const Eigen::Index t_eff = t - lags;
  for (Eigen::Index j = 0; j < m; ++j) {
    MatrixXd x(t_eff, lags + 1);
    VectorXd y = data.observations.col(j).tail(t_eff);
    x.col(0).setOnes();
    for (int l = 1; l <= lags; ++l) x.col(l) = data.observations.col(j).segment(lags - l, t_eff);
    const std::string name = j < static_cast<Eigen::Index>(data.names.size()) ? data.names[j] : std::to_string(j);
    Eigen::ColPivHouseholderQR<MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < x.cols()) throw Error("estimate_sigma0: rank-deficient AR design for series " + name);
    const VectorXd beta = qr.solve(y);
    const VectorXd e = y - x * beta;
    out[j] = e.squaredNorm() / static_cast<double>(t_eff - lags - 1);
  }
  return out;
}

double new_cluster_prior_prob(double alpha, long t) {
  if (t < 1) throw Error("new_cluster_prior_prob: T must be >= 1");
  if (!(alpha >= 0.0)) throw Error("new_cluster_prior_prob: alpha must be nonnegative");
  if (t == 1) return 1.0;
  return alpha / (static_cast<double>(t) - 1.0 + alpha);
}

}  // namespace dpmvar
