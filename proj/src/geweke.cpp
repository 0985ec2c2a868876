#include <cmath>
#include <numeric>

#include "dpmvar/mcmc.hpp"

namespace dpmvar::mcmc {
namespace {

std::vector<std::string> statistic_names(Eigen::Index m, Eigen::Index k, bool sv) {
  std::vector<std::string> n;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const std::string tag = "a[" + std::to_string(i) + "," + std::to_string(j) + "]";
      n.push_back(tag);
      n.push_back(tag + "^2");
    }
  }
  n.push_back("alpha");
  for (Eigen::Index i = 0; i < m; ++i) n.push_back("b[" + std::to_string(i) + "]");
  n.push_back("eta_1");
  n.push_back("tr_sigma_1");
  n.push_back("mu_1[0]");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (sv) {
      n.push_back("sv_mu[" + std::to_string(i) + "]");
      n.push_back("sv_rho[" + std::to_string(i) + "]");
      n.push_back("sv_sigma2[" + std::to_string(i) + "]");
    } else {
      n.push_back("log_omega[" + std::to_string(i) + "]");
    }
  }
  return n;
}

std::vector<double> statistics(const SamplerState& s, bool sv) {
  std::vector<double> v;
  for (Eigen::Index i = 0; i < s.coefficients.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.coefficients.cols(); ++j) {
      v.push_back(s.coefficients(i, j));
      v.push_back(s.coefficients(i, j) * s.coefficients(i, j));
    }
  }
  v.push_back(s.alpha);
  for (Eigen::Index i = 0; i < s.b.size(); ++i) v.push_back(s.b[i]);
  v.push_back(s.weights[0]);
  v.push_back(s.components[0].sigma.trace());
  v.push_back(s.components[0].mu[0]);
  for (Eigen::Index i = 0; i < s.dimension(); ++i) {
    if (sv) {
      const auto& p = s.sv[static_cast<std::size_t>(i)];
      v.push_back(p.mu);
      v.push_back(p.rho);
      v.push_back(p.sigma2);
    } else {
      v.push_back(s.log_vol(0, i));
    }
  }
  return v;
}

// y_t = A X_t + eps_t + v_t from a fixed zero presample.
LaggedData simulate_observations(const SamplerState& s, int lags, RngHandle& rng) {
  const Eigen::Index m = s.dimension();
  const Eigen::Index t_eff = s.periods();
  MatrixXd y = MatrixXd::Zero(t_eff + lags, m);
  for (Eigen::Index t = 0; t < t_eff; ++t) {
    const VectorXd x = lag_vector(y.topRows(t + lags), lags);
    const VectorXd sd = (0.5 * s.log_vol.row(t).transpose().array()).exp();
    y.row(t + lags) = (s.coefficients * x + s.random_effects.row(t).transpose() +
                       sd.cwiseProduct(dist::standard_normal(rng, m)))
                          .transpose();
  }
  return build_lag_matrix(y, lags);
}

double batch_means_se(const std::vector<double>& x, int batches) {
  const auto n = static_cast<long>(x.size());
  const long size = n / batches;
  if (size < 1) throw Error("geweke: too few iterations for the batch count");
  std::vector<double> means(static_cast<std::size_t>(batches));
  for (int b = 0; b < batches; ++b) {
    const auto first = x.begin() + b * size;
    means[static_cast<std::size_t>(b)] = std::accumulate(first, first + size, 0.0) / static_cast<double>(size);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / batches;
  double ss = 0.0;
  for (double mval : means) ss += (mval - grand) * (mval - grand);
  return std::sqrt(ss / (batches - 1) / batches);
}

double iid_se(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0) / n);
}

double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

double GewekeReport::max_abs_z() const {
  double z = 0.0;
  for (const auto& s : statistics) z = std::max(z, std::abs(s.z));
  return z;
}

PriorConfig geweke_priors(int m) {
  PriorConfig p = default_priors(m);
  p.c_mu0 = 1.0;
  p.omega_shape = 3.0;
  p.omega_scale = 2.0;
  p.sv.mu_var = 1.0;
  p.coef.lambda_shape = 100.0;
  p.coef.lambda_rate = 1.0;
  return p;
}

GewekeReport geweke_joint_test(const ModelConfig& model, const PriorConfig& priors, const GewekeConfig& cfg,
                               const SamplerOptions& options) {
  if (cfg.iterations <= 0) throw Error("geweke: insufficient samples (iterations must be positive)");
  if (cfg.batch_count < 2) throw Error("geweke: need at least two batches");
  model.validate();
  priors.validate();
  const Eigen::Index m = cfg.dimension;
  if (priors.dimension() != m) throw Error("geweke: prior dimension does not match");
  const int lags = model.lags;

  LaggedData data = build_lag_matrix(MatrixXd::Zero(cfg.periods + lags, m), lags);
  const bool sv = model.stochastic_volatility;
  const auto names = statistic_names(m, data.regressors(), sv);
  std::vector<std::vector<double>> marginal(names.size()), successive(names.size());
  for (auto& v : marginal) v.reserve(static_cast<std::size_t>(cfg.iterations));
  for (auto& v : successive) v.reserve(static_cast<std::size_t>(cfg.iterations));

  const RngHandle root(cfg.seed, 0x6e77ULL);
  Context ctx{&data, &model, &priors, options};

  for (long i = 0; i < cfg.iterations; ++i) {
    RngHandle r = root.substream(1, static_cast<std::uint64_t>(i));
    const SamplerState s = prior_state(ctx, r);
    const auto st = statistics(s, sv);
    for (std::size_t j = 0; j < st.size(); ++j) marginal[j].push_back(st[j]);
  }

  RngHandle init = root.substream(2);
  SamplerState s = prior_state(ctx, init);
  data = simulate_observations(s, lags, init);
  for (long i = 0; i < cfg.burn + cfg.iterations; ++i) {
    const RngHandle r = root.substream(3, static_cast<std::uint64_t>(i));
    try {
      sweep(s, ctx, r);
    } catch (const Error& e) {
      throw Error("geweke sweep " + std::to_string(i) + ": " + e.what());
    }
    RngHandle ry = r.substream(0xda7aULL);
    data = simulate_observations(s, lags, ry);
    if (i < cfg.burn) continue;
    const auto st = statistics(s, sv);
    for (std::size_t j = 0; j < st.size(); ++j) successive[j].push_back(st[j]);
  }

  GewekeReport report;
  for (std::size_t j = 0; j < names.size(); ++j) {
    GewekeStatistic g;
    g.name = names[j];
    g.marginal_mean = mean_of(marginal[j]);
    g.successive_mean = mean_of(successive[j]);
    const double se = std::hypot(iid_se(marginal[j]), batch_means_se(successive[j], cfg.batch_count));
    g.z = se > 0.0 ? (g.marginal_mean - g.successive_mean) / se : 0.0;
    report.statistics.push_back(g);
  }
  return report;
}

}  // namespace dpmvar::mcmc
