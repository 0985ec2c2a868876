#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dpmvar/mcmc.hpp"
#include "parallel.hpp"

namespace dpmvar::mcmc {
namespace {

constexpr double kStickCeiling = 1.0 - 0x1.0p-53;
constexpr double kLocalVarianceFloor = 1e-150;

const LaggedData& data_of(const Context& ctx) { return *ctx.data; }
const PriorConfig& priors_of(const Context& ctx) { return *ctx.priors; }
const ModelConfig& model_of(const Context& ctx) { return *ctx.model; }

MatrixXd spd_inverse(const MatrixXd& m, std::string_view what) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite(std::string(what) + " is not positive definite");
  MatrixXd inv = llt.solve(MatrixXd::Identity(m.rows(), m.cols()));
  return 0.5 * (inv + inv.transpose());
}

MatrixXd inverse_from_chol(const MatrixXd& chol_lower) {
  const Eigen::Index n = chol_lower.rows();
  const MatrixXd linv = chol_lower.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(n, n));
  return linv.transpose() * linv;
}

MixtureComponent draw_prior_component(const PriorConfig& p, const VectorXd& mu0, const VectorXd& b,
                                      RngHandle& rng) {
  const Eigen::Index m = mu0.size();
  const MatrixXd sigma0 = p.sigma0_diag.asDiagonal();
  const MatrixXd precision = draw_cluster_precision(p.c0, sigma0, MatrixXd::Zero(m, m), 0.0, rng);
  VectorXd mu = mu0 + b.cwiseSqrt().cwiseProduct(dist::standard_normal(rng, m));
  return MixtureComponent::make(std::move(mu), spd_inverse(precision, "prior cluster precision"));
}

double draw_prior_stick(int index, const ModelConfig& model, double alpha, RngHandle& rng) {
  if (index == model.max_clusters - 1) return 1.0;
  return std::min(dist::beta(rng, 1.0, alpha), kStickCeiling);
}

VectorXd free_sticks(const SamplerState& s, int max_clusters) {
  const int n = std::min(s.cluster_count(), max_clusters - 1);
  return s.sticks.head(std::max(n, 0));
}

VectorXd omega_row(const SamplerState& s, Eigen::Index t) { return s.log_vol.row(t).transpose().array().exp(); }

}  // namespace

void SweepPlan::validate() const {
  if (n_draws <= 0) throw Error("sweep plan: n_draws must be positive");
  if (thin < 1) throw Error("sweep plan: thin must be >= 1");
  if (n_burn < 0 || n_burn >= n_draws) throw Error("sweep plan: n_burn must lie in [0, n_draws)");
}

// ---- kernels ----

VectorXd draw_regression(const MatrixXd& design, const VectorXd& response, const VectorXd& prior_var,
                         RngHandle& rng) {
  if (!design.allFinite() || !response.allFinite()) throw Error("coefficient step: non-finite whitened design");
  if (design.rows() < design.cols()) return dist::mvn_fast(design, response, prior_var, rng);
  MatrixXd precision = design.transpose() * design;
  precision.diagonal() += prior_var.cwiseInverse();
  return dist::mvn_canonical(precision, design.transpose() * response, rng, "coefficient posterior precision");
}

MatrixXd draw_cluster_precision(double df0, const MatrixXd& sigma0, const MatrixXd& scatter, double n,
                                RngHandle& rng) {
  const MatrixXd inv_scale = sigma0 + scatter;
  return dist::wishart(df0 + n, spd_inverse(inv_scale, "Wishart posterior scale"), rng);
}

VectorXd draw_cluster_mean(const MatrixXd& sigma_inv, const VectorXd& resid_sum, double n, const VectorXd& b,
                           const VectorXd& mu0, RngHandle& rng) {
  MatrixXd precision = n * sigma_inv;
  precision.diagonal() += b.cwiseInverse();
  const VectorXd linear = sigma_inv * resid_sum + mu0.cwiseQuotient(b);
  return dist::mvn_canonical(precision, linear, rng, "cluster mean precision");
}

VectorXd draw_common_location(const VectorXd& mu_sum, int j, const VectorXd& b, double c, RngHandle& rng) {
  const VectorXd precision = static_cast<double>(j) * b.cwiseInverse().array() + c;
  const VectorXd mean = mu_sum.cwiseQuotient(b).cwiseQuotient(precision);
  return mean + precision.cwiseInverse().cwiseSqrt().cwiseProduct(dist::standard_normal(rng, mu_sum.size()));
}

VectorXd draw_standardized_effect(const MatrixXd& q, const VectorXd& omega_diag, const VectorXd& r,
                                  RngHandle& rng) {
  const MatrixXd scaled = omega_diag.cwiseInverse().asDiagonal() * q;  // Omega^-1 Q
  MatrixXd precision = q.transpose() * scaled;
  precision.diagonal().array() += 1.0;
  return dist::mvn_canonical(precision, scaled.transpose() * r, rng, "random-effect precision");
}

dist::GigParams shrinkage_posterior(double c_b, double d_b, int j, double z) {
  return dist::GigParams{c_b - 0.5 * static_cast<double>(j), z, 2.0 * d_b};
}

double draw_homoskedastic_variance(double shape, double scale, double sum_sq, long t, RngHandle& rng) {
  if (!std::isfinite(sum_sq)) throw Error("volatility step: non-finite residuals");
  return dist::inverse_gamma(rng, shape + 0.5 * static_cast<double>(t), scale + 0.5 * sum_sq);
}

VectorXd draw_stick_vector(const std::vector<int>& counts, double alpha, int max_clusters, RngHandle& rng) {
  const auto n = static_cast<Eigen::Index>(counts.size());
  VectorXd nu(n);
  long tail = std::accumulate(counts.begin(), counts.end(), 0L);
  for (Eigen::Index j = 0; j < n; ++j) {
    tail -= counts[static_cast<std::size_t>(j)];
    if (j == max_clusters - 1) {
      nu[j] = 1.0;
    } else {
      nu[j] = std::min(dist::beta(rng, 1.0 + counts[static_cast<std::size_t>(j)], alpha + static_cast<double>(tail)),
                       kStickCeiling);
    }
  }
  return nu;
}

double draw_alpha_conjugate(const VectorXd& free, double shape, double rate, RngHandle& rng) {
  const double log_sum = (1.0 - free.array()).log().sum();
  return dist::gamma(rng, shape + static_cast<double>(free.size()), rate - log_sum);
}

double draw_alpha_metropolis(double current, const VectorXd& free, double shape, double rate, double step,
                             RngHandle& rng) {
  const double log_sum = (1.0 - free.array()).log().sum();
  const double n = static_cast<double>(free.size());
  // Target on log alpha, including the Jacobian.
  auto log_target = [&](double a) { return (shape + n) * std::log(a) - rate * a + (a - 1.0) * log_sum; };
  const double proposal = current * std::exp(step * dist::normal(rng));
  const double log_ratio = log_target(proposal) - log_target(current);
  return std::log(rng.uniform()) < log_ratio ? proposal : current;
}

double slice_level(int k, double decay) { return (1.0 - decay) * std::pow(decay, k); }

int slice_truncation(double u_min, double decay) {
  int j = 1;
  double tail = decay;
  while (tail >= u_min) {
    tail *= decay;
    ++j;
  }
  return j;
}

// ---- steps ----

void draw_var_coefficients(SamplerState& s, const Context& ctx, const RngHandle& rng) {
  const auto& d = data_of(ctx);
  const auto& p = priors_of(ctx);
  const Eigen::Index m = d.dimension();
  const Eigen::Index k = d.regressors();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  if (ctx.options.shuffle_equations) {
    RngHandle shuffle = rng.substream(kStepOrder);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(shuffle() % i)]);
    }
  }
  detail::parallel_for(m, ctx.options.threads, [&](long idx) {
    const Eigen::Index i = order[static_cast<std::size_t>(idx)];
    RngHandle eq = rng.substream(static_cast<std::uint64_t>(i));
    const VectorXd inv_sd = (-0.5 * s.log_vol.col(i).array()).exp();
    const MatrixXd design = inv_sd.asDiagonal() * d.design;
    const VectorXd response = inv_sd.cwiseProduct(d.response.col(i) - s.random_effects.col(i));
    const VectorXd prior_var = p.coef.kind == CoefficientPriorKind::fixed
                                   ? VectorXd::Constant(k, p.coef.fixed_variance)
                                   : VectorXd(s.coef_prior_var.row(i).transpose());
    s.coefficients.row(i) = draw_regression(design, response, prior_var, eq).transpose();
  });
}

void draw_coefficient_prior(SamplerState& s, const Context& ctx, const RngHandle& rng) {
  const auto& c = priors_of(ctx).coef;
  const Eigen::Index m = s.coefficients.rows();
  const Eigen::Index k = s.coefficients.cols();
  if (c.kind == CoefficientPriorKind::fixed) {
    s.coef_prior_var.setConstant(m, k, c.fixed_variance);
    return;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    RngHandle eq = rng.substream(static_cast<std::uint64_t>(i));
    for (Eigen::Index j = 0; j < k; ++j) {
      const double a = s.coefficients(i, j);
      const dist::GigParams g{c.theta - 0.5, a * a, c.theta * s.coef_lambda2[i]};
      s.coef_prior_var(i, j) = std::max(dist::gig(g, eq), kLocalVarianceFloor);
    }
    s.coef_lambda2[i] = dist::gamma(eq, c.lambda_shape + c.theta * static_cast<double>(k),
                                    c.lambda_rate + 0.5 * c.theta * s.coef_prior_var.row(i).sum());
  }
}

void draw_sigma_k(SamplerState& s, const Context& ctx, const RngHandle& rng) {
  const auto& p = priors_of(ctx);
  const Eigen::Index m = s.dimension();
  const MatrixXd sigma0 = p.sigma0_diag.asDiagonal();
  const int j = s.cluster_count();
  std::vector<MatrixXd> scatter(static_cast<std::size_t>(j), MatrixXd::Zero(m, m));
  for (Eigen::Index t = 0; t < s.periods(); ++t) {
    const auto k = static_cast<std::size_t>(s.delta[static_cast<std::size_t>(t)]);
    const VectorXd dev = s.random_effects.row(t).transpose() - s.components[k].mu;
    scatter[k].noalias() += dev * dev.transpose();
  }
  detail::parallel_for(j, ctx.options.threads, [&](long k) {
    auto& comp = s.components[static_cast<std::size_t>(k)];
    RngHandle cl = rng.substream(static_cast<std::uint64_t>(k));
    double n = comp.count;
    if (ctx.options.mutation == Mutation::halved_wishart_df) n *= 0.5;
    const MatrixXd precision = draw_cluster_precision(p.c0, sigma0, scatter[static_cast<std::size_t>(k)], n, cl);
    comp.set_sigma(spd_inverse(precision, "cluster precision"));
  });
}

void draw_mu_k(SamplerState& s, const Context& ctx, const RngHandle& rng) {
  const Eigen::Index m = s.dimension();
  const int j = s.cluster_count();
  std::vector<VectorXd> sums(static_cast<std::size_t>(j), VectorXd::Zero(m));
  for (Eigen::Index t = 0; t < s.periods(); ++t) {
    sums[static_cast<std::size_t>(s.delta[static_cast<std::size_t>(t)])] += s.random_effects.row(t).transpose();
  }
  detail::parallel_for(j, ctx.options.threads, [&](long k) {
    auto& comp = s.components[static_cast<std::size_t>(k)];
    RngHandle cl = rng.substream(static_cast<std::uint64_t>(k));
    comp.mu = draw_cluster_mean(inverse_from_chol(comp.chol_q), sums[static_cast<std::size_t>(k)], comp.count, s.b,
                                s.mu0, cl);
  });
}

void draw_mu0(SamplerState& s, const Context& ctx, const RngHandle& rng) {
  VectorXd total = VectorXd::Zero(s.dimension());
  for (const auto& c : s.components) total += c.mu;
  RngHandle r = rng;
  s.mu0 = draw_common_location(total, s.cluster_count(), s.b, priors_of(ctx).c_mu0, r);
}

void draw_random_effects(SamplerState& s, const Context& ctx, const RngHandle& rng) {
  const auto& d = data_of(ctx);
  const MatrixXd fitted = d.design * s.coefficients.transpose();
  detail::parallel_for(d.periods(), ctx.options.threads, [&](long t) {
    const auto& comp = s.components[static_cast<std::size_t>(s.delta[static_cast<std::size_t>(t)])];
    RngHandle rt = rng.substream(static_cast<std::uint64_t>(t));
    const VectorXd r = d.response.row(t).transpose() - fitted.row(t).transpose() - comp.mu;
    const VectorXd w = draw_standardized_effect(comp.chol_q, omega_row(s, t), r, rt);
    s.w.row(t) = w.transpose();
    s.random_effects.row(t) = (comp.mu + comp.chol_q * w).transpose();
  });
}

void draw_b(SamplerState& s, const Context& ctx, const RngHandle& rng) {
  const auto& p = priors_of(ctx);
  RngHandle r = rng;
  for (Eigen::Index i = 0; i < s.dimension(); ++i) {
    double z = 0.0;
    for (const auto& c : s.components) z += (c.mu[i] - s.mu0[i]) * (c.mu[i] - s.mu0[i]);
    s.b[i] = dist::gig(shrinkage_posterior(p.c_b, p.d_b, s.cluster_count(), z), r);
  }
}

void draw_volatilities(SamplerState& s, const Context& ctx, const RngHandle& rng) {
  const auto& d = data_of(ctx);
  const auto& p = priors_of(ctx);
  const MatrixXd v = residuals(s, d, ResidualKind::idiosyncratic);
  if (!v.allFinite()) throw Error("volatility step: non-finite residuals");
  detail::parallel_for(v.cols(), ctx.options.threads, [&](long j) {
    RngHandle eq = rng.substream(static_cast<std::uint64_t>(j));
    if (model_of(ctx).stochastic_volatility) {
      draw_sv_equation(s.log_vol.col(j), s.sv[static_cast<std::size_t>(j)], v.col(j), p.sv, eq);
    } else {
      const double omega = draw_homoskedastic_variance(p.omega_shape, p.omega_scale, v.col(j).squaredNorm(),
                                                       v.rows(), eq);
      s.log_vol.col(j).setConstant(std::log(omega));
    }
  });
}

void draw_sticks(SamplerState& s, const Context& ctx, const RngHandle& rng) {
  std::vector<int> counts;
  counts.reserve(s.components.size());
  for (const auto& c : s.components) counts.push_back(c.count);
  RngHandle r = rng;
  s.sticks = draw_stick_vector(counts, s.alpha, model_of(ctx).max_clusters, r);
  s.weights = stick_breaking_weights(s.sticks);
}

void draw_indicators(SamplerState& s, const Context& ctx, const RngHandle& rng) {
  const auto& d = data_of(ctx);
  const auto& model = model_of(ctx);
  const auto& p = priors_of(ctx);
  const Eigen::Index t_eff = d.periods();
  const double decay = model.slice_decay;

  RngHandle ru = rng.substream(kStepSlice);
  s.slice_u.resize(t_eff);
  for (Eigen::Index t = 0; t < t_eff; ++t) {
    s.slice_u[t] = slice_level(s.delta[static_cast<std::size_t>(t)], decay) * ru.uniform();
  }
  int needed = slice_truncation(s.slice_u.minCoeff(), decay);
  if (needed > model.max_clusters) {
    if (model.truncation == TruncationPolicy::strict) {
      throw Error("slice sampler needs " + std::to_string(needed) + " clusters but max_clusters is " +
                  std::to_string(model.max_clusters) + "; increase max_clusters");
    }
    needed = model.max_clusters;
  }

  if (needed > s.cluster_count()) {
    RngHandle rn = rng.substream(kStepNewClusters);
    const int old = s.cluster_count();
    s.sticks.conservativeResize(needed);
    for (int k = old; k < needed; ++k) {
      s.components.push_back(draw_prior_component(p, s.mu0, s.b, rn));
      s.sticks[k] = draw_prior_stick(k, model, s.alpha, rn);
    }
    s.weights = stick_breaking_weights(s.sticks);
  }

  const bool marginal = model.indicator_density == IndicatorDensity::marginal;
  const MatrixXd target = marginal ? residuals(s, d, ResidualKind::mixture) : s.random_effects;
  const VectorXd log_w = s.weights.array().log();

  detail::parallel_for(t_eff, ctx.options.threads, [&](long t) {
    RngHandle rt = rng.substream(kStepIndicators, static_cast<std::uint64_t>(t));
    const VectorXd y = target.row(t).transpose();
    const VectorXd omega = marginal ? omega_row(s, t) : VectorXd();
    std::vector<double> logp;
    std::vector<int> index;
    for (int k = 0; k < needed; ++k) {
      const double zeta = slice_level(k, decay);
      if (!(s.slice_u[t] < zeta) || !std::isfinite(log_w[k])) continue;
      const auto& comp = s.components[static_cast<std::size_t>(k)];
      const double dens = marginal ? log_component_density(y, comp, omega) : log_component_density(y, comp);
      logp.push_back(log_w[k] - std::log(zeta) + dens);
      index.push_back(k);
    }
    if (index.empty()) return;  // current label is always admissible unless its weight underflowed
    const double top = *std::max_element(logp.begin(), logp.end());
    double total = 0.0;
    for (double& v : logp) total += (v = std::exp(v - top));
    double pick = rt.uniform() * total;
    std::size_t chosen = 0;
    while (chosen + 1 < logp.size() && (pick -= logp[chosen]) > 0.0) ++chosen;
    s.delta[static_cast<std::size_t>(t)] = index[chosen];
  });

  const int top_label = *std::max_element(s.delta.begin(), s.delta.end());
  if (top_label + 1 < s.cluster_count()) {
    s.components.resize(static_cast<std::size_t>(top_label + 1));
    s.sticks.conservativeResize(top_label + 1);
    s.weights.conservativeResize(top_label + 1);
  }
  s.recount();
  if (marginal) draw_random_effects(s, ctx, rng.substream(kStepRandomEffects));
}

void draw_alpha(SamplerState& s, const Context& ctx, const RngHandle& rng) {
  const auto& p = priors_of(ctx);
  const VectorXd free = free_sticks(s, model_of(ctx).max_clusters);
  RngHandle r = rng;
  if (ctx.options.alpha_update == AlphaUpdate::metropolis) {
    s.alpha = draw_alpha_metropolis(s.alpha, free, p.alpha_shape, p.alpha_rate, ctx.options.alpha_mh_step, r);
  } else {
    s.alpha = draw_alpha_conjugate(free, p.alpha_shape, p.alpha_rate, r);
  }
}

void refresh_standardized_effects(SamplerState& s) {
  for (Eigen::Index t = 0; t < s.periods(); ++t) {
    const auto& comp = s.components[static_cast<std::size_t>(s.delta[static_cast<std::size_t>(t)])];
    const VectorXd dev = s.random_effects.row(t).transpose() - comp.mu;
    s.w.row(t) = comp.chol_q.triangularView<Eigen::Lower>().solve(dev).transpose();
  }
}

void sweep(SamplerState& s, const Context& ctx, const RngHandle& r) {
  draw_var_coefficients(s, ctx, r.substream(kStepCoefficients));
  draw_coefficient_prior(s, ctx, r.substream(kStepCoefficientPrior));
  draw_sigma_k(s, ctx, r.substream(kStepSigma));
  draw_mu_k(s, ctx, r.substream(kStepMu));
  draw_mu0(s, ctx, r.substream(kStepMu0));
  draw_random_effects(s, ctx, r.substream(kStepRandomEffects));
  draw_b(s, ctx, r.substream(kStepShrinkage));
  draw_volatilities(s, ctx, r.substream(kStepVolatility));
  draw_sticks(s, ctx, r.substream(kStepSticks));
  draw_indicators(s, ctx, r.substream(kStepIndicators));
  draw_alpha(s, ctx, r.substream(kStepAlpha));
  refresh_standardized_effects(s);
  s.check_invariants(data_of(ctx).periods());
}

// ---- initial states ----

SamplerState prior_state(const Context& ctx, RngHandle& rng) {
  const auto& d = data_of(ctx);
  const auto& p = priors_of(ctx);
  const auto& model = model_of(ctx);
  const Eigen::Index m = d.dimension();
  const Eigen::Index k = d.regressors();
  const Eigen::Index t_eff = d.periods();
  SamplerState s;

  s.coef_lambda2 = VectorXd::Constant(m, 1.0);
  s.coef_prior_var = MatrixXd::Constant(m, k, p.coef.fixed_variance);
  if (p.coef.kind == CoefficientPriorKind::normal_gamma) {
    for (Eigen::Index i = 0; i < m; ++i) {
      s.coef_lambda2[i] = dist::gamma(rng, p.coef.lambda_shape, p.coef.lambda_rate);
      for (Eigen::Index j = 0; j < k; ++j) {
        s.coef_prior_var(i, j) = std::max(dist::gamma(rng, p.coef.theta, 0.5 * p.coef.theta * s.coef_lambda2[i]),
                                          kLocalVarianceFloor);
      }
    }
  }
  s.coefficients = s.coef_prior_var.cwiseSqrt().cwiseProduct(
      MatrixXd::NullaryExpr(m, k, [&]() { return dist::normal(rng); }));

  s.alpha = dist::gamma(rng, p.alpha_shape, p.alpha_rate);
  s.b.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) s.b[i] = dist::gamma(rng, p.c_b, p.d_b);
  s.mu0 = dist::standard_normal(rng, m) / std::sqrt(p.c_mu0);

  const int j = model.max_clusters;
  s.sticks.resize(j);
  for (int c = 0; c < j; ++c) {
    s.components.push_back(draw_prior_component(p, s.mu0, s.b, rng));
    s.sticks[c] = draw_prior_stick(c, model, s.alpha, rng);
  }
  s.weights = stick_breaking_weights(s.sticks);

  s.delta.resize(static_cast<std::size_t>(t_eff));
  const double total = s.weights.sum();
  for (auto& dt : s.delta) {
    double pick = rng.uniform() * total;
    int c = 0;
    while (c + 1 < j && (pick -= s.weights[c]) > 0.0) ++c;
    dt = c;
  }
  const int top_label = *std::max_element(s.delta.begin(), s.delta.end());
  s.components.resize(static_cast<std::size_t>(top_label + 1));
  s.sticks.conservativeResize(top_label + 1);
  s.weights.conservativeResize(top_label + 1);
  s.recount();

  s.w.resize(t_eff, m);
  s.random_effects.resize(t_eff, m);
  for (Eigen::Index t = 0; t < t_eff; ++t) {
    const auto& comp = s.components[static_cast<std::size_t>(s.delta[static_cast<std::size_t>(t)])];
    const VectorXd w = dist::standard_normal(rng, m);
    s.w.row(t) = w.transpose();
    s.random_effects.row(t) = (comp.mu + comp.chol_q * w).transpose();
  }

  s.log_vol.resize(t_eff, m);
  if (model.stochastic_volatility) {
    s.sv.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      auto& sv = s.sv[static_cast<std::size_t>(i)];
      sv.mu = dist::normal(rng, p.sv.mu_mean, std::sqrt(p.sv.mu_var));
      sv.rho = 2.0 * dist::beta(rng, p.sv.rho_a, p.sv.rho_b) - 1.0;
      sv.sigma2 = dist::gamma(rng, p.sv.sigma2_shape, p.sv.sigma2_rate);
      s.log_vol.col(i) = simulate_sv_path(sv, t_eff, rng);
    }
  } else {
    for (Eigen::Index i = 0; i < m; ++i) {
      s.log_vol.col(i).setConstant(std::log(dist::inverse_gamma(rng, p.omega_shape, p.omega_scale)));
    }
  }
  s.slice_u = VectorXd::Zero(t_eff);
  return s;
}

SamplerState initial_state(const Context& ctx, RngHandle& rng) {
  const auto& d = data_of(ctx);
  const auto& p = priors_of(ctx);
  const auto& model = model_of(ctx);
  const Eigen::Index m = d.dimension();
  const Eigen::Index k = d.regressors();
  const Eigen::Index t_eff = d.periods();
  SamplerState s;

  MatrixXd gram = d.design.transpose() * d.design;
  gram.diagonal().array() += 1.0;
  s.coefficients = gram.llt().solve(d.design.transpose() * d.response).transpose();
  s.coef_prior_var = MatrixXd::Constant(m, k, p.coef.kind == CoefficientPriorKind::fixed ? p.coef.fixed_variance : 1.0);
  s.coef_lambda2 = VectorXd::Ones(m);

  const MatrixXd resid = d.response - d.design * s.coefficients.transpose();
  const VectorXd mean = resid.colwise().mean().transpose();
  const MatrixXd centered = resid.rowwise() - mean.transpose();
  VectorXd var = centered.colwise().squaredNorm().transpose() / static_cast<double>(std::max<Eigen::Index>(t_eff - 1, 1));
  var = var.cwiseMax(1e-8 * std::max(1.0, var.maxCoeff()));

  s.components.push_back(MixtureComponent::make(mean, MatrixXd((0.5 * var).asDiagonal())));
  s.sticks = VectorXd::Constant(1, model.max_clusters == 1 ? 1.0 : 0.5);
  s.weights = stick_breaking_weights(s.sticks);
  s.alpha = p.alpha_shape / p.alpha_rate;
  s.delta.assign(static_cast<std::size_t>(t_eff), 0);
  s.recount();
  s.b = VectorXd::Ones(m);
  s.mu0 = mean;
  s.random_effects = (0.5 * centered).rowwise() + mean.transpose();
  s.w = MatrixXd::Zero(t_eff, m);
  s.slice_u = VectorXd::Zero(t_eff);

  s.log_vol.resize(t_eff, m);
  for (Eigen::Index i = 0; i < m; ++i) s.log_vol.col(i).setConstant(std::log(0.5 * var[i]));
  if (model.stochastic_volatility) {
    s.sv.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) s.sv[static_cast<std::size_t>(i)] = SvParams{std::log(0.5 * var[i]), 0.9, 0.1};
  }
  refresh_standardized_effects(s);
  (void)rng;
  return s;
}

}  // namespace dpmvar::mcmc
