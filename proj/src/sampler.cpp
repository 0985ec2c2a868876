#include <algorithm>
#include <cstdio>
#include "json.hpp"

#include "dpmvar/mcmc.hpp"

namespace dpmvar::mcmc {

std::vector<double> DrawStore::effective_cluster_trace() const {
  std::vector<double> g;
  g.reserve(draws.size());
  for (const auto& d : draws) g.push_back(d.effective_clusters);
  return g;
}

PosteriorDraw snapshot(const SamplerState& s, bool store_latents) {
  PosteriorDraw d;
  d.coefficients = s.coefficients;
  d.alpha = s.alpha;
  d.weight_remainder = s.weight_remainder();
  d.mu0 = s.mu0;
  d.b = s.b;
  d.effective_clusters = s.effective_clusters();
  const Eigen::Index t_eff = s.periods();
  const MatrixXd omega = s.log_vol.array().exp();
  d.log_vol_last = s.log_vol.row(t_eff - 1).transpose();
  d.omega_mean = omega.colwise().mean().transpose();
  d.sv = s.sv;

  std::vector<VectorXd> omega_sum(s.components.size(), VectorXd::Zero(s.dimension()));
  for (Eigen::Index t = 0; t < t_eff; ++t) {
    omega_sum[static_cast<std::size_t>(s.delta[static_cast<std::size_t>(t)])] += omega.row(t).transpose();
  }
  d.clusters.reserve(s.components.size());
  for (std::size_t k = 0; k < s.components.size(); ++k) {
    const auto& c = s.components[k];
    ClusterDraw cd;
    cd.mu = c.mu;
    cd.sigma = c.sigma;
    cd.count = c.count;
    cd.weight = s.weights[static_cast<Eigen::Index>(k)];
    cd.omega_bar = c.count > 0 ? VectorXd(omega_sum[k] / c.count) : d.omega_mean;
    d.clusters.push_back(std::move(cd));
  }
  if (store_latents) {
    d.delta = s.delta;
    d.log_vol = s.log_vol;
  }
  return d;
}

std::string config_hash(const ModelConfig& model, const PriorConfig& p, const SweepPlan& plan) {
  nlohmann::json j;
  j["model"] = {{"lags", model.lags},
                {"sv", model.stochastic_volatility},
                {"max_clusters", model.max_clusters},
                {"slice_decay", model.slice_decay},
                {"marginal_indicators", model.indicator_density == IndicatorDensity::marginal},
                {"strict_truncation", model.truncation == TruncationPolicy::strict}};
  j["priors"] = {{"c_b", p.c_b},
                 {"d_b", p.d_b},
                 {"c_mu0", p.c_mu0},
                 {"c0", p.c0},
                 {"sigma0", std::vector<double>(p.sigma0_diag.data(), p.sigma0_diag.data() + p.sigma0_diag.size())},
                 {"alpha", {p.alpha_shape, p.alpha_rate}},
                 {"sv", {p.sv.mu_mean, p.sv.mu_var, p.sv.rho_a, p.sv.rho_b, p.sv.sigma2_shape, p.sv.sigma2_rate}},
                 {"omega", {p.omega_shape, p.omega_scale}},
                 {"coef",
                  {static_cast<int>(p.coef.kind), p.coef.theta, p.coef.lambda_shape, p.coef.lambda_rate,
                   p.coef.fixed_variance}}};
  j["plan"] = {plan.n_draws, plan.n_burn, plan.thin, plan.store_latents};
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Sampler::Sampler(LaggedData data, ModelConfig model, PriorConfig priors, SamplerOptions options, RngHandle rng)
    : data_(std::move(data)), model_(model), priors_(std::move(priors)), options_(options), rng_(rng) {
  model_.validate();
  priors_.validate();
  if (priors_.dimension() != data_.dimension()) throw Error("sampler: prior dimension does not match the data");
  RngHandle init = rng_.substream(0xfeedULL);
  const Context ctx = context();
  state_ = initial_state(ctx, init);
}

Context Sampler::context() const { return Context{&data_, &model_, &priors_, options_}; }

void Sampler::sweep() {
  const Context ctx = context();
  try {
    mcmc::sweep(state_, ctx, rng_.substream(static_cast<std::uint64_t>(sweeps_)));
  } catch (const Error& e) {
    throw Error("sweep " + std::to_string(sweeps_) + ": " + e.what());
  }
  ++sweeps_;
}

void Sampler::replace_data(LaggedData data) {
  if (data.dimension() != data_.dimension() || data.periods() != data_.periods()) {
    throw Error("sampler: replacement data must keep the dimensions");
  }
  data_ = std::move(data);
}

DrawStore run_sweeps(const Dataset& data, const ModelConfig& model, const PriorConfig& priors, const SweepPlan& plan,
                     const RngHandle& rng, const SamplerOptions& options, const SweepCallback& callback) {
  plan.validate();
  data.validate(model.lags);
  Sampler sampler(build_lag_matrix(data, model.lags), model, priors, options, rng);

  DrawStore store;
  store.dimension = static_cast<int>(data.dimension());
  store.lags = model.lags;
  store.periods = sampler.data().periods();
  store.stochastic_volatility = model.stochastic_volatility;
  store.max_clusters = model.max_clusters;
  store.seed = rng.seed();
  store.plan = plan;
  store.config_hash = config_hash(model, priors, plan);
  store.names = data.names;
  store.c0 = priors.c0;
  store.sigma0_diag = priors.sigma0_diag;
  store.history = data.observations.bottomRows(model.lags);
  store.draws.reserve(static_cast<std::size_t>(plan.retained()));

  for (long i = 0; i < plan.n_draws; ++i) {
    sampler.sweep();
    if (callback) callback(i, sampler.state());
    if (plan.keeps(i)) store.draws.push_back(snapshot(sampler.state(), plan.store_latents));
  }
  return store;
}

}  // namespace dpmvar::mcmc
