#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dpmvar/common.hpp"
#include "dpmvar/distributions.hpp"
#include "dpmvar/model.hpp"
#include "dpmvar/priors.hpp"
#include "dpmvar/rng.hpp"

namespace dpmvar::mcmc {

enum class AlphaUpdate { conjugate, metropolis };

// Deliberate defects used to show that the correctness harness has power.
enum class Mutation { none, halved_wishart_df };

struct SamplerOptions {
  AlphaUpdate alpha_update = AlphaUpdate::conjugate;
  double alpha_mh_step = 0.5;  // random-walk sd on log alpha
  Mutation mutation = Mutation::none;
  int threads = 1;
  // Visit the equations of step 1 in a sweep-specific random order.
  bool shuffle_equations = false;
};

struct SweepPlan {
  long n_draws = 20000;
  long n_burn = 10000;
  long thin = 1;
  bool store_latents = false;

  void validate() const;
  long retained() const { return (n_draws - n_burn) / thin; }
  bool keeps(long sweep) const { return sweep >= n_burn && (sweep - n_burn + 1) % thin == 0; }
};

struct Context {
  const LaggedData* data = nullptr;
  const ModelConfig* model = nullptr;
  const PriorConfig* priors = nullptr;
  SamplerOptions options;
};

// Stream tags, one per step, so that adding draws to one block never shifts another.
enum StepTag : std::uint64_t {
  kStepCoefficients = 1,
  kStepCoefficientPrior,
  kStepSigma,
  kStepMu,
  kStepMu0,
  kStepRandomEffects,
  kStepShrinkage,
  kStepVolatility,
  kStepSticks,
  kStepSlice,
  kStepIndicators,
  kStepNewClusters,
  kStepAlpha,
  kStepOrder,
};

// ---- Closed-form kernels (exposed for the conjugacy oracles) ----

// Gaussian regression draw with independent prior variances; chooses the T x T route when T < K.
VectorXd draw_regression(const MatrixXd& design, const VectorXd& response, const VectorXd& prior_var, RngHandle& rng);

// Sigma^-1 | data ~ W(df0 + n, (sigma0 + scatter)^-1).
MatrixXd draw_cluster_precision(double df0, const MatrixXd& sigma0, const MatrixXd& scatter, double n,
                                RngHandle& rng);

// mu | . ~ N(V (n Sigma^-1 mean_resid + B0^-1 mu0), V), V = (n Sigma^-1 + B0^-1)^-1.
VectorXd draw_cluster_mean(const MatrixXd& sigma_inv, const VectorXd& resid_sum, double n, const VectorXd& b,
                           const VectorXd& mu0, RngHandle& rng);

// mu0 | . ~ N(V B0^-1 sum mu_j, V), V = (J B0^-1 + c I)^-1.
VectorXd draw_common_location(const VectorXd& mu_sum, int j, const VectorXd& b, double c, RngHandle& rng);

// w | . with precision I + Q' Omega^-1 Q and linear term Q' Omega^-1 r, r = y - AX - mu.
VectorXd draw_standardized_effect(const MatrixXd& q, const VectorXd& omega_diag, const VectorXd& r, RngHandle& rng);

dist::GigParams shrinkage_posterior(double c_b, double d_b, int j, double z);

// omega | v ~ IG(shape + T/2, scale + sum_sq / 2).
double draw_homoskedastic_variance(double shape, double scale, double sum_sq, long t, RngHandle& rng);

// nu_j ~ Beta(1 + T_j, alpha + sum_{l>j} T_l); the stick at index max_clusters - 1 is fixed at 1.
VectorXd draw_stick_vector(const std::vector<int>& counts, double alpha, int max_clusters, RngHandle& rng);

double draw_alpha_conjugate(const VectorXd& free_sticks, double shape, double rate, RngHandle& rng);
double draw_alpha_metropolis(double current, const VectorXd& free_sticks, double shape, double rate, double step,
                             RngHandle& rng);

// zeta_k = (1 - w) w^k for 0-based k.
double slice_level(int k, double decay);
// Smallest J with decay^J < u_min.
int slice_truncation(double u_min, double decay);

// ---- Gibbs steps on the full state ----
void draw_var_coefficients(SamplerState& s, const Context& ctx, const RngHandle& rng);
void draw_coefficient_prior(SamplerState& s, const Context& ctx, const RngHandle& rng);
void draw_sigma_k(SamplerState& s, const Context& ctx, const RngHandle& rng);
void draw_mu_k(SamplerState& s, const Context& ctx, const RngHandle& rng);
void draw_mu0(SamplerState& s, const Context& ctx, const RngHandle& rng);
void draw_random_effects(SamplerState& s, const Context& ctx, const RngHandle& rng);
void draw_b(SamplerState& s, const Context& ctx, const RngHandle& rng);
void draw_volatilities(SamplerState& s, const Context& ctx, const RngHandle& rng);
void draw_sticks(SamplerState& s, const Context& ctx, const RngHandle& rng);
void draw_indicators(SamplerState& s, const Context& ctx, const RngHandle& rng);
void draw_alpha(SamplerState& s, const Context& ctx, const RngHandle& rng);

// Recompute w_t = Q^-1 (eps_t - mu_delta) after component parameters move.
void refresh_standardized_effects(SamplerState& s);

// A state drawn entirely from the prior (used by the joint-distribution test and as a fallback).
SamplerState prior_state(const Context& ctx, RngHandle& rng);
// Data-informed starting point for estimation.
SamplerState initial_state(const Context& ctx, RngHandle& rng);

// One full sweep of steps 1-10.
void sweep(SamplerState& s, const Context& ctx, const RngHandle& sweep_rng);

// ---- Stochastic volatility (per equation) ----
struct SvDrawInfo {
  bool path_accepted = false;
  bool rho_accepted = false;
};

// Updates the log-variance path h (length T) and its AR(1) parameters given residuals v.
SvDrawInfo draw_sv_equation(Eigen::Ref<VectorXd> h, SvParams& params, const VectorXd& resid, const SvPrior& prior,
                            RngHandle& rng);
// Stationary AR(1) path drawn from its prior.
VectorXd simulate_sv_path(const SvParams& params, Eigen::Index t, RngHandle& rng);
// 10-component normal mixture approximating the log chi-square(1) density.
double log_chi2_mixture_density(double x);
double log_chi2_exact_density(double x);

// ---- Posterior draw storage ----
struct ClusterDraw {
  VectorXd mu;
  MatrixXd sigma;
  int count = 0;
  double weight = 0.0;
  VectorXd omega_bar;  // omega averaged over the periods allocated to the cluster
};

struct PosteriorDraw {
  MatrixXd coefficients;
  std::vector<ClusterDraw> clusters;
  double alpha = 0.0;
  double weight_remainder = 0.0;
  VectorXd mu0;
  VectorXd b;
  int effective_clusters = 0;
  VectorXd log_vol_last;      // log omega at the final sample period
  VectorXd omega_mean;        // omega averaged over the whole sample
  std::vector<SvParams> sv;   // empty when homoskedastic
  std::vector<int> delta;     // when latents are stored
  MatrixXd log_vol;           // when latents are stored
};

struct DrawStore {
  int dimension = 0;
  int lags = 1;
  long periods = 0;  // T_eff
  bool stochastic_volatility = false;
  int max_clusters = 0;
  std::uint64_t seed = 0;
  SweepPlan plan;
  std::string config_hash;
  std::vector<std::string> names;
  double c0 = 0.0;
  VectorXd sigma0_diag;
  MatrixXd history;  // last p observations, for forecasting
  std::vector<PosteriorDraw> draws;

  std::size_t size() const { return draws.size(); }
  std::vector<double> effective_cluster_trace() const;
  void write(const std::string& directory, const std::string& stem = "draws") const;
  static DrawStore read(const std::string& directory, const std::string& stem = "draws");
};

PosteriorDraw snapshot(const SamplerState& s, bool store_latents);

using SweepCallback = std::function<void(long sweep, const SamplerState&)>;

DrawStore run_sweeps(const Dataset& data, const ModelConfig& model, const PriorConfig& priors, const SweepPlan& plan,
                     const RngHandle& rng, const SamplerOptions& options = {}, const SweepCallback& callback = {});

// Stateful wrapper used by harnesses that need sweep-level control.
class Sampler {
 public:
  Sampler(LaggedData data, ModelConfig model, PriorConfig priors, SamplerOptions options, RngHandle rng);

  void sweep();
  SamplerState& state() { return state_; }
  const SamplerState& state() const { return state_; }
  const LaggedData& data() const { return data_; }
  void replace_data(LaggedData data);
  long sweeps_done() const { return sweeps_; }
  Context context() const;

 private:
  LaggedData data_;
  ModelConfig model_;
  PriorConfig priors_;
  SamplerOptions options_;
  RngHandle rng_;
  SamplerState state_;
  long sweeps_ = 0;
};

std::string config_hash(const ModelConfig& model, const PriorConfig& priors, const SweepPlan& plan);

// ---- Joint-distribution (Geweke) test ----
struct GewekeConfig {
  int dimension = 2;
  long periods = 30;  // T_eff
  long iterations = 100000;
  long burn = 1000;
  int batch_count = 50;
  std::uint64_t seed = 1;
};

struct GewekeStatistic {
  std::string name;
  double marginal_mean = 0.0;
  double successive_mean = 0.0;
  double z = 0.0;
};

struct GewekeReport {
  std::vector<GewekeStatistic> statistics;
  double max_abs_z() const;
};

// Proper, moderately informative priors suited to the joint test.
PriorConfig geweke_priors(int m);

GewekeReport geweke_joint_test(const ModelConfig& model, const PriorConfig& priors, const GewekeConfig& cfg,
                               const SamplerOptions& options = {});

}  // namespace dpmvar::mcmc
