#pragma once

#include <string>
#include <vector>

#include "dpmvar/common.hpp"
#include "dpmvar/mcmc.hpp"
#include "dpmvar/model.hpp"
#include "dpmvar/rng.hpp"

namespace dpmvar::forecast {

// Gaussian mixture sum_k weight_k N(mean_k, cov_k).
struct GaussianMixture {
  std::vector<double> weights;
  std::vector<VectorXd> means;
  std::vector<MatrixXd> covariances;

  std::size_t size() const { return weights.size(); }
  VectorXd mean() const;
  MatrixXd covariance() const;
  // Mixture restricted to the listed coordinates.
  GaussianMixture marginal(const std::vector<int>& index) const;
  double log_density(const VectorXd& y) const;
};

struct PredictivePath {
  MatrixXd path;              // h x M simulated y_{T+1..T+h}
  GaussianMixture terminal;   // exact density of y_{T+h} given the simulated path up to T+h-1
  bool rejected = false;      // the path overflowed
};

struct PredictiveOptions {
  int horizon = 1;
  int paths_per_draw = 1;
  // Paths whose absolute value exceeds this are flagged as explosive.
  double overflow_limit = 1e12;
};

// `history` holds at least the last p observations, oldest first. The component standing in for the
// unassigned stick mass is drawn from `component_rng` when given, so that paths sharing a draw share it.
PredictivePath predictive_simulate(const mcmc::PosteriorDraw& draw, const mcmc::DrawStore& meta, const MatrixXd& history,
                                   int horizon, RngHandle& rng, double overflow_limit = 1e12,
                                   const RngHandle* component_rng = nullptr);

struct ForecastResult {
  int horizon = 1;
  std::vector<std::string> names;
  std::vector<PredictivePath> paths;  // accepted paths
  long rejected = 0;

  // Draws of y_{T+h} for one variable across accepted paths.
  std::vector<double> terminal_sample(int variable) const;
  // Rao-Blackwellized predictive mean of y_{T+h}.
  VectorXd point_forecast() const;
  // log of the path-averaged terminal density on the listed coordinates.
  double log_predictive(const VectorXd& realized, const std::vector<int>& index) const;
};

ForecastResult predict(const mcmc::DrawStore& store, const MatrixXd& history, const PredictiveOptions& options,
                       const RngHandle& rng, int threads = 1);

// ---- scoring primitives ----
double pinball_loss(double realized, double quantile_forecast, double level);
// Linear-interpolation empirical quantile (order statistics at (n-1) q).
double empirical_quantile(std::vector<double> sample, double level);
// log of the average of exp(values), computed stably.
double log_mean_exp(const std::vector<double>& values);

struct Scores {
  std::vector<double> squared_error;  // per focus variable
  std::vector<double> lpl;            // univariate, per focus variable
  double lpl_joint = 0.0;             // joint over the focus variables
  std::vector<double> qs10;
  std::vector<double> qs90;
};

Scores score_forecasts(const ForecastResult& result, const VectorXd& realized, const std::vector<int>& focus);

// ---- rolling evaluation ----
struct ModelSpec {
  std::string name;
  ModelConfig model;
};

struct RollingConfig {
  long first_origin = 0;          // number of observations in the first training window
  std::vector<int> horizons = {1, 4};
  std::vector<int> focus;         // variable indices; empty means all
  mcmc::SweepPlan plan{2000, 1000, 1, false};
  std::string benchmark;          // model name; defaults to the first model
  int paths_per_draw = 1;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct OriginScore {
  long origin = 0;  // index of the first forecast target period
  std::string model;
  int horizon = 1;
  Scores scores;
};

struct RelativeRow {
  std::string model;
  int horizon = 1;
  std::string variable;  // focus variable name, or "joint" for the joint LPL
  double mse_ratio = 1.0;
  double qs10_ratio = 1.0;
  double qs90_ratio = 1.0;
  double lpl_difference = 0.0;
};

struct RollingResult {
  std::vector<std::string> focus_names;
  std::vector<OriginScore> origins;
  std::vector<RelativeRow> relative;
  std::string benchmark;
};

RollingResult rolling_evaluation(const Dataset& data, const std::vector<ModelSpec>& models, const RollingConfig& cfg);

// Mean of a score over origins for one model and horizon.
double average_joint_lpl(const RollingResult& r, const std::string& model, int horizon);
// Running sum of joint-LPL differences against the benchmark, ordered by origin.
std::vector<double> cumulative_lpl_difference(const RollingResult& r, const std::string& model, int horizon);

void write_origin_csv(const RollingResult& r, const std::string& path);
void write_relative_csv(const RollingResult& r, const std::string& path);
void write_cumulative_csv(const RollingResult& r, const std::string& path);
void write_paths_csv(const ForecastResult& f, const std::string& path);

}  // namespace dpmvar::forecast
