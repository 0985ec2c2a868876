#pragma once

#include <string>
#include <vector>

#include "dpmvar/common.hpp"
#include "dpmvar/mcmc.hpp"

namespace dpmvar::structural {

enum class ShockScale {
  one_sd,  // impact = Cholesky column
  unit,    // Cholesky column divided by its own-variable entry
};

enum class OmegaChoice {
  cluster_average,  // omega averaged over the periods allocated to the cluster
  posterior_mean,   // omega averaged over the whole sample
};

struct IrfOptions {
  int shock = 0;     // index of the shocked variable
  int horizons = 20; // responses at 0..horizons
  ShockScale scale = ShockScale::one_sd;
  OmegaChoice omega = OmegaChoice::cluster_average;
};

// Companion matrix of A (M x Mp).
MatrixXd companion(const MatrixXd& a, int lags);

// Propagates an impact vector through the VAR; row h is the response at horizon h.
MatrixXd propagate(const MatrixXd& a, int lags, const VectorXd& impact, int horizons);

// Lower Cholesky factor of Sigma_k + diag(omega_bar).
MatrixXd impact_matrix(const mcmc::PosteriorDraw& draw, int cluster, OmegaChoice omega);

MatrixXd irf_per_cluster(const mcmc::PosteriorDraw& draw, int lags, int cluster, const IrfOptions& options);

// Convex combination of the live clusters' IRFs using `weights` (per label), renormalized.
MatrixXd irf_weighted(const mcmc::PosteriorDraw& draw, int lags, const std::vector<double>& weights,
                      const IrfOptions& options);

// Posterior mean of eta per label; labels missing from a draw count as zero.
std::vector<double> posterior_mean_weights(const mcmc::DrawStore& store);

// Clusters sorted by descending occupancy, ties by ascending log det Sigma.
mcmc::PosteriorDraw relabel(const mcmc::PosteriorDraw& draw);
mcmc::DrawStore relabel_clusters(const mcmc::DrawStore& store);

struct Band {
  MatrixXd lower;   // 16th percentile
  MatrixXd median;
  MatrixXd upper;   // 84th percentile
  long draws = 0;   // number of draws contributing
};

struct IrfResult {
  IrfOptions options;
  std::vector<std::vector<MatrixXd>> responses;  // [draw][label]; empty matrix when the label is not live
  std::vector<MatrixXd> weighted;                // [draw]
  std::vector<double> weights;                   // per label
  Band weighted_band;
  std::vector<Band> cluster_bands;               // per label
};

// Relabels the store, then computes per-cluster and weighted IRFs for every draw.
IrfResult compute_irfs(const mcmc::DrawStore& store, const IrfOptions& options, int threads = 1);

Band percentile_band(const std::vector<MatrixXd>& samples);

double log_det_spd(const MatrixXd& m);
// Trailing moving average; the first window - 1 entries average what is available.
std::vector<double> rolling_mean(const std::vector<double>& x, int window);

struct BoxSummary {
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
  long n = 0;
};

struct ClusterDiagnostics {
  MatrixXd probability;  // T x labels, posterior probability of each label per period
  MatrixXd rolling;      // same with a trailing moving average
  std::vector<std::vector<double>> log_det;  // per label, posterior draws of log det Sigma_k (live clusters)
  std::vector<BoxSummary> log_det_summary;
};

// Needs draws stored with latents (indicators). The store should already be relabeled.
ClusterDiagnostics cluster_diagnostics(const mcmc::DrawStore& store, int window = 4);

void write_irf_csv(const IrfResult& r, const std::vector<std::string>& names, const std::string& path);
void write_diagnostics_csv(const ClusterDiagnostics& d, const std::string& probability_path,
                           const std::string& log_det_path);

}  // namespace dpmvar::structural
