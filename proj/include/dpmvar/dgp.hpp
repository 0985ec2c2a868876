#pragma once

#include <string>
#include <vector>

#include "dpmvar/common.hpp"
#include "dpmvar/mcmc.hpp"
#include "dpmvar/model.hpp"
#include "dpmvar/rng.hpp"

namespace dpmvar::dgp {

enum class ShockKind { skew, student_t, common_sv, homoskedastic };

std::string to_string(ShockKind k);
ShockKind shock_kind_from_string(const std::string& s);

struct DgpSpec {
  int dimension = 5;
  long periods = 250;
  ShockKind shock = ShockKind::homoskedastic;
  std::uint64_t seed = 1;
  double shock_scale = 1.0;  // multiplies every shock; 0 gives a noise-free system
  VectorXd initial;          // y_0, zero when empty
  int burn_in = 0;           // discarded periods before the returned sample

  void validate() const;
};

struct TrueParameters {
  MatrixXd coefficients;  // A, M x M
  MatrixXd w;             // shock covariance (scale) matrix W = U U'
  int skew_shape = 0;     // kappa
  VectorXd log_scale;     // common SV path s_t (common_sv only)
  MatrixXd shocks;        // realized eps_t, T x M
};

struct Simulated {
  Dataset data;
  TrueParameters truth;
};

// Diagonal 0.75, off-diagonal N(0, 0.1^2), redrawn until the spectral radius is below one.
MatrixXd simulate_var_coefficients(int m, RngHandle& rng, int max_tries = 10000);
double spectral_radius(const MatrixXd& a);

// Unit lower-triangular U with N(0, 0.1^2) below the diagonal; W = U U'.
MatrixXd simulate_shock_covariance(int m, RngHandle& rng);

Simulated simulate_dataset(const DgpSpec& spec, RngHandle& rng);

// ---- Simulation study ----
struct Estimator {
  std::string name;
  bool dpm = true;  // false: single Gaussian cluster (max_clusters = 1)
  bool stochastic_volatility = false;
};

std::vector<Estimator> default_estimators();

struct StudyConfig {
  std::vector<int> sizes = {5};
  std::vector<ShockKind> kinds = {ShockKind::homoskedastic};
  std::vector<Estimator> estimators = default_estimators();
  int replications = 10;
  int lags = 5;
  long periods = 250;
  mcmc::SweepPlan plan{4000, 2000, 1, false};
  int max_clusters = 30;
  IndicatorDensity indicator_density = IndicatorDensity::conditional;
  double shock_scale = 1.0;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct StudyCell {
  int size = 0;
  ShockKind kind = ShockKind::homoskedastic;
  std::string estimator;
  double mae = 0.0;                 // mean over replications
  double effective_clusters = 0.0;  // mean over replications of the posterior median
  std::vector<double> replication_mae;
  std::vector<double> replication_clusters;
};

// MAE between the true coefficients (zero beyond the first lag) and the posterior median.
double coefficient_mae(const mcmc::DrawStore& store, const MatrixXd& true_a);
double median(std::vector<double> v);

std::vector<StudyCell> run_simulation_study(const StudyConfig& cfg);
void write_study_csv(const std::vector<StudyCell>& cells, const std::string& path);

}  // namespace dpmvar::dgp
