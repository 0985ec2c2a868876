#include "dpmvar/dgp.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "dpmvar/distributions.hpp"

namespace dpmvar::dgp {

std::string to_string(ShockKind k) {
  switch (k) {
    case ShockKind::skew: return "skew";
    case ShockKind::student_t: return "student_t";
    case ShockKind::common_sv: return "common_sv";
    case ShockKind::homoskedastic: return "homoskedastic";
  }
  return "unknown";
}

ShockKind shock_kind_from_string(const std::string& s) {
  if (s == "skew") return ShockKind::skew;
  if (s == "student_t" || s == "t") return ShockKind::student_t;
  if (s == "common_sv" || s == "sv") return ShockKind::common_sv;
  if (s == "homoskedastic" || s == "gaussian") return ShockKind::homoskedastic;
  throw Error("unknown shock kind '" + s + "' (expected skew, student_t, common_sv or homoskedastic)");
}

void DgpSpec::validate() const {
  if (dimension < 1) throw Error("dgp: dimension must be >= 1");
  if (periods < 2) throw Error("dgp: need at least two periods");
  if (!(shock_scale >= 0.0)) throw Error("dgp: shock_scale must be nonnegative");
  if (initial.size() != 0 && initial.size() != dimension) throw Error("dgp: initial state has the wrong length");
  if (burn_in < 0) throw Error("dgp: burn_in must be nonnegative");
}

double spectral_radius(const MatrixXd& a) {
  Eigen::EigenSolver<MatrixXd> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

MatrixXd simulate_var_coefficients(int m, RngHandle& rng, int max_tries) {
  if (m < 1) throw Error("simulate_var_coefficients: M must be >= 1");
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    MatrixXd a(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) a(i, j) = i == j ? 0.75 : dist::normal(rng, 0.0, 0.1);
    }
    if (spectral_radius(a) < 1.0) return a;
  }
  throw Error("simulate_var_coefficients: no stable draw within " + std::to_string(max_tries) + " tries");
}

MatrixXd simulate_shock_covariance(int m, RngHandle& rng) {
  MatrixXd u = MatrixXd::Identity(m, m);
  for (int i = 1; i < m; ++i) {
    for (int j = 0; j < i; ++j) u(i, j) = dist::normal(rng, 0.0, 0.1);
  }
  return u * u.transpose();
}

Simulated simulate_dataset(const DgpSpec& spec, RngHandle& rng) {
  spec.validate();
  const int m = spec.dimension;
  // The conditional-mean parameters come from their own stream so every shock law shares them.
  RngHandle mean_rng = rng.substream(1);
  RngHandle shock_rng = rng.substream(2);

  Simulated out;
  auto& truth = out.truth;
  truth.coefficients = simulate_var_coefficients(m, mean_rng);
  truth.w = simulate_shock_covariance(m, mean_rng);
  truth.skew_shape = static_cast<int>(std::lround(dist::normal(shock_rng, 0.0, 3.0)));

  const long total = spec.periods + spec.burn_in;
  const MatrixXd w_chol = dist::cholesky_lower(truth.w, "shock covariance");
  MatrixXd shocks(total, m);
  VectorXd log_scale = VectorXd::Zero(total);
  double s = 0.0;
  for (long t = 0; t < total; ++t) {
    VectorXd e;
    switch (spec.shock) {
      case ShockKind::skew: {
        const bool contaminated = shock_rng.uniform() < 0.015;
        const double loc = contaminated ? -3.0 * shock_rng.uniform() : 0.0;
        e = dist::skew_normal(VectorXd::Constant(m, loc), truth.w, VectorXd::Constant(m, truth.skew_shape), shock_rng);
        break;
      }
      case ShockKind::student_t:
        e = dist::student_t(VectorXd::Zero(m), truth.w, 3.0, shock_rng);
        break;
      case ShockKind::common_sv:
        if (t > 0) s += 0.25 * dist::normal(shock_rng);
        log_scale[t] = s;
        e = std::exp(0.5 * s) * (w_chol * dist::standard_normal(shock_rng, m));
        break;
      case ShockKind::homoskedastic:
        e = w_chol * dist::standard_normal(shock_rng, m);
        break;
    }
    shocks.row(t) = spec.shock_scale * e.transpose();
  }

  MatrixXd y(total, m);
  VectorXd prev = spec.initial.size() == m ? spec.initial : VectorXd::Zero(m);
  for (long t = 0; t < total; ++t) {
    prev = truth.coefficients * prev + shocks.row(t).transpose();
    y.row(t) = prev.transpose();
  }

  out.data.observations = y.bottomRows(spec.periods);
  truth.shocks = shocks.bottomRows(spec.periods);
  if (spec.shock == ShockKind::common_sv) truth.log_scale = log_scale.tail(spec.periods);
  for (int i = 0; i < m; ++i) out.data.names.push_back("y" + std::to_string(i + 1));
  out.data.frequency = "synthetic";
  return out;
}

}  // namespace dpmvar::dgp
