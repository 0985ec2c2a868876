#pragma once

#include <string_view>

#include "dpmvar/common.hpp"
#include "dpmvar/rng.hpp"

namespace dpmvar::dist {

// Lower Cholesky factor; throws NotPositiveDefinite naming `what` on failure.
MatrixXd cholesky_lower(const MatrixXd& m, std::string_view what = "matrix");

double normal(RngHandle& rng, double mean = 0.0, double sd = 1.0);
VectorXd standard_normal(RngHandle& rng, Eigen::Index n);
double uniform(RngHandle& rng, double lo = 0.0, double hi = 1.0);
// Gamma with shape/rate: density proportional to x^(shape-1) exp(-rate x).
double gamma(RngHandle& rng, double shape, double rate);
// Inverse gamma with shape/scale: density proportional to x^(-shape-1) exp(-scale / x).
double inverse_gamma(RngHandle& rng, double shape, double scale);
double beta(RngHandle& rng, double a, double b);
double chi_squared(RngHandle& rng, double df);

// Generalized inverse Gaussian, density proportional to
// x^(lambda-1) exp(-(chi / x + psi x) / 2).
struct GigParams {
  double lambda = 0.0;
  double chi = 0.0;
  double psi = 0.0;

  bool valid() const;
  void validate() const;
};

double gig(const GigParams& params, RngHandle& rng);

// N(mean, precision^-1) using one Cholesky of the precision and one triangular solve.
VectorXd mvn_precision(const VectorXd& mean, const MatrixXd& precision, RngHandle& rng,
                       std::string_view what = "precision");
// N(precision^-1 linear, precision^-1): the canonical-form variant used by the Gibbs blocks.
VectorXd mvn_canonical(const MatrixXd& precision, const VectorXd& linear, RngHandle& rng,
                       std::string_view what = "precision");
VectorXd mvn_covariance(const VectorXd& mean, const MatrixXd& covariance, RngHandle& rng);

// Draw from N((D^-1 + Phi'Phi)^-1 Phi'alpha, (D^-1 + Phi'Phi)^-1) with D = diag(prior_var),
// solving a T x T system instead of a K x K one. Inputs are already whitened.
VectorXd mvn_fast(const MatrixXd& design, const VectorXd& response, const VectorXd& prior_var,
                  RngHandle& rng);

// Wishart with E[W] = df * scale, drawn through the Bartlett decomposition.
MatrixXd wishart(double df, const MatrixXd& scale, RngHandle& rng);

// Azzalini multivariate skew-normal SN(location, scale, shape) via the
// hidden-truncation representation z = a|u0| + v.
VectorXd skew_normal(const VectorXd& location, const MatrixXd& scale, const VectorXd& shape,
                     RngHandle& rng);

// Multivariate Student t with `df` > 2 degrees of freedom and the given covariance.
VectorXd student_t(const VectorXd& location, const MatrixXd& covariance, double df, RngHandle& rng);

double log_normal_pdf(double x, double mean, double variance);
double log_gamma_pdf(double x, double shape, double rate);
double log_beta_pdf(double x, double a, double b);
double log_gig_pdf(double x, const GigParams& params);
// Multivariate normal log-density given the lower Cholesky factor of the covariance.
double log_mvn_pdf_chol(const VectorXd& x, const VectorXd& mean, const MatrixXd& chol_lower);
double log_mvn_pdf(const VectorXd& x, const VectorXd& mean, const MatrixXd& covariance);

}  // namespace dpmvar::dist
