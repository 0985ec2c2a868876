#include "dpmvar/distributions.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <string>

namespace dpmvar::dist {

MatrixXd cholesky_lower(const MatrixXd& m, std::string_view what) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success || !llt.matrixL().toDenseMatrix().allFinite()) {
    throw NotPositiveDefinite("Cholesky factorization failed: " + std::string(what) +
                              " is not symmetric positive definite");
  }
  return llt.matrixL();
}

double normal(RngHandle& rng, double mean, double sd) {
  boost::random::normal_distribution<double> d(mean, sd);
  return d(rng);
}

VectorXd standard_normal(RngHandle& rng, Eigen::Index n) {
  boost::random::normal_distribution<double> d;
  VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = d(rng);
  return z;
}

double uniform(RngHandle& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

double gamma(RngHandle& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw Error("gamma: shape and rate must be positive and finite (shape=" + std::to_string(shape) +
                ", rate=" + std::to_string(rate) + ")");
  }
  if (shape < 1.0) {
    // Boosting: G(a) = G(a + 1) U^(1/a); keeps tiny shapes away from underflow in log space.
    boost::random::gamma_distribution<double> d(shape + 1.0, 1.0);
    const double g = d(rng);
    const double log_x = std::log(g) + std::log(rng.uniform()) / shape;
    return std::exp(log_x) / rate;
  }
  boost::random::gamma_distribution<double> d(shape, 1.0);
  return d(rng) / rate;
}

double inverse_gamma(RngHandle& rng, double shape, double scale) { return 1.0 / gamma(rng, shape, scale); }

double beta(RngHandle& rng, double a, double b) {
  const double x = gamma(rng, a, 1.0);
  const double y = gamma(rng, b, 1.0);
  return x / (x + y);
}

double chi_squared(RngHandle& rng, double df) { return gamma(rng, 0.5 * df, 0.5); }

VectorXd mvn_precision(const VectorXd& mean, const MatrixXd& precision, RngHandle& rng,
                       std::string_view what) {
  const MatrixXd l = cholesky_lower(precision, what);
  const VectorXd z = standard_normal(rng, mean.size());
  return mean + l.transpose().triangularView<Eigen::Upper>().solve(z);
}

VectorXd mvn_canonical(const MatrixXd& precision, const VectorXd& linear, RngHandle& rng,
                       std::string_view what) {
  const MatrixXd l = cholesky_lower(precision, what);
  const auto lower = l.triangularView<Eigen::Lower>();
  const auto upper = l.transpose().triangularView<Eigen::Upper>();
  const VectorXd mean = upper.solve(lower.solve(linear));
  const VectorXd z = standard_normal(rng, linear.size());
  return mean + upper.solve(z);
}

VectorXd mvn_covariance(const VectorXd& mean, const MatrixXd& covariance, RngHandle& rng) {
  const MatrixXd l = cholesky_lower(covariance, "covariance");
  return mean + l * standard_normal(rng, mean.size());
}

VectorXd mvn_fast(const MatrixXd& design, const VectorXd& response, const VectorXd& prior_var,
                  RngHandle& rng) {
  const Eigen::Index t = design.rows();
  const Eigen::Index k = design.cols();
  if (response.size() != t || prior_var.size() != k) throw Error("mvn_fast: dimension mismatch");
  if ((prior_var.array() <= 0.0).any()) throw Error("mvn_fast: prior variances must be positive");
  const VectorXd u = prior_var.cwiseSqrt().cwiseProduct(standard_normal(rng, k));
  const VectorXd delta = standard_normal(rng, t);
  const VectorXd v = design * u + delta;
  const MatrixXd phi_d = design * prior_var.asDiagonal();
  MatrixXd inner = phi_d * design.transpose();
  inner.diagonal().array() += 1.0;
  Eigen::LLT<MatrixXd> llt(inner);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("mvn_fast: singular T x T system");
  const VectorXd w = llt.solve(response - v);
  return u + phi_d.transpose() * w;
}

MatrixXd wishart(double df, const MatrixXd& scale, RngHandle& rng) {
  const Eigen::Index n = scale.rows();
  if (!(df > static_cast<double>(n) - 1.0)) {
    throw Error("wishart: degrees of freedom " + std::to_string(df) + " must exceed dimension - 1 (" +
                std::to_string(n - 1) + ")");
  }
  const MatrixXd l = cholesky_lower(scale, "Wishart scale");
  MatrixXd bartlett = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    bartlett(i, i) = std::sqrt(chi_squared(rng, df - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) bartlett(i, j) = normal(rng);
  }
  const MatrixXd la = l * bartlett;
  MatrixXd w = la * la.transpose();
  return 0.5 * (w + w.transpose());
}

VectorXd skew_normal(const VectorXd& location, const MatrixXd& scale, const VectorXd& shape,
                     RngHandle& rng) {
  const Eigen::Index m = location.size();
  if (scale.rows() != m || shape.size() != m) throw Error("skew_normal: dimension mismatch");
  cholesky_lower(scale, "skew-normal scale");
  const VectorXd scale_shape = scale * shape;
  const VectorXd a = scale_shape / std::sqrt(1.0 + shape.dot(scale_shape));
  const MatrixXd residual_cov = scale - a * a.transpose();
  const double u0 = std::abs(normal(rng));
  VectorXd v = VectorXd::Zero(m);
  Eigen::LLT<MatrixXd> llt(residual_cov);
  if (llt.info() == Eigen::Success) {
    v = llt.matrixL() * standard_normal(rng, m);
  } else {
    // Residual covariance is singular only when the shape is numerically infinite.
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(residual_cov);
    const VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    v = eig.eigenvectors() * root.cwiseProduct(standard_normal(rng, m));
  }
  return location + a * u0 + v;
}

VectorXd student_t(const VectorXd& location, const MatrixXd& covariance, double df, RngHandle& rng) {
  if (!(df > 2.0)) throw Error("student_t: df must exceed 2 for a finite covariance");
  const MatrixXd l = cholesky_lower(covariance * ((df - 2.0) / df), "Student-t covariance");
  const double g = chi_squared(rng, df);
  return location + l * standard_normal(rng, location.size()) / std::sqrt(g / df);
}

double log_normal_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(variance) + d * d / variance);
}

double log_gamma_pdf(double x, double shape, double rate) {
  if (x <= 0.0) return -INFINITY;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_beta_pdf(double x, double a, double b) {
  if (x <= 0.0 || x >= 1.0) return -INFINITY;
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(x) +
         (b - 1.0) * std::log1p(-x);
}

double log_gig_pdf(double x, const GigParams& params) {
  if (x <= 0.0) return -INFINITY;
  const double lambda = params.lambda;
  const double chi = params.chi;
  const double psi = params.psi;
  double log_norm;
  if (chi <= 0.0) {
    log_norm = lambda * std::log(0.5 * psi) - std::lgamma(lambda);
  } else if (psi <= 0.0) {
    log_norm = -lambda * std::log(0.5 * chi) - std::lgamma(-lambda);
  } else {
    const double omega = std::sqrt(chi * psi);
    log_norm = 0.5 * lambda * std::log(psi / chi) - std::log(2.0) -
               std::log(boost::math::cyl_bessel_k(lambda, omega));
  }
  return log_norm + (lambda - 1.0) * std::log(x) - 0.5 * (chi / x + psi * x);
}

double log_mvn_pdf_chol(const VectorXd& x, const VectorXd& mean, const MatrixXd& chol_lower) {
  const VectorXd z = chol_lower.triangularView<Eigen::Lower>().solve(x - mean);
  const double log_det = 2.0 * chol_lower.diagonal().array().log().sum();
  return -0.5 * (static_cast<double>(x.size()) * kLog2Pi + log_det + z.squaredNorm());
}

double log_mvn_pdf(const VectorXd& x, const VectorXd& mean, const MatrixXd& covariance) {
  return log_mvn_pdf_chol(x, mean, cholesky_lower(covariance, "covariance"));
}

}  // namespace dpmvar::dist
