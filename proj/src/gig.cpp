// Generalized inverse Gaussian generator following Hoermann & Leydold (2014):
// ratio-of-uniforms with and without mode shift, plus the hat-function method
// for small lambda and omega.

#include <cmath>
#include <limits>
#include <string>

#include "dpmvar/distributions.hpp"

namespace dpmvar::dist {
namespace {

constexpr double kZeroTol = std::numeric_limits<double>::epsilon() * 10.0;

double gig_mode(double lambda, double omega) {
  if (lambda >= 1.0) return (std::sqrt((lambda - 1.0) * (lambda - 1.0) + omega * omega) + (lambda - 1.0)) / omega;
  return omega / (std::sqrt((1.0 - lambda) * (1.0 - lambda) + omega * omega) + (1.0 - lambda));
}

// Standard two-parameter form: density proportional to x^(lambda-1) exp(-omega (x + 1/x) / 2).
double rou_noshift(double lambda, double omega, RngHandle& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);
  const double ym = ((lambda + 1.0) + std::sqrt((lambda + 1.0) * (lambda + 1.0) + omega * omega)) / omega;
  const double um = std::exp(0.5 * (lambda + 1.0) * std::log(ym) - s * (ym + 1.0 / ym) - nc);
  for (;;) {
    const double u = um * rng.uniform();
    const double v = rng.uniform();
    const double x = u / v;
    if (std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

double rou_shift(double lambda, double omega, RngHandle& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);

  // Roots of the cubic locating the extremes of (x - xm) sqrt(f(x)).
  const double a = -(2.0 * (lambda + 1.0) / omega + xm);
  const double b = 2.0 * (lambda - 1.0) * xm / omega - 1.0;
  const double c = xm;
  const double p = b - a * a / 3.0;
  const double q = (2.0 * a * a * a) / 27.0 - (a * b) / 3.0 + c;
  const double fi = std::acos(-q / (2.0 * std::sqrt(-(p * p * p) / 27.0)));
  const double fak = 2.0 * std::sqrt(-p / 3.0);
  const double y1 = fak * std::cos(fi / 3.0) - a / 3.0;
  const double y2 = fak * std::cos(fi / 3.0 + 4.0 / 3.0 * M_PI) - a / 3.0;
  const double uplus = (y1 - xm) * std::exp(t * std::log(y1) - s * (y1 + 1.0 / y1) - nc);
  const double uminus = (y2 - xm) * std::exp(t * std::log(y2) - s * (y2 + 1.0 / y2) - nc);

  for (;;) {
    const double u = uminus + rng.uniform() * (uplus - uminus);
    const double v = rng.uniform();
    const double x = u / v + xm;
    if (x > 0.0 && std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

// Valid for 0 <= lambda < 1 and 0 < omega <= 1.
double hat_method(double lambda, double omega, RngHandle& rng) {
  const double xm = gig_mode(lambda, omega);
  const double x0 = omega / (1.0 - lambda);
  const double k0 = std::exp((lambda - 1.0) * std::log(xm) - 0.5 * omega * (xm + 1.0 / xm));
  double area[3];
  double k1;
  double k2;
  area[0] = k0 * x0;
  if (x0 >= 2.0 / omega) {
    k1 = 0.0;
    area[1] = 0.0;
    k2 = std::pow(x0, lambda - 1.0);
    area[2] = k2 * 2.0 * std::exp(-omega * x0 / 2.0) / omega;
  } else {
    k1 = std::exp(-omega);
    area[1] = (lambda == 0.0) ? k1 * std::log(2.0 / (omega * omega))
                              : k1 / lambda * (std::pow(2.0 / omega, lambda) - std::pow(x0, lambda));
    k2 = std::pow(2.0 / omega, lambda - 1.0);
    area[2] = k2 * 2.0 * std::exp(-1.0) / omega;
  }
  const double total = area[0] + area[1] + area[2];

  for (;;) {
    double v = total * rng.uniform();
    double x;
    double hx;
    if (v <= area[0]) {
      x = x0 * v / area[0];
      hx = k0;
    } else if ((v -= area[0]) <= area[1]) {
      if (lambda == 0.0) {
        x = omega * std::exp(std::exp(omega) * v);
        hx = k1 / x;
      } else {
        x = std::pow(std::pow(x0, lambda) + (lambda / k1 * v), 1.0 / lambda);
        hx = k1 * std::pow(x, lambda - 1.0);
      }
    } else {
      v -= area[1];
      const double a = (x0 > 2.0 / omega) ? x0 : 2.0 / omega;
      x = -2.0 / omega * std::log(std::exp(-omega / 2.0 * a) - omega / (2.0 * k2) * v);
      hx = k2 * std::exp(-omega / 2.0 * x);
    }
    const double u = rng.uniform() * hx;
    if (std::log(u) <= (lambda - 1.0) * std::log(x) - omega / 2.0 * (x + 1.0 / x)) return x;
  }
}

}  // namespace

bool GigParams::valid() const {
  if (!std::isfinite(lambda) || !std::isfinite(chi) || !std::isfinite(psi)) return false;
  if (chi < 0.0 || psi < 0.0) return false;
  if (lambda > 0.0) return psi > 0.0;
  if (lambda < 0.0) return chi > 0.0;
  return chi > 0.0 && psi > 0.0;
}

void GigParams::validate() const {
  if (!valid()) {
    throw Error("GIG parameters outside the valid region (lambda=" + std::to_string(lambda) +
                ", chi=" + std::to_string(chi) + ", psi=" + std::to_string(psi) + ")");
  }
}

double gig(const GigParams& params, RngHandle& rng) {
  params.validate();
  const double lambda = params.lambda;
  const double chi = params.chi;
  const double psi = params.psi;

  if (chi < kZeroTol && lambda > 0.0) return gamma(rng, lambda, 0.5 * psi);
  if (psi < kZeroTol && lambda < 0.0) return inverse_gamma(rng, -lambda, 0.5 * chi);

  const double abs_lambda = std::abs(lambda);
  const double alpha = std::sqrt(chi / psi);
  const double omega = std::sqrt(psi * chi);
  double x;
  if (abs_lambda > 2.0 || omega > 3.0) {
    x = rou_shift(abs_lambda, omega, rng);
  } else if (abs_lambda >= 1.0 - 2.25 * omega * omega || omega > 0.2) {
    x = rou_noshift(abs_lambda, omega, rng);
  } else {
    x = hat_method(abs_lambda, omega, rng);
  }
  return lambda < 0.0 ? alpha / x : alpha * x;
}

}  // namespace dpmvar::dist
