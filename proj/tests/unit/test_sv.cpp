#include <cmath>
#include <vector>

#include "doctest.h"
#include "dpmvar/mcmc.hpp"

using namespace dpmvar;

TEST_SUITE("stochastic_volatility") {
  TEST_CASE("mixture approximates the log chi-square density") {
    const double h = 0.001;
    double mass_mix = 0.0, mass_exact = 0.0, l1 = 0.0;
    for (double x = -40.0; x < 8.0; x += h) {
      const double a = std::exp(mcmc::log_chi2_mixture_density(x));
      const double b = std::exp(mcmc::log_chi2_exact_density(x));
      mass_mix += a * h;
      mass_exact += b * h;
      l1 += std::abs(a - b) * h;
    }
    CHECK(mass_mix == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(mass_exact == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(l1 < 0.02);
  }

  TEST_CASE("prior path is a stationary AR(1)") {
    RngHandle rng(51, 1);
    const SvParams p{-1.0, 0.9, 0.19};
    const VectorXd h = mcmc::simulate_sv_path(p, 200000, rng);
    const double mean = h.mean();
    const double var = (h.array() - mean).square().mean();
    CHECK(mean == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(var == doctest::Approx(0.19 / (1.0 - 0.81)).epsilon(0.05));
  }

  TEST_CASE("persistence is recovered from a long series") {
    RngHandle rng(52, 1);
    const long t = 500;
    const SvParams truth{-1.0, 0.95, 0.05};
    const VectorXd h_true = mcmc::simulate_sv_path(truth, t, rng);
    VectorXd v(t);
    for (long i = 0; i < t; ++i) v[i] = std::exp(0.5 * h_true[i]) * dist::normal(rng);

    SvPrior prior;
    SvParams p{0.0, 0.5, 0.2};
    VectorXd h = VectorXd::Constant(t, std::log(v.squaredNorm() / t));
    double rho_sum = 0.0, mu_sum = 0.0;
    int kept = 0;
    for (int it = 0; it < 6000; ++it) {
      RngHandle r = rng.substream(static_cast<std::uint64_t>(it));
      (void)mcmc::draw_sv_equation(h, p, v, prior, r);
      CHECK(std::abs(p.rho) < 1.0);
      if (it >= 2000) {
        rho_sum += p.rho;
        mu_sum += p.mu;
        ++kept;
      }
    }
    CHECK(std::abs(rho_sum / kept - 0.95) < 0.1);
    CHECK(std::abs(mu_sum / kept - h_true.mean()) < 0.5);
    const double corr = [&] {
      const VectorXd a = h.array() - h.mean();
      const VectorXd b = h_true.array() - h_true.mean();
      return a.dot(b) / (a.norm() * b.norm());
    }();
    CHECK(corr > 0.3);
  }
}
