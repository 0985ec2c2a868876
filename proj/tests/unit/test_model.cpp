#include <cmath>

#include "doctest.h"
#include "dpmvar/distributions.hpp"
#include "dpmvar/model.hpp"

using namespace dpmvar;

namespace {

MatrixXd ramp(Eigen::Index t, Eigen::Index m) {
  MatrixXd y(t, m);
  for (Eigen::Index i = 0; i < t; ++i)
    for (Eigen::Index j = 0; j < m; ++j) y(i, j) = static_cast<double>(10 * i + j);
  return y;
}

SamplerState two_cluster_state(const LaggedData& d) {
  const Eigen::Index t = d.periods(), m = d.dimension();
  SamplerState s;
  s.coefficients = MatrixXd::Constant(m, d.regressors(), 0.1);
  MatrixXd s2 = MatrixXd::Identity(m, m) * 2.0;
  s.components.push_back(MixtureComponent::make(VectorXd::Zero(m), MatrixXd::Identity(m, m)));
  s.components.push_back(MixtureComponent::make(VectorXd::Ones(m), s2));
  s.delta.assign(static_cast<std::size_t>(t), 0);
  s.delta.back() = 1;
  s.recount();
  s.sticks = VectorXd::Constant(2, 0.5);
  s.weights = stick_breaking_weights(s.sticks);
  s.random_effects = MatrixXd::Constant(t, m, 0.25);
  s.w = MatrixXd::Zero(t, m);
  s.b = VectorXd::Ones(m);
  s.mu0 = VectorXd::Zero(m);
  s.log_vol = MatrixXd::Constant(t, m, std::log(0.5));
  return s;
}

}  // namespace

TEST_SUITE("model_core") {
  TEST_CASE("lag matrix shapes and contents") {
    const MatrixXd y = ramp(10, 3);
    const LaggedData d = build_lag_matrix(y, 2);
    CHECK(d.periods() == 8);
    CHECK(d.dimension() == 3);
    CHECK(d.regressors() == 6);
    CHECK(d.response.row(0) == y.row(2));
    CHECK(d.design.block(0, 0, 1, 3) == y.row(1));
    CHECK(d.design.block(0, 3, 1, 3) == y.row(0));
    CHECK(d.design.block(7, 0, 1, 3) == y.row(8));
    const VectorXd x = lag_vector(y, 2);
    CHECK(x.head(3) == y.row(9).transpose());
    CHECK(x.tail(3) == y.row(8).transpose());
    CHECK_THROWS_AS((void)build_lag_matrix(ramp(2, 2), 2), Error);
    CHECK_THROWS_AS((void)build_lag_matrix(y, 0), Error);
  }

  TEST_CASE("dataset and model validation") {
    Dataset d;
    d.observations = ramp(5, 2);
    d.names = {"a"};
    CHECK_THROWS_AS(d.validate(1), Error);
    d.names = {"a", "b"};
    CHECK_NOTHROW(d.validate(1));
    d.observations(2, 1) = std::nan("");
    CHECK_THROWS_AS(d.validate(1), Error);
    ModelConfig m;
    CHECK_NOTHROW(m.validate());
    m.slice_decay = 1.0;
    CHECK_THROWS_AS(m.validate(), Error);
  }

  TEST_CASE("stick-breaking weights") {
    VectorXd nu(3);
    nu << 0.5, 0.5, 0.5;
    const VectorXd eta = stick_breaking_weights(nu);
    CHECK(eta[0] == doctest::Approx(0.5));
    CHECK(eta[1] == doctest::Approx(0.25));
    CHECK(eta[2] == doctest::Approx(0.125));
    nu[2] = 1.0;
    CHECK(stick_breaking_weights(nu).sum() == doctest::Approx(1.0));
  }

  TEST_CASE("residual flavors and covariance assembly") {
    const LaggedData d = build_lag_matrix(ramp(6, 2), 1);
    SamplerState s = two_cluster_state(d);
    CHECK_NOTHROW(s.check_invariants(d.periods()));
    CHECK(s.effective_clusters() == 2);
    CHECK(s.weight_remainder() == doctest::Approx(0.25));

    const MatrixXd fit = d.design * s.coefficients.transpose();
    const MatrixXd mix = residuals(s, d, ResidualKind::mixture);
    const MatrixXd idio = residuals(s, d, ResidualKind::idiosyncratic);
    const MatrixXd eq = residuals(s, d, ResidualKind::equation);
    CHECK((mix - (d.response - fit)).norm() < 1e-12);
    CHECK((idio - (mix.array() - 0.25).matrix()).norm() < 1e-12);
    CHECK((eq - (d.response.array() - 0.25).matrix()).norm() < 1e-12);

    const CovarianceView v0 = assemble_covariance(s, 0);
    CHECK(v0.xi(0, 0) == doctest::Approx(1.5));
    CHECK(v0.xi(0, 1) == doctest::Approx(0.0));
    const CovarianceView vl = assemble_covariance(s, d.periods() - 1);
    CHECK(vl.xi(1, 1) == doctest::Approx(2.5));
    CHECK(vl.omega_diag[0] == doctest::Approx(0.5));
    CHECK_THROWS_AS((void)assemble_covariance(s, d.periods()), Error);

    s.delta[0] = 5;
    CHECK_THROWS_AS(s.check_invariants(d.periods()), Error);
  }

  TEST_CASE("component log density") {
    const auto c = MixtureComponent::make(VectorXd::Zero(1), MatrixXd::Identity(1, 1));
    CHECK(log_component_density(VectorXd::Zero(1), c) == doctest::Approx(-0.918938533).epsilon(1e-9));
    CHECK(log_component_density(VectorXd::Zero(1), c, VectorXd::Zero(1)) == doctest::Approx(-0.918938533));

    // Trapezoidal quadrature of a 2-d density with added idiosyncratic variance.
    MatrixXd sig(2, 2);
    sig << 1.0, 0.5, 0.5, 1.0;
    const auto c2 = MixtureComponent::make(VectorXd::Constant(2, 0.3), sig);
    const VectorXd om = VectorXd::Constant(2, 0.2);
    const double h = 0.05;
    double total = 0.0;
    for (double a = -8.0; a <= 8.0; a += h)
      for (double b = -8.0; b <= 8.0; b += h) {
        VectorXd y(2);
        y << a, b;
        total += std::exp(log_component_density(y, c2, om)) * h * h;
      }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-4));

    MatrixXd full = sig;
    full.diagonal() += om;
    const VectorXd y = VectorXd::Constant(2, -0.7);
    CHECK(log_component_density(y, c2, om) == doctest::Approx(dist::log_mvn_pdf(y, c2.mu, full)));
    CHECK(log_component_density(y, c2) == doctest::Approx(dist::log_mvn_pdf(y, c2.mu, sig)));
  }
}
