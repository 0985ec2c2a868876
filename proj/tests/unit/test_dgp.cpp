#include <cmath>
#include <vector>

#include "doctest.h"
#include "dpmvar/dgp.hpp"
#include "helpers.hpp"

using namespace dpmvar;
using testutil::moments;

TEST_SUITE("dgp") {
  TEST_CASE("coefficient draws are stable with the stated moments") {
    RngHandle rng(61, 1);
    std::vector<double> off;
    for (int r = 0; r < 400; ++r) {
      const MatrixXd a = dgp::simulate_var_coefficients(5, rng);
      CHECK(dgp::spectral_radius(a) < 1.0);
      for (int i = 0; i < 5; ++i) {
        CHECK(a(i, i) == 0.75);
        for (int j = 0; j < 5; ++j)
          if (i != j) off.push_back(a(i, j));
      }
    }
    const auto m = moments(off);
    CHECK_WITHIN_SE(m.mean, 0.0, m.se_mean, 3);
    // Rejection of explosive draws trims the tails slightly.
    CHECK(m.var == doctest::Approx(0.01).epsilon(0.1));
  }

  TEST_CASE("shock covariance factor") {
    RngHandle rng(61, 2);
    const MatrixXd w = dgp::simulate_shock_covariance(4, rng);
    CHECK((w - w.transpose()).norm() < 1e-12);
    CHECK(w(0, 0) == doctest::Approx(1.0));
    CHECK(Eigen::LLT<MatrixXd>(w).info() == Eigen::Success);
  }

  TEST_CASE("homoskedastic shocks have covariance W and drive the recursion") {
    dgp::DgpSpec spec;
    spec.dimension = 3;
    spec.periods = 50000;
    RngHandle rng(62, 1);
    const auto sim = dgp::simulate_dataset(spec, rng);
    const MatrixXd& e = sim.truth.shocks;
    const MatrixXd centred = e.rowwise() - e.colwise().mean();
    const MatrixXd cov = centred.transpose() * centred / static_cast<double>(e.rows() - 1);
    CHECK((cov - sim.truth.w).cwiseAbs().maxCoeff() < 0.05);
    const MatrixXd& y = sim.data.observations;
    for (long t = 1; t < 100; ++t) {
      const VectorXd pred = sim.truth.coefficients * y.row(t - 1).transpose() + e.row(t).transpose();
      CHECK((pred - y.row(t).transpose()).norm() < 1e-10);
    }
    CHECK(sim.data.names.size() == 3);
  }

  TEST_CASE("shock laws differ in the expected direction") {
    dgp::DgpSpec spec;
    spec.dimension = 2;
    spec.periods = 50000;
    spec.shock = dgp::ShockKind::student_t;
    RngHandle r1(63, 1);
    const auto t3 = dgp::simulate_dataset(spec, r1);
    std::vector<double> x(t3.truth.shocks.rows());
    for (long i = 0; i < t3.truth.shocks.rows(); ++i) x[i] = t3.truth.shocks(i, 0);
    CHECK(testutil::excess_kurtosis(x) > 2.0);

    spec.shock = dgp::ShockKind::skew;
    RngHandle r2(63, 1);
    const auto sk = dgp::simulate_dataset(spec, r2);
    for (long i = 0; i < sk.truth.shocks.rows(); ++i) x[i] = sk.truth.shocks(i, 0);
    const int kappa = sk.truth.skew_shape;
    const auto m = moments(x);
    const VectorXd wa = sk.truth.w * VectorXd::Constant(2, kappa);
    const double delta = wa[0] / std::sqrt(1.0 + VectorXd::Constant(2, kappa).dot(wa));
    // SN mean, shifted by the 1.5% contamination with mean location -1.5.
    const double expected = delta * std::sqrt(2.0 / M_PI) - 0.015 * 1.5;
    CHECK_WITHIN_SE(m.mean, expected, m.se_mean, 4);
    // Both laws share the conditional mean parameters.
    CHECK(sk.truth.coefficients == t3.truth.coefficients);

    spec.shock = dgp::ShockKind::common_sv;
    RngHandle r3(63, 2);
    const auto sv = dgp::simulate_dataset(spec, r3);
    CHECK(sv.truth.log_scale.size() == spec.periods);
    const VectorXd ds = sv.truth.log_scale.tail(spec.periods - 1) - sv.truth.log_scale.head(spec.periods - 1);
    CHECK(std::sqrt(ds.squaredNorm() / static_cast<double>(ds.size())) == doctest::Approx(0.25).epsilon(0.05));
  }

  TEST_CASE("noise-free system and the MAE criterion") {
    dgp::DgpSpec spec;
    spec.dimension = 2;
    spec.periods = 30;
    spec.shock_scale = 0.0;
    spec.initial = VectorXd::Ones(2);
    RngHandle rng(64, 1);
    const auto sim = dgp::simulate_dataset(spec, rng);
    CHECK(sim.truth.shocks.norm() == 0.0);
    VectorXd y = VectorXd::Ones(2);
    for (long t = 0; t < 30; ++t) {
      y = sim.truth.coefficients * y;
      CHECK((sim.data.observations.row(t).transpose() - y).norm() < 1e-12);
    }

    mcmc::DrawStore store;
    store.dimension = 2;
    store.lags = 2;
    for (int d = 0; d < 5; ++d) {
      mcmc::PosteriorDraw dr;
      dr.coefficients = MatrixXd::Zero(2, 4);
      dr.coefficients.leftCols(2) = sim.truth.coefficients;
      dr.coefficients(0, 3) = d == 2 ? 0.5 : 0.0;  // outlier draw, removed by the median
      store.draws.push_back(dr);
    }
    CHECK(dgp::coefficient_mae(store, sim.truth.coefficients) == 0.0);
    store.draws[0].coefficients(1, 1) += 0.4;
    store.draws[1].coefficients(1, 1) += 0.4;
    store.draws[3].coefficients(1, 1) += 0.4;
    CHECK(dgp::coefficient_mae(store, sim.truth.coefficients) == doctest::Approx(0.4 / 8.0));
    CHECK_THROWS_AS((void)dgp::coefficient_mae(store, MatrixXd::Zero(3, 3)), Error);
  }

  TEST_CASE("small noise gives small estimation error") {
    dgp::DgpSpec spec;
    spec.dimension = 2;
    spec.periods = 400;
    spec.shock_scale = 0.05;
    RngHandle rng(65, 1);
    const auto sim = dgp::simulate_dataset(spec, rng);
    ModelConfig model;
    model.max_clusters = 1;
    PriorConfig priors = default_priors(2);
    priors.sigma0_diag = estimate_sigma0(sim.data, 1);
    const auto store = mcmc::run_sweeps(sim.data, model, priors, {400, 200, 1, false}, RngHandle(65, 2));
    CHECK(dgp::coefficient_mae(store, sim.truth.coefficients) < 0.05);
  }

  TEST_CASE("names and validation") {
    for (auto k : {dgp::ShockKind::skew, dgp::ShockKind::student_t, dgp::ShockKind::common_sv,
                   dgp::ShockKind::homoskedastic})
      CHECK(dgp::shock_kind_from_string(dgp::to_string(k)) == k);
    CHECK_THROWS_AS((void)dgp::shock_kind_from_string("laplace"), Error);
    dgp::DgpSpec spec;
    spec.shock_scale = -1.0;
    CHECK_THROWS_AS(spec.validate(), Error);
    CHECK(dgp::median({3.0, 1.0, 2.0, 10.0}) == 2.5);
  }
}
