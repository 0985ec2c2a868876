#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "dpmvar/distributions.hpp"
#include "dpmvar/forecast.hpp"
#include "helpers.hpp"

using namespace dpmvar;
using testutil::moments;

namespace {

mcmc::DrawStore single_cluster_store(const MatrixXd& a, const VectorXd& mu, const MatrixXd& sigma, double omega,
                                     int draws) {
  mcmc::DrawStore s;
  s.dimension = static_cast<int>(a.rows());
  s.lags = static_cast<int>(a.cols() / a.rows());
  s.names.resize(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) s.names[i] = "y" + std::to_string(i + 1);
  for (int d = 0; d < draws; ++d) {
    mcmc::PosteriorDraw dr;
    dr.coefficients = a;
    mcmc::ClusterDraw c;
    c.mu = mu;
    c.sigma = sigma;
    c.weight = 1.0;
    c.count = 1;
    dr.clusters.push_back(c);
    dr.log_vol_last = VectorXd::Constant(a.rows(), std::log(omega));
    dr.b = VectorXd::Ones(a.rows());
    dr.mu0 = VectorXd::Zero(a.rows());
    s.draws.push_back(dr);
  }
  s.history = MatrixXd::Zero(s.lags, a.rows());
  return s;
}

}  // namespace

TEST_SUITE("forecast") {
  TEST_CASE("standard normal predictive is exact") {
    const auto store = single_cluster_store(MatrixXd::Zero(2, 2), VectorXd::Zero(2), 0.5 * MatrixXd::Identity(2, 2),
                                            0.5, 20000);
    forecast::PredictiveOptions po;
    const auto f = forecast::predict(store, MatrixXd::Zero(1, 2), po, RngHandle(71, 1));
    CHECK(f.paths.size() == 20000);
    CHECK(f.point_forecast().norm() < 1e-14);
    CHECK(f.log_predictive(VectorXd::Zero(2), {0, 1}) == doctest::Approx(-kLog2Pi).epsilon(1e-12));
    CHECK(f.log_predictive(VectorXd::Zero(2), {1}) == doctest::Approx(-0.9189385332).epsilon(1e-10));
    const auto m = moments(f.terminal_sample(0));
    CHECK_WITHIN_SE(m.mean, 0.0, m.se_mean, 3);
    CHECK_WITHIN_SE(m.var, 1.0, m.se_var, 3);

    const auto s = forecast::score_forecasts(f, VectorXd::Ones(2), {});
    CHECK(s.squared_error[0] == doctest::Approx(1.0));
    CHECK(s.lpl[0] == doctest::Approx(-0.9189385332 - 0.5));
    CHECK(s.lpl_joint == doctest::Approx(-kLog2Pi - 1.0));
    // Realized 1 lies above the 10% quantile and below the 90% one.
    const double q10 = forecast::empirical_quantile(f.terminal_sample(0), 0.1);
    const double q90 = forecast::empirical_quantile(f.terminal_sample(0), 0.9);
    REQUIRE(q10 < 1.0);
    REQUIRE(q90 > 1.0);
    CHECK(s.qs10[0] == doctest::Approx((1.0 - q10) * 0.1));
    CHECK(s.qs90[0] == doctest::Approx((q90 - 1.0) * 0.1));
  }

  TEST_CASE("one-step point forecast is the Rao-Blackwellized mean") {
    MatrixXd a(2, 2);
    a << 0.5, 0.1, -0.2, 0.3;
    VectorXd mu(2);
    mu << 1.0, -1.0;
    auto store = single_cluster_store(a, mu, MatrixXd::Identity(2, 2), 0.1, 50);
    // Give the second half of the draws a second cluster.
    for (std::size_t d = 25; d < 50; ++d) {
      auto& dr = store.draws[d];
      dr.clusters[0].weight = 0.25;
      mcmc::ClusterDraw c = dr.clusters[0];
      c.mu = VectorXd::Constant(2, 4.0);
      c.weight = 0.75;
      dr.clusters.push_back(c);
    }
    MatrixXd hist(1, 2);
    hist << 2.0, 1.0;
    const auto f = forecast::predict(store, hist, {}, RngHandle(72, 1));
    const VectorXd ax = a * hist.row(0).transpose();
    const VectorXd expected = ax + 0.5 * mu + 0.5 * (0.25 * mu + 0.75 * VectorXd::Constant(2, 4.0));
    CHECK((f.point_forecast() - expected).norm() < 1e-12);

    const auto& mix = f.paths.back().terminal;
    CHECK(mix.size() == 2);
    const double w = 0.25, v = 1.1;
    const double direct = std::log(w * std::exp(dist::log_normal_pdf(0.0, ax[0] + mu[0], v)) +
                                   (1 - w) * std::exp(dist::log_normal_pdf(0.0, ax[0] + 4.0, v)));
    CHECK(mix.marginal({0}).log_density(VectorXd::Zero(1)) == doctest::Approx(direct));
  }

  TEST_CASE("one-step LPL does not depend on the number of paths") {
    auto store = single_cluster_store(MatrixXd::Constant(2, 2, 0.1), VectorXd::Zero(2), MatrixXd::Identity(2, 2), 0.2,
                                      30);
    store.c0 = 5.0;
    store.sigma0_diag = VectorXd::Ones(2);
    for (auto& d : store.draws) {
      d.clusters[0].weight = 0.9;
      d.weight_remainder = 0.1;
    }
    forecast::PredictiveOptions one, many;
    many.paths_per_draw = 7;
    const MatrixXd hist = MatrixXd::Ones(1, 2);
    const auto a = forecast::predict(store, hist, one, RngHandle(77, 1));
    const auto b = forecast::predict(store, hist, many, RngHandle(77, 1));
    CHECK(b.paths.size() == 7 * a.paths.size());
    VectorXd y(2);
    y << 0.3, -2.0;
    CHECK(a.log_predictive(y, {0, 1}) == doctest::Approx(b.log_predictive(y, {0, 1})).epsilon(1e-12));
    CHECK((a.point_forecast() - b.point_forecast()).norm() < 1e-12);
  }

  TEST_CASE("multi-step AR(1) variance matches the closed form") {
    const auto store =
        single_cluster_store(MatrixXd::Constant(1, 1, 0.5), VectorXd::Zero(1), MatrixXd::Constant(1, 1, 0.6), 0.4,
                             100000);
    forecast::PredictiveOptions po;
    po.horizon = 3;
    const auto f = forecast::predict(store, MatrixXd::Constant(1, 1, 8.0), po, RngHandle(73, 1));
    const auto m = moments(f.terminal_sample(0));
    CHECK_WITHIN_SE(m.mean, 1.0, m.se_mean, 3);
    CHECK_WITHIN_SE(m.var, 1.0 + 0.25 + 0.0625, m.se_var, 3);
    // The terminal density conditions on the simulated path: variance one around 0.5 y_{T+2}.
    const auto& p = f.paths.front();
    CHECK(p.terminal.covariance()(0, 0) == doctest::Approx(1.0));
    CHECK(p.terminal.mean()[0] == doctest::Approx(0.5 * p.path(1, 0)));
  }

  TEST_CASE("explosive paths are flagged") {
    const auto store =
        single_cluster_store(MatrixXd::Constant(1, 1, 50.0), VectorXd::Zero(1), MatrixXd::Constant(1, 1, 1.0), 1.0, 10);
    forecast::PredictiveOptions po;
    po.horizon = 30;
    CHECK_THROWS_AS((void)forecast::predict(store, MatrixXd::Ones(1, 1), po, RngHandle(74, 1)), Error);
    po.horizon = 2;
    const auto f = forecast::predict(store, MatrixXd::Ones(1, 1), po, RngHandle(74, 1));
    CHECK(f.rejected == 0);
  }

  TEST_CASE("scoring primitives") {
    CHECK(forecast::pinball_loss(1.0, 0.0, 0.1) == doctest::Approx(0.1));
    CHECK(forecast::pinball_loss(-1.0, 0.0, 0.1) == doctest::Approx(0.9));
    CHECK(forecast::pinball_loss(2.0, 3.0, 0.9) == doctest::Approx(0.1));
    CHECK(forecast::pinball_loss(3.0, 3.0, 0.9) == 0.0);
    CHECK_THROWS_AS((void)forecast::pinball_loss(0.0, 0.0, 1.0), Error);
    CHECK(forecast::empirical_quantile({4.0, 1.0, 3.0, 2.0}, 0.5) == doctest::Approx(2.5));
    CHECK(forecast::empirical_quantile({4.0, 1.0, 3.0, 2.0}, 0.1) == doctest::Approx(1.3));
    CHECK(forecast::empirical_quantile({5.0}, 0.9) == 5.0);
    CHECK(forecast::log_mean_exp({0.0, std::log(3.0)}) == doctest::Approx(std::log(2.0)));
    CHECK(forecast::log_mean_exp({-1000.0, -1000.0}) == doctest::Approx(-1000.0));
  }

  TEST_CASE("degenerate predictive samples are rejected") {
    const auto store = single_cluster_store(MatrixXd::Zero(1, 1), VectorXd::Zero(1), MatrixXd::Constant(1, 1, 1.0),
                                            1.0, 1);
    const auto f = forecast::predict(store, MatrixXd::Zero(1, 1), {}, RngHandle(75, 1));
    CHECK_THROWS_AS((void)forecast::score_forecasts(f, VectorXd::Zero(1), {}), Error);
  }

  TEST_CASE("mixture utilities") {
    forecast::GaussianMixture g;
    g.weights = {0.5, 0.5};
    g.means = {VectorXd::Constant(1, -1.0), VectorXd::Constant(1, 1.0)};
    g.covariances = {MatrixXd::Constant(1, 1, 1.0), MatrixXd::Constant(1, 1, 1.0)};
    CHECK(g.mean()[0] == doctest::Approx(0.0));
    CHECK(g.covariance()(0, 0) == doctest::Approx(2.0));
  }

  TEST_CASE("rolling evaluation bookkeeping") {
    RngHandle rng(76, 1);
    Dataset d;
    d.observations.resize(40, 2);
    for (long t = 0; t < 40; ++t) d.observations.row(t) = dist::standard_normal(rng, 2).transpose();
    d.names = {"a", "b"};
    forecast::ModelSpec g1{"G1", {}};
    g1.model.max_clusters = 1;
    forecast::ModelSpec dpm{"DPM", {}};
    forecast::RollingConfig cfg;
    cfg.first_origin = 36;
    cfg.horizons = {1, 2};
    cfg.plan = {60, 20, 1, false};
    cfg.benchmark = "G1";
    const auto r = forecast::rolling_evaluation(d, {g1, dpm}, cfg);
    CHECK(r.origins.size() == 2 * (4 + 3));
    for (const auto& row : r.relative) {
      if (row.model != "G1") continue;
      CHECK(row.mse_ratio == 1.0);
      CHECK(row.qs10_ratio == 1.0);
      CHECK(row.lpl_difference == 0.0);
    }
    const auto cum = forecast::cumulative_lpl_difference(r, "DPM", 1);
    REQUIRE(cum.size() == 4);
    double running = 0.0, sum_dpm = 0.0, sum_g1 = 0.0;
    for (long o = 36; o < 40; ++o) {
      double a = 0.0, b = 0.0;
      for (const auto& os : r.origins) {
        if (os.origin != o || os.horizon != 1) continue;
        (os.model == "DPM" ? a : b) = os.scores.lpl_joint;
      }
      running += a - b;
      sum_dpm += a;
      sum_g1 += b;
      CHECK(cum[static_cast<std::size_t>(o - 36)] == doctest::Approx(running));
    }
    CHECK(forecast::average_joint_lpl(r, "DPM", 1) - forecast::average_joint_lpl(r, "G1", 1) ==
          doctest::Approx((sum_dpm - sum_g1) / 4.0));
    cfg.benchmark = "nope";
    CHECK_THROWS_AS((void)forecast::rolling_evaluation(d, {g1, dpm}, cfg), Error);
  }
}
