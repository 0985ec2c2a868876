#include <cmath>
#include <vector>

#include "doctest.h"
#include "dpmvar/structural.hpp"

using namespace dpmvar;

namespace {

mcmc::ClusterDraw cluster(const MatrixXd& sigma, int count, double weight, double omega) {
  mcmc::ClusterDraw c;
  c.mu = VectorXd::Zero(sigma.rows());
  c.sigma = sigma;
  c.count = count;
  c.weight = weight;
  c.omega_bar = VectorXd::Constant(sigma.rows(), omega);
  return c;
}

mcmc::PosteriorDraw two_cluster_draw() {
  mcmc::PosteriorDraw d;
  d.coefficients.resize(2, 2);
  d.coefficients << 0.5, 0.1, 0.2, 0.4;
  MatrixXd s1(2, 2), s2(2, 2);
  s1 << 1.0, 0.3, 0.3, 0.8;
  s2 << 4.0, -1.0, -1.0, 2.0;
  d.clusters = {cluster(s1, 10, 0.6, 0.2), cluster(s2, 5, 0.3, 0.5)};
  d.weight_remainder = 0.1;
  d.omega_mean = VectorXd::Constant(2, 0.3);
  d.delta.assign(15, 0);
  for (int t = 10; t < 15; ++t) d.delta[t] = 1;
  return d;
}

}  // namespace

TEST_SUITE("structural") {
  TEST_CASE("impact equals the Cholesky column") {
    const auto d = two_cluster_draw();
    MatrixXd xi = d.clusters[1].sigma;
    xi.diagonal().array() += 0.5;
    // Closed-form 2 x 2 Cholesky.
    const double l11 = std::sqrt(xi(0, 0));
    const double l21 = xi(1, 0) / l11;
    const double l22 = std::sqrt(xi(1, 1) - l21 * l21);
    structural::IrfOptions o;
    o.horizons = 0;
    const MatrixXd r0 = structural::irf_per_cluster(d, 1, 1, o);
    CHECK(r0(0, 0) == doctest::Approx(l11).epsilon(1e-12));
    CHECK(r0(0, 1) == doctest::Approx(l21).epsilon(1e-12));
    o.shock = 1;
    const MatrixXd r1 = structural::irf_per_cluster(d, 1, 1, o);
    CHECK(std::abs(r1(0, 0)) < 1e-12);
    CHECK(r1(0, 1) == doctest::Approx(l22).epsilon(1e-12));

    o.omega = structural::OmegaChoice::posterior_mean;
    xi = d.clusters[1].sigma;
    xi.diagonal().array() += 0.3;
    CHECK(structural::impact_matrix(d, 1, o.omega)(1, 1) ==
          doctest::Approx(std::sqrt(xi(1, 1) - xi(1, 0) * xi(1, 0) / xi(0, 0))));
  }

  TEST_CASE("responses follow the VAR recursion") {
    auto d = two_cluster_draw();
    structural::IrfOptions o;
    o.horizons = 12;
    const MatrixXd r = structural::irf_per_cluster(d, 1, 0, o);
    CHECK(r.rows() == 13);
    for (int h = 1; h <= 12; ++h) {
      const VectorXd next = d.coefficients * r.row(h - 1).transpose();
      CHECK((next - r.row(h).transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
    d.coefficients.setZero();
    const MatrixXd z = structural::irf_per_cluster(d, 1, 0, o);
    CHECK(z.bottomRows(12).norm() == 0.0);
  }

  TEST_CASE("two-lag recursion through the companion form") {
    MatrixXd a(2, 4);
    a << 0.5, 0.1, 0.2, -0.1, 0.0, 0.3, 0.1, 0.2;
    const MatrixXd c = structural::companion(a, 2);
    CHECK(c.rows() == 4);
    CHECK(c.block(2, 0, 2, 2) == MatrixXd::Identity(2, 2));
    VectorXd impact(2);
    impact << 1.0, 0.5;
    const MatrixXd r = structural::propagate(a, 2, impact, 10);
    VectorXd prev2 = VectorXd::Zero(2), prev1 = impact;
    CHECK((r.row(0).transpose() - impact).norm() == 0.0);
    for (int h = 1; h <= 10; ++h) {
      const VectorXd y = a.leftCols(2) * prev1 + a.rightCols(2) * prev2;
      CHECK((y - r.row(h).transpose()).cwiseAbs().maxCoeff() < 1e-12);
      prev2 = prev1;
      prev1 = y;
    }
  }

  TEST_CASE("unit scaling and scale invariance") {
    auto d = two_cluster_draw();
    structural::IrfOptions o;
    o.scale = structural::ShockScale::unit;
    o.horizons = 5;
    const MatrixXd r = structural::irf_per_cluster(d, 1, 1, o);
    CHECK(r(0, 0) == doctest::Approx(1.0));
    // Scaling every covariance by c^2 leaves unit responses unchanged and scales one-sd ones by c.
    auto big = d;
    for (auto& c : big.clusters) {
      c.sigma *= 9.0;
      c.omega_bar *= 9.0;
    }
    CHECK((structural::irf_per_cluster(big, 1, 1, o) - r).cwiseAbs().maxCoeff() < 1e-12);
    o.scale = structural::ShockScale::one_sd;
    CHECK((structural::irf_per_cluster(big, 1, 1, o) - 3.0 * structural::irf_per_cluster(d, 1, 1, o))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }

  TEST_CASE("weighted responses") {
    auto d = two_cluster_draw();
    structural::IrfOptions o;
    o.horizons = 8;
    const MatrixXd r0 = structural::irf_per_cluster(d, 1, 0, o);
    const MatrixXd r1 = structural::irf_per_cluster(d, 1, 1, o);
    CHECK((structural::irf_weighted(d, 1, {1.0, 0.0}, o) - r0).norm() < 1e-12);
    const MatrixXd w = structural::irf_weighted(d, 1, {0.6, 0.3}, o);
    CHECK((w - (2.0 * r0 + r1) / 3.0).norm() < 1e-12);
    // The weighted response lies inside the cluster envelope.
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        CHECK(w(i, j) <= std::max(r0(i, j), r1(i, j)) + 1e-12);
        CHECK(w(i, j) >= std::min(r0(i, j), r1(i, j)) - 1e-12);
      }
    // Opposite cross responses with equal weight cancel.
    auto opp = d;
    opp.clusters[0].sigma << 1.0, 0.5, 0.5, 1.0;
    opp.clusters[1].sigma << 1.0, -0.5, -0.5, 1.0;
    opp.clusters[1].omega_bar = opp.clusters[0].omega_bar;
    const MatrixXd cancel = structural::irf_weighted(opp, 1, {0.5, 0.5}, o);
    CHECK(std::abs(cancel(0, 1)) < 1e-12);
    CHECK(cancel(0, 0) == doctest::Approx(std::sqrt(1.2)));
    d.clusters[1].count = 0;
    CHECK((structural::irf_weighted(d, 1, {0.6, 0.3}, o) - r0).norm() < 1e-12);
    CHECK_THROWS_AS((void)structural::irf_per_cluster(d, 1, 1, o), Error);
    CHECK_THROWS_AS((void)structural::irf_weighted(d, 1, {0.0, 1.0}, o), Error);
  }

  TEST_CASE("relabeling") {
    auto d = two_cluster_draw();
    std::swap(d.clusters[0], d.clusters[1]);
    for (auto& z : d.delta) z = 1 - z;
    const auto r = structural::relabel(d);
    CHECK(r.clusters[0].count == 10);
    CHECK(r.clusters[1].count == 5);
    CHECK(r.delta.front() == 0);
    CHECK(r.delta.back() == 1);
    const auto again = structural::relabel(r);
    CHECK(again.delta == r.delta);
    CHECK(again.clusters[0].sigma == r.clusters[0].sigma);

    // Ties in occupancy fall back to ascending log det.
    auto tie = two_cluster_draw();
    tie.clusters[1].count = 10;
    std::swap(tie.clusters[0], tie.clusters[1]);
    const auto t = structural::relabel(tie);
    CHECK(structural::log_det_spd(t.clusters[0].sigma) < structural::log_det_spd(t.clusters[1].sigma));
  }

  TEST_CASE("log determinant and rolling mean") {
    const double c = 1.7;
    CHECK(structural::log_det_spd(MatrixXd::Constant(1, 1, c * c)) == doctest::Approx(2.0 * std::log(c)));
    MatrixXd s(2, 2);
    s << 2.0, 0.5, 0.5, 1.0;
    CHECK(structural::log_det_spd(s) == doctest::Approx(std::log(1.75)));
    const auto r = structural::rolling_mean({1.0, 2.0, 3.0, 4.0, 5.0}, 2);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(1.5));
    CHECK(r[4] == doctest::Approx(4.5));
    const auto flat = structural::rolling_mean(std::vector<double>(6, 0.3), 4);
    for (double v : flat) CHECK(v == doctest::Approx(0.3));
  }

  TEST_CASE("store-level IRFs and diagnostics") {
    mcmc::DrawStore store;
    store.dimension = 2;
    store.lags = 1;
    store.names = {"a", "b"};
    for (int i = 0; i < 9; ++i) {
      auto d = two_cluster_draw();
      d.coefficients *= 0.1 * i;
      store.draws.push_back(d);
    }
    structural::IrfOptions o;
    o.horizons = 4;
    const auto res = structural::compute_irfs(store, o);
    CHECK(res.weighted.size() == 9);
    CHECK(res.weighted_band.draws == 9);
    CHECK(res.weights[0] == doctest::Approx(0.6));
    for (Eigen::Index j = 0; j < 2; ++j) {
      CHECK(res.weighted_band.lower(2, j) <= res.weighted_band.median(2, j));
      CHECK(res.weighted_band.median(2, j) <= res.weighted_band.upper(2, j));
    }
    // Impact does not depend on A, so the impact band collapses.
    CHECK(res.weighted_band.lower(0, 0) == doctest::Approx(res.weighted_band.upper(0, 0)));

    const auto diag = structural::cluster_diagnostics(structural::relabel_clusters(store), 4);
    CHECK(diag.probability.rows() == 15);
    CHECK(diag.probability(0, 0) == 1.0);
    CHECK(diag.probability(14, 1) == 1.0);
    CHECK(diag.rolling(3, 0) == 1.0);
    CHECK(diag.rolling(11, 1) == doctest::Approx(0.5));
    REQUIRE(diag.log_det_summary.size() == 2);
    CHECK(diag.log_det_summary[0].n == 9);
    CHECK(diag.log_det_summary[0].min == doctest::Approx(diag.log_det_summary[0].max));
    CHECK(diag.log_det_summary[0].median == doctest::Approx(std::log(0.8 - 0.09)));
  }

  TEST_CASE("percentile bands") {
    std::vector<MatrixXd> s;
    for (int i = 0; i <= 100; ++i) s.push_back(MatrixXd::Constant(1, 1, i));
    const auto b = structural::percentile_band(s);
    CHECK(b.lower(0, 0) == doctest::Approx(16.0));
    CHECK(b.median(0, 0) == doctest::Approx(50.0));
    CHECK(b.upper(0, 0) == doctest::Approx(84.0));
  }
}
