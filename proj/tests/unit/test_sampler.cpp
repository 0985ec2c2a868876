#include <algorithm>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "dpmvar/distributions.hpp"
#include "dpmvar/mcmc.hpp"

using namespace dpmvar;

namespace {

Dataset regime_data(long t, double gap, std::uint64_t seed) {
  RngHandle rng(seed, 3);
  Dataset d;
  d.observations.resize(t, 2);
  VectorXd prev = VectorXd::Zero(2);
  for (long i = 0; i < t; ++i) {
    const double shift = rng.uniform() < 0.5 ? 0.0 : gap;
    VectorXd e(2);
    e << shift + 0.3 * dist::normal(rng), -shift + 0.3 * dist::normal(rng);
    prev = 0.2 * prev + e;
    d.observations.row(i) = prev.transpose();
  }
  d.names = {"y1", "y2"};
  return d;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("dpmvar_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("sampler") {
  TEST_CASE("sweep plan bookkeeping") {
    const mcmc::SweepPlan plan{20000, 10000, 1, false};
    CHECK(plan.retained() == 10000);
    const mcmc::SweepPlan thin{100, 20, 4, false};
    CHECK(thin.retained() == 20);
    CHECK_FALSE(thin.keeps(19));
    CHECK(thin.keeps(23));
    mcmc::SweepPlan bad{10, 20, 1, false};
    CHECK_THROWS_AS(bad.validate(), Error);
  }

  TEST_CASE("retains the planned number of draws and respects invariants") {
    const Dataset d = regime_data(80, 0.0, 1);
    ModelConfig model;
    PriorConfig priors = default_priors(2);
    priors.sigma0_diag = estimate_sigma0(d, 1);
    long calls = 0;
    const auto store = mcmc::run_sweeps(d, model, priors, {300, 100, 1, true}, RngHandle(5, 0), {},
                                        [&](long, const SamplerState& s) {
                                          s.check_invariants(79);
                                          ++calls;
                                        });
    CHECK(calls == 300);
    CHECK(store.size() == 200);
    CHECK(store.draws.front().delta.size() == 79);
    CHECK(store.history.rows() == 1);
    for (const auto& dr : store.draws) {
      double w = dr.weight_remainder;
      for (const auto& c : dr.clusters) w += c.weight;
      CHECK(w == doctest::Approx(1.0));
    }
  }

  TEST_CASE("two well separated regimes give two clusters") {
    const Dataset d = regime_data(200, 3.0, 2);
    ModelConfig model;
    PriorConfig priors = default_priors(2);
    priors.sigma0_diag = estimate_sigma0(d, 1);
    const auto store = mcmc::run_sweeps(d, model, priors, {1500, 500, 1, false}, RngHandle(6, 0));
    auto trace = store.effective_cluster_trace();
    std::sort(trace.begin(), trace.end());
    CHECK(trace[trace.size() / 2] == 2.0);
  }

  TEST_CASE("single-cluster benchmark stays at one cluster") {
    const Dataset d = regime_data(60, 3.0, 3);
    ModelConfig model;
    model.max_clusters = 1;
    PriorConfig priors = default_priors(2);
    priors.sigma0_diag = estimate_sigma0(d, 1);
    const auto store = mcmc::run_sweeps(d, model, priors, {200, 100, 1, false}, RngHandle(6, 0));
    for (double g : store.effective_cluster_trace()) CHECK(g == 1.0);
  }

  TEST_CASE("determinism and thread invariance") {
    const Dataset d = regime_data(60, 1.0, 4);
    ModelConfig model;
    model.stochastic_volatility = true;
    PriorConfig priors = default_priors(2);
    priors.sigma0_diag = estimate_sigma0(d, 1);
    mcmc::SamplerOptions one, two;
    two.threads = 2;
    const auto a = mcmc::run_sweeps(d, model, priors, {60, 20, 1, true}, RngHandle(7, 0), one);
    const auto b = mcmc::run_sweeps(d, model, priors, {60, 20, 1, true}, RngHandle(7, 0), two);
    const auto c = mcmc::run_sweeps(d, model, priors, {60, 20, 1, true}, RngHandle(8, 0), one);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.draws[i].coefficients == b.draws[i].coefficients);
      CHECK(a.draws[i].log_vol == b.draws[i].log_vol);
      CHECK(a.draws[i].delta == b.draws[i].delta);
    }
    CHECK(a.draws.back().coefficients != c.draws.back().coefficients);
  }

  TEST_CASE("draw store round trip") {
    const Dataset d = regime_data(50, 1.0, 5);
    ModelConfig model;
    model.stochastic_volatility = true;
    PriorConfig priors = default_priors(2);
    priors.sigma0_diag = estimate_sigma0(d, 1);
    const auto store = mcmc::run_sweeps(d, model, priors, {40, 10, 2, true}, RngHandle(9, 0));
    const auto dir = temp_dir("roundtrip");
    store.write(dir.string());
    const auto back = mcmc::DrawStore::read(dir.string());
    CHECK(back.size() == store.size());
    CHECK(back.dimension == 2);
    CHECK(back.stochastic_volatility);
    CHECK(back.names == store.names);
    CHECK(back.history == store.history);
    CHECK(back.sigma0_diag == store.sigma0_diag);
    for (std::size_t i = 0; i < store.size(); ++i) {
      const auto& x = store.draws[i];
      const auto& y = back.draws[i];
      CHECK(x.coefficients == y.coefficients);
      CHECK(x.alpha == y.alpha);
      CHECK(x.delta == y.delta);
      CHECK(x.log_vol == y.log_vol);
      REQUIRE(x.clusters.size() == y.clusters.size());
      for (std::size_t k = 0; k < x.clusters.size(); ++k) {
        CHECK(x.clusters[k].sigma == y.clusters[k].sigma);
        CHECK(x.clusters[k].count == y.clusters[k].count);
      }
      REQUIRE(x.sv.size() == y.sv.size());
      CHECK(x.sv[0].rho == y.sv[0].rho);
    }
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS((void)mcmc::DrawStore::read(dir.string()), Error);
  }
}
