#include <cmath>

#include "doctest.h"
#include "dpmvar/distributions.hpp"
#include "dpmvar/priors.hpp"

using namespace dpmvar;

TEST_SUITE("priors") {
  TEST_CASE("defaults are valid") {
    for (int m : {1, 4, 20}) {
      const PriorConfig p = default_priors(m);
      CHECK(p.dimension() == m);
      CHECK(p.c0 > m - 1);
      CHECK_NOTHROW(p.validate());
    }
    PriorConfig p = default_priors(3);
    p.c0 = 1.5;
    CHECK_THROWS_AS(p.validate(), Error);
    p = default_priors(3);
    p.alpha_rate = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    CHECK_THROWS_AS((void)default_priors(0), Error);
  }

  TEST_CASE("sigma0 recovers the AR residual variance") {
    RngHandle rng(21, 1);
    Dataset d;
    const long t = 20000;
    d.observations.resize(t, 2);
    double a = 0.0, b = 0.0;
    for (long i = 0; i < t; ++i) {
      a = 1.0 + 0.6 * a + dist::normal(rng, 0.0, 2.0);
      b = -0.2 * b + dist::normal(rng, 0.0, 0.5);
      d.observations(i, 0) = a;
      d.observations(i, 1) = b;
    }
    d.names = {"a", "b"};
    const VectorXd s = estimate_sigma0(d, 1);
    CHECK(s[0] == doctest::Approx(4.0).epsilon(0.05));
    CHECK(s[1] == doctest::Approx(0.25).epsilon(0.05));

    d.observations.col(1).setConstant(3.0);
    try {
      (void)estimate_sigma0(d, 1);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("b") != std::string::npos);
    }
  }

  TEST_CASE("new cluster prior probability") {
    CHECK(new_cluster_prior_prob(0.5, 250) == doctest::Approx(0.5 / 249.5));
    CHECK(new_cluster_prior_prob(0.5, 250) == doctest::Approx(0.002004).epsilon(1e-3));
    CHECK(new_cluster_prior_prob(3.0, 1) == 1.0);
    CHECK_THROWS_AS((void)new_cluster_prior_prob(1.0, 0), Error);
  }
}
