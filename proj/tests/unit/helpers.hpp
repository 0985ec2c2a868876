#pragma once

#include <cmath>
#include <vector>

#include "doctest.h"

namespace testutil {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
  double se_mean = 0.0;
  double se_var = 0.0;
};

inline Moments moments(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  Moments m;
  for (double v : x) m.mean += v / n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - m.mean;
    m2 += d * d / n;
    m4 += d * d * d * d / n;
  }
  m.var = m2 * n / (n - 1.0);
  m.se_mean = std::sqrt(m.var / n);
  m.se_var = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
  return m;
}

inline double skewness(const std::vector<double>& x) {
  const Moments m = moments(x);
  double s = 0.0;
  for (double v : x) s += std::pow(v - m.mean, 3);
  return s / static_cast<double>(x.size()) / std::pow(m.var, 1.5);
}

inline double excess_kurtosis(const std::vector<double>& x) {
  const Moments m = moments(x);
  double s = 0.0;
  for (double v : x) s += std::pow(v - m.mean, 4);
  return s / static_cast<double>(x.size()) / (m.var * m.var) - 3.0;
}

// |estimate - target| within k standard errors.
#define CHECK_WITHIN_SE(estimate, target, se, k) CHECK(std::abs((estimate) - (target)) <= (k) * (se))

}  // namespace testutil
