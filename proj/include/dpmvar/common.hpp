#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace dpmvar {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a matrix expected to be symmetric positive definite is not.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

inline constexpr double kLog2Pi = 1.8378770664093454836;

}  // namespace dpmvar
