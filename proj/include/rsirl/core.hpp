#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace rsirl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Absolute tolerance for simplex membership and halfspace tests.
inline constexpr double kGeomTol = 1e-9;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A risk envelope (or a cut of one) has no points.
class EmptyEnvelope : public Error {
 public:
  using Error::Error;
};

/// A demonstration admits no multiplier consistent with stationarity.
class InconsistentDemonstration : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown inside a solver (not an infeasible/unbounded status).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

inline void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(want) +
                            ", got " + std::to_string(got));
  }
}

}  // namespace rsirl
