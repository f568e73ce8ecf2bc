#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace pdsg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Raised when a formula's denominator vanishes or changes sign, e.g. the
/// optimized-weight update with a nonpositive normalizer.
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a certificate quantity is requested before it is defined
/// (for instance before the first feasible iterate).
class UndefinedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pdsg
