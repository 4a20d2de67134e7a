#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace gmmsq {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Invalid user-supplied parameters (CLI exit code 2).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A construction step failed, e.g. LP infeasible after retries (exit code 3).
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A verification gate failed (exit code 4).
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File or schema problems (exit code 5).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gmmsq
