#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace til {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// n above the dense cap
struct DimensionError : Error {
  using Error::Error;
};

// precondition on values (negative weights, bad index, ...)
struct DomainError : Error {
  using Error::Error;
};

// solver / step-size failure
struct NumericalError : Error {
  using Error::Error;
};

// malformed input files
struct ParseError : Error {
  using Error::Error;
};

// Dense-storage cap. 24 unless TIL_MAX_N is set.
int max_dimension();

// Throws DimensionError when n is outside [1, cap]. `cap` <= 0 means max_dimension().
void check_dimension(int n, int cap = 0);

}  // namespace til
