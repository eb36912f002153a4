#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace osqm {

using cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using VecR = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Bad input: config values, preconditions, shape mismatches. CLI exit code 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Something went wrong numerically mid-run. CLI exit code 3.
struct NumericalAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Clipping and other silent repairs go through here so they can be audited.
void audit(const std::string& what, double magnitude);
long audit_count();

}  // namespace osqm
