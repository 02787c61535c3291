// types.hpp — shared numeric aliases and error types for the adfs library

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace adfs {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr cplx kI{0.0, 1.0};

// Time argument outside the declared interval of a model.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Malformed arguments: dimension mismatch, wrong list lengths, bad names.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Closed-form expression evaluated outside its domain (e.g. r <= 0).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Integrator produced a density matrix with a clearly negative eigenvalue.
class PositivityViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Successive eigenbases could not be matched continuously.
class GaugeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unitarity lost while integrating a transport unitary.
class StepSizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Matrix dagger(const Matrix& m) { return m.adjoint(); }

inline double hermiticity_error(const Matrix& m) { return (m - m.adjoint()).norm(); }

}  // namespace adfs
