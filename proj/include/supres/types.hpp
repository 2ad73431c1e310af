#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace supres {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Invalid model inputs: bad sizes, violated preconditions, malformed configs.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Minimum separation (and everything derived from it) needs at least two points.
class UndefinedSeparation : public ValidationError {
public:
    UndefinedSeparation()
        : ValidationError("minimum separation is undefined for a single point") {}
};

// A numerical estimator could not produce an answer for otherwise valid input.
// code() is a stable machine-readable tag, e.g. "shift_invariance_degenerate".
class EstimatorError : public std::runtime_error {
public:
    EstimatorError(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

} // namespace supres
