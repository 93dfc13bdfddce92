#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace levyrisk {

/// Rejected input: parameter outside its admissible range, dimension mismatch, etc.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The stationarity equation has no positive root; the infimum sits on a boundary.
class NoStationaryPoint : public std::runtime_error {
public:
    NoStationaryPoint(const std::string& what, std::string boundary)
        : std::runtime_error(what), boundary_(std::move(boundary)) {}

    /// "limit_at_zero" or "limit_at_infinity".
    const std::string& boundary() const noexcept { return boundary_; }

private:
    std::string boundary_;
};

/// The infimum defining the risk value is -infinity (e.g. infinite-mean claims at beta = 1).
class UnboundedRisk : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A 1-D solver failed to meet its tolerance within the iteration budget.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature ran out of evaluations. Carries the partial estimate.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, std::vector<double> partial, double error_estimate)
        : std::runtime_error(what), partial_(std::move(partial)), error_estimate_(error_estimate) {}

    const std::vector<double>& partial_estimate() const noexcept { return partial_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    std::vector<double> partial_;
    double error_estimate_;
};

}  // namespace levyrisk
