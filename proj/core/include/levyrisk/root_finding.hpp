#pragma once

#include <functional>
#include <optional>

namespace levyrisk {

using ScalarFn = std::function<double(double)>;

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Newton iteration safeguarded by bisection on a sign-change bracket [lo, hi].
///
/// Stops once |f| <= ftol and the last step is below xtol*max(1,|x|), or when
/// the bracket collapses. Never leaves the bracket.
RootResult safeguarded_newton(const ScalarFn& f, const ScalarFn& df, double lo, double hi, double ftol,
                              int max_iterations, std::optional<double> start = std::nullopt,
                              double xtol = 1e-15);

/// Golden-section minimisation of a unimodal g on [lo, hi].
struct MinimumResult {
    double x = 0.0;
    double value = 0.0;
    int iterations = 0;
};
MinimumResult golden_section_minimize(const ScalarFn& g, double lo, double hi, double xtol, int max_iterations);

enum class RootLocation { interior, below_range, above_range };

struct IncreasingRootOptions {
    double s_lower = 1e-100;
    double s_upper = 1e100;
    double growth = 10.0;
    double ftol = 1e-10;
    int max_iterations = 200;
    std::optional<double> hint;
};

struct IncreasingRootResult {
    RootLocation location = RootLocation::interior;
    double s = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

/// Root of a nondecreasing function N on (0, inf), searched geometrically from the
/// hint (default 1) and refined by safeguarded Newton in log(s).
///
/// below_range: N >= 0 already at s_lower. above_range: N < 0 up to s_upper.
IncreasingRootResult solve_increasing_root(const ScalarFn& residual, const ScalarFn& slope,
                                           const IncreasingRootOptions& options);

}  // namespace levyrisk
