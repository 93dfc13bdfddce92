#pragma once

#include <functional>
#include <span>
#include <vector>

namespace levyrisk {

/// Vector-valued integrand; every call must return the same number of components.
using VectorIntegrand = std::function<std::vector<double>(double)>;

struct QuadratureOptions {
    /// Absolute tolerance. When <= 0 it is set to rel_tol * (1 + max|coarse estimate|).
    double abs_tol = 0.0;
    double rel_tol = 1e-9;
    int max_evaluations = 400000;
    int max_depth = 60;
    int initial_panels = 8;
    /// t = T * u^grading_power; 2 turns sqrt(t) behaviour near 0 into a polynomial.
    double grading_power = 2.0;
};

struct QuadratureResult {
    std::vector<double> value;
    double error_estimate = 0.0;
    int evaluations = 0;
};

/// Adaptive Simpson on [0, T] over the graded variable u in [0, 1].
///
/// Breakpoints (times in (0, T)) become panel edges so kinks in the integrand are
/// never straddled. Intervals are processed depth-first left to right, so the
/// summation order is fixed. Throws QuadratureError when the evaluation budget runs out.
QuadratureResult integrate_graded(const VectorIntegrand& f, double T, std::span<const double> breakpoints,
                                  const QuadratureOptions& options = {});

}  // namespace levyrisk
