#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "levyrisk/evar.hpp"
#include "levyrisk/quadrature.hpp"

namespace levyrisk {

/// Time weight omega on [0, T]: uniform (1/T) or a piecewise-linear table.
class WeightFunction {
public:
    enum class Kind { uniform, table };

    static WeightFunction uniform() { return WeightFunction(); }
    /// Knots (t_k, omega_k) with strictly increasing t_k >= 0 and omega_k >= 0.
    /// The weight is linearly interpolated between knots and zero outside them.
    static WeightFunction table(std::vector<std::pair<double, double>> knots);

    Kind kind() const { return kind_; }
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

    double operator()(double t, double T) const;
    /// Integral of omega over [0, T] (exact for both kinds).
    double mass(double T) const;
    /// Integral of t*omega(t) over [0, T]; T/2 for the uniform kind.
    double time_moment(double T) const;
    /// Knot times inside (0, T); quadrature panels are aligned with them.
    std::vector<double> breakpoints(double T) const;

    /// Throws InvalidArgument unless the knots lie in [0, T] and |mass - 1| <= 1e-9.
    void check_normalized(double T) const;
    /// Table weight rescaled to unit mass on [0, T].
    WeightFunction normalized(double T) const;

    bool operator==(const WeightFunction&) const = default;

private:
    WeightFunction() = default;
    Kind kind_ = Kind::uniform;
    std::vector<std::pair<double, double>> knots_;
};

struct CevarQuery {
    FactorCombination combination;
    double T = 1.0;
    double beta = 0.05;
    WeightFunction weight = WeightFunction::uniform();
    /// Absolute quadrature tolerance; <= 0 selects 1e-9 * (1 + |value|).
    double quad_tol = 0.0;
};

struct CevarOptions {
    EvarOptions evar;
    QuadratureOptions quadrature;
};

/// Integral over [0, T] of EVaR_{1-beta}(X_t) * omega(t).
double cevar(const CevarQuery& query, const CevarOptions& options = {});

struct CurvePoint {
    double t = 0.0;
    double evar = 0.0;
    std::optional<double> s_star;
};

struct EvarCurve {
    std::vector<CurvePoint> points;
    /// s*(t) is nonincreasing along the grid wherever it exists.
    bool s_star_monotone = true;
};

EvarCurve evar_curve(const CevarQuery& query, const std::vector<double>& grid, const EvarOptions& options = {});

}  // namespace levyrisk
