#include "levyrisk/root_finding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "levyrisk/errors.hpp"

namespace levyrisk {

RootResult safeguarded_newton(const ScalarFn& f, const ScalarFn& df, double lo, double hi, double ftol,
                              int max_iterations, std::optional<double> start, double xtol) {
    if (!(lo < hi)) throw InvalidArgument("safeguarded_newton: empty bracket");
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return {lo, 0.0, 0, true};
    if (fhi == 0.0) return {hi, 0.0, 0, true};
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw SolverError("safeguarded_newton: no sign change on [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    }
    // Orient so that f(neg) < 0 < f(pos).
    double neg = flo < 0.0 ? lo : hi;
    double pos = flo < 0.0 ? hi : lo;

    double x = start ? std::clamp(*start, std::min(lo, hi), std::max(lo, hi)) : 0.5 * (lo + hi);
    double dx_old = std::abs(hi - lo);
    double dx = dx_old;

    RootResult best{x, std::abs(flo) < std::abs(fhi) ? flo : fhi, 0, false};
    best.x = std::abs(flo) < std::abs(fhi) ? lo : hi;

    for (int it = 1; it <= max_iterations; ++it) {
        double fx = f(x);
        if (std::abs(fx) < std::abs(best.residual)) {
            best.x = x;
            best.residual = fx;
        }
        best.iterations = it;
        if (fx == 0.0) {
            return {x, 0.0, it, true};
        }
        if (fx < 0.0) {
            neg = x;
        } else {
            pos = x;
        }
        double dfx = df(x);
        double a = std::min(neg, pos);
        double b = std::max(neg, pos);

        double next = x - fx / dfx;
        bool newton_ok = std::isfinite(next) && next > a && next < b && std::abs(2.0 * fx) <= std::abs(dx_old * dfx);
        dx_old = dx;
        if (newton_ok) {
            dx = next - x;
        } else {
            next = 0.5 * (a + b);
            dx = next - x;
        }
        double scale = std::max(1.0, std::abs(x));
        if (std::abs(fx) <= ftol && std::abs(dx) <= xtol * scale) {
            return {x, fx, it, true};
        }
        if (b - a <= 2.0 * xtol * scale || next == x) {
            best.converged = std::abs(best.residual) <= ftol;
            return best;
        }
        x = next;
    }
    best.converged = std::abs(best.residual) <= ftol;
    return best;
}

MinimumResult golden_section_minimize(const ScalarFn& g, double lo, double hi, double xtol, int max_iterations) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double gc = g(c);
    double gd = g(d);
    int it = 0;
    while (it < max_iterations && std::abs(b - a) > xtol * std::max(1.0, std::abs(c) + std::abs(d))) {
        ++it;
        if (gc < gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    return gc < gd ? MinimumResult{c, gc, it} : MinimumResult{d, gd, it};
}

IncreasingRootResult solve_increasing_root(const ScalarFn& residual, const ScalarFn& slope,
                                           const IncreasingRootOptions& options) {
    if (!(options.s_lower > 0.0 && options.s_lower < options.s_upper && options.growth > 1.0)) {
        throw InvalidArgument("solve_increasing_root: invalid search range");
    }
    double s0 = 1.0;
    if (options.hint && std::isfinite(*options.hint) && *options.hint > 0.0) s0 = *options.hint;
    s0 = std::clamp(s0, options.s_lower, options.s_upper);

    IncreasingRootResult out;
    int evaluations = 1;
    double n0 = residual(s0);
    if (std::isnan(n0)) throw SolverError("stationarity residual is NaN at s = " + std::to_string(s0));

    double lo = s0;
    double hi = s0;
    if (n0 == 0.0) {
        out.s = s0;
        out.iterations = evaluations;
        out.converged = true;
        out.bracket_lo = out.bracket_hi = s0;
        return out;
    }
    if (n0 < 0.0) {
        double s = s0;
        double ns = n0;
        while (ns < 0.0) {
            lo = s;
            if (s >= options.s_upper) {
                out.location = RootLocation::above_range;
                out.s = s;
                out.residual = ns;
                out.iterations = evaluations;
                return out;
            }
            s = std::min(s * options.growth, options.s_upper);
            ns = residual(s);
            ++evaluations;
        }
        hi = s;
    } else {
        double s = s0;
        double ns = n0;
        while (ns >= 0.0) {
            hi = s;
            if (s <= options.s_lower) {
                out.location = RootLocation::below_range;
                out.s = s;
                out.residual = ns;
                out.iterations = evaluations;
                return out;
            }
            s = std::max(s / options.growth, options.s_lower);
            ns = residual(s);
            ++evaluations;
        }
        lo = s;
    }

    auto f = [&](double u) { return residual(std::exp(u)); };
    auto df = [&](double u) {
        double s = std::exp(u);
        return s * slope(s);
    };
    RootResult r = safeguarded_newton(f, df, std::log(lo), std::log(hi), options.ftol, options.max_iterations);
    out.location = RootLocation::interior;
    out.s = std::exp(r.x);
    out.residual = r.residual;
    out.iterations = evaluations + r.iterations;
    out.converged = r.converged;
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    return out;
}

}  // namespace levyrisk
