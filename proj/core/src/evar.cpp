#include "levyrisk/evar.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "levyrisk/errors.hpp"
#include "levyrisk/root_finding.hpp"

namespace levyrisk {

std::string_view to_string(Attainment a) {
    switch (a) {
        case Attainment::interior: return "interior";
        case Attainment::limit_at_zero: return "limit_at_zero";
        case Attainment::limit_at_infinity: return "limit_at_infinity";
    }
    return "unknown";
}

void validate(const EvarQuery& query) {
    if (!std::isfinite(query.beta) || !(query.beta > 0.0) || query.beta > 1.0) {
        throw InvalidArgument("beta must lie in (0, 1] (got " + std::to_string(query.beta) + ")");
    }
    if (!std::isfinite(query.t) || query.t < 0.0) {
        throw InvalidArgument("time t must be finite and >= 0 (got " + std::to_string(query.t) + ")");
    }
}

double evar_objective(const EvarQuery& query, double s) {
    validate(query);
    if (!std::isfinite(s) || !(s > 0.0)) throw InvalidArgument("evar_objective requires s > 0");
    return (-query.t * query.combination.exponent(s) - std::log(query.beta)) / s;
}

double stationarity_residual(const EvarQuery& query, double s) {
    return query.t * query.combination.stationarity_term(s) + std::log(query.beta);
}

EvarResult evar(const EvarQuery& query, const EvarOptions& options) {
    validate(query);
    const FactorCombination& combo = query.combination;
    const double t = query.t;
    const double ln_beta = std::log(query.beta);

    EvarResult out;
    if (t == 0.0 || combo.is_null()) {
        // X_t == 0: g(s) = -ln(beta)/s.
        out.value = 0.0;
        out.attained = query.beta < 1.0 ? Attainment::limit_at_infinity : Attainment::limit_at_zero;
        return out;
    }
    if (query.beta == 1.0) {
        // N(0) = 0 and N is nondecreasing, so g is nondecreasing: infimum is the s -> 0+ limit.
        double mean = combo.mean();
        if (!std::isfinite(mean)) {
            throw UnboundedRisk("EVaR at beta = 1 is -infinity: aggregate has infinite mean");
        }
        out.value = -t * mean;
        out.attained = Attainment::limit_at_zero;
        return out;
    }

    const double ftol = options.stationarity_tol * (1.0 + std::abs(ln_beta));
    IncreasingRootOptions ro;
    ro.s_lower = options.s_lower;
    ro.s_upper = options.s_upper;
    ro.ftol = ftol;
    ro.max_iterations = options.max_iterations;
    ro.hint = options.s_hint;

    auto residual = [&](double s) { return t * combo.stationarity_term(s) + ln_beta; };
    auto slope = [&](double s) { return t * combo.stationarity_term_slope(s); };
    IncreasingRootResult root = solve_increasing_root(residual, slope, ro);

    switch (root.location) {
        case RootLocation::above_range: {
            // g is decreasing on the whole search range; the infimum is lim_{s->inf} g = -t * phi'(inf).
            double slope_inf = combo.asymptotic_slope();
            if (!std::isfinite(slope_inf)) {
                throw SolverError("stationarity residual still negative at s = " + std::to_string(options.s_upper));
            }
            out.value = -t * slope_inf;
            out.attained = Attainment::limit_at_infinity;
            out.iterations = root.iterations;
            return out;
        }
        case RootLocation::below_range:
            // N(0+) = ln beta < 0, so a root below s_lower means a badly scaled query.
            throw SolverError("stationary point lies below s = " + std::to_string(options.s_lower));
        case RootLocation::interior: break;
    }

    double s_star = root.s;
    double res = root.residual;
    int iterations = root.iterations;
    if (!(std::abs(res) <= ftol)) {
        // Ill-conditioned residual: fall back to direct minimisation of g in log(s).
        auto g_log = [&](double u) {
            double s = std::exp(u);
            return (-t * combo.exponent(s) - ln_beta) / s;
        };
        MinimumResult m = golden_section_minimize(g_log, std::log(root.bracket_lo), std::log(root.bracket_hi), 1e-15,
                                                  options.max_iterations);
        s_star = std::exp(m.x);
        res = residual(s_star);
        iterations += m.iterations;
        if (!(std::abs(res) <= ftol)) {
            throw SolverError("EVaR stationarity residual " + std::to_string(res) + " exceeds tolerance " +
                              std::to_string(ftol));
        }
    }
    out.s_star = s_star;
    out.value = (-t * combo.exponent(s_star) - ln_beta) / s_star;
    out.attained = Attainment::interior;
    out.iterations = iterations;
    out.residual = res;
    return out;
}

double evar_closed_form_brownian(double mu, double sigma, double t, double beta) {
    if (!(sigma > 0.0) || !(t >= 0.0) || !(beta > 0.0 && beta <= 1.0)) {
        throw InvalidArgument("evar_closed_form_brownian: require sigma > 0, t >= 0, beta in (0,1]");
    }
    return -mu * t + sigma * std::sqrt(-2.0 * t * std::log(beta));
}

DualCheck dual_feasibility_check(const EvarQuery& query, double s, double tol) {
    validate(query);
    if (!std::isfinite(s) || !(s > 0.0)) throw InvalidArgument("dual_feasibility_check requires s > 0");
    DualCheck out;
    // Under the tilt, E_f[X_t] = t*phi'(s) and E[f ln f] = -s E_f[X_t] + t phi(s) = t*h(s).
    out.entropy = query.t * query.combination.stationarity_term(s);
    out.bound = -std::log(query.beta);
    out.candidate = -query.t * query.combination.exponent_deriv(s);
    out.evar_value = evar(query).value;
    bool feasible = out.entropy <= out.bound;
    out.ok = !feasible || out.candidate <= out.evar_value + tol * (1.0 + std::abs(out.evar_value));
    return out;
}

}  // namespace levyrisk
