#include "levyrisk/cevar.hpp"

#include <cmath>
#include <string>

#include "levyrisk/errors.hpp"

namespace levyrisk {

WeightFunction WeightFunction::table(std::vector<std::pair<double, double>> knots) {
    if (knots.size() < 2) throw InvalidArgument("table weight needs at least two knots");
    for (std::size_t k = 0; k < knots.size(); ++k) {
        const auto [t, w] = knots[k];
        if (!std::isfinite(t) || !std::isfinite(w)) throw InvalidArgument("table weight knots must be finite");
        if (t < 0.0) throw InvalidArgument("table weight knot times must be >= 0");
        if (w < 0.0) throw InvalidArgument("table weight values must be >= 0");
        if (k > 0 && !(t > knots[k - 1].first)) throw InvalidArgument("table weight knot times must increase");
    }
    WeightFunction out;
    out.kind_ = Kind::table;
    out.knots_ = std::move(knots);
    return out;
}

double WeightFunction::operator()(double t, double T) const {
    if (kind_ == Kind::uniform) return 1.0 / T;
    if (t < knots_.front().first || t > knots_.back().first) return 0.0;
    for (std::size_t k = 1; k < knots_.size(); ++k) {
        if (t <= knots_[k].first) {
            const auto [t0, w0] = knots_[k - 1];
            const auto [t1, w1] = knots_[k];
            return w0 + (w1 - w0) * (t - t0) / (t1 - t0);
        }
    }
    return knots_.back().second;
}

double WeightFunction::mass(double T) const {
    if (kind_ == Kind::uniform) return 1.0;
    double m = 0.0;
    for (std::size_t k = 1; k < knots_.size(); ++k) {
        const auto [t0, w0] = knots_[k - 1];
        const auto [t1, w1] = knots_[k];
        if (t1 > T) break;
        m += 0.5 * (t1 - t0) * (w0 + w1);
    }
    return m;
}

double WeightFunction::time_moment(double T) const {
    if (kind_ == Kind::uniform) return 0.5 * T;
    double m = 0.0;
    for (std::size_t k = 1; k < knots_.size(); ++k) {
        const auto [t0, w0] = knots_[k - 1];
        const auto [t1, w1] = knots_[k];
        if (t1 > T) break;
        m += (t1 - t0) * (w0 * (2.0 * t0 + t1) + w1 * (t0 + 2.0 * t1)) / 6.0;
    }
    return m;
}

std::vector<double> WeightFunction::breakpoints(double T) const {
    std::vector<double> out;
    for (const auto& [t, w] : knots_) {
        if (t > 0.0 && t < T) out.push_back(t);
    }
    return out;
}

void WeightFunction::check_normalized(double T) const {
    if (kind_ == Kind::uniform) return;
    if (knots_.back().first > T) {
        throw InvalidArgument("table weight knot at t = " + std::to_string(knots_.back().first) +
                              " lies beyond the horizon T = " + std::to_string(T));
    }
    const double m = mass(T);
    if (std::abs(m - 1.0) > 1e-9) {
        throw InvalidArgument("weight function is not normalised: integral over [0, T] is " + std::to_string(m));
    }
}

WeightFunction WeightFunction::normalized(double T) const {
    if (kind_ == Kind::uniform) return *this;
    const double m = mass(T);
    if (!(m > 0.0)) throw InvalidArgument("cannot normalise a weight with zero mass");
    std::vector<std::pair<double, double>> k = knots_;
    for (auto& [t, w] : k) w /= m;
    return table(std::move(k));
}

double cevar(const CevarQuery& query, const CevarOptions& options) {
    if (!std::isfinite(query.T) || !(query.T > 0.0)) throw InvalidArgument("CEVaR horizon T must be > 0");
    validate(EvarQuery{query.combination, 0.0, query.beta});
    query.weight.check_normalized(query.T);

    EvarOptions eo = options.evar;
    QuadratureOptions qo = options.quadrature;
    if (query.quad_tol > 0.0) qo.abs_tol = query.quad_tol;

    std::optional<double> last_s;
    auto integrand = [&](double t) -> std::vector<double> {
        const double w = query.weight(t, query.T);
        if (w == 0.0 && t > 0.0) return {0.0};
        eo.s_hint = last_s;
        EvarResult r = evar(EvarQuery{query.combination, t, query.beta}, eo);
        if (r.s_star) last_s = r.s_star;
        return {r.value * w};
    };
    const std::vector<double> bps = query.weight.breakpoints(query.T);
    return integrate_graded(integrand, query.T, bps, qo).value.front();
}

EvarCurve evar_curve(const CevarQuery& query, const std::vector<double>& grid, const EvarOptions& options) {
    EvarCurve curve;
    EvarOptions eo = options;
    std::optional<double> prev_s;
    double prev_t = -1.0;
    for (double t : grid) {
        if (!(t >= 0.0 && t <= query.T)) {
            throw InvalidArgument("curve grid point " + std::to_string(t) + " outside [0, T]");
        }
        if (prev_s) eo.s_hint = prev_s;
        EvarResult r = evar(EvarQuery{query.combination, t, query.beta}, eo);
        curve.points.push_back({t, r.value, r.s_star});
        if (r.s_star) {
            if (prev_s && t > prev_t && *r.s_star > *prev_s * (1.0 + 1e-12)) curve.s_star_monotone = false;
            prev_s = r.s_star;
            prev_t = t;
        }
    }
    return curve;
}

}  // namespace levyrisk
