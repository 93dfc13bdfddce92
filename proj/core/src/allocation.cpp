#include "levyrisk/allocation.hpp"

#include <cmath>
#include <string>

#include "levyrisk/errors.hpp"

namespace levyrisk {

namespace {

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

}  // namespace

FactorPortfolio::FactorPortfolio(std::vector<std::vector<double>> exposures, std::vector<LevyFactor> factors,
                                 std::vector<double> premiums, double T, double beta, WeightFunction weight)
    : exposures_(std::move(exposures)),
      factors_(std::move(factors)),
      premiums_(std::move(premiums)),
      T_(T),
      beta_(beta),
      weight_(std::move(weight)) {
    const std::size_t n = exposures_.size();
    const std::size_t m = factors_.size();
    if (n == 0) throw InvalidArgument("portfolio needs at least one department");
    if (m == 0) throw InvalidArgument("portfolio needs at least one factor");
    for (std::size_t i = 0; i < n; ++i) {
        if (exposures_[i].size() != m) {
            throw InvalidArgument("exposure row " + std::to_string(i) + " has " +
                                  std::to_string(exposures_[i].size()) + " entries but there are " +
                                  std::to_string(m) + " factors");
        }
        for (std::size_t j = 0; j < m; ++j) {
            const double a = exposures_[i][j];
            if (!std::isfinite(a) || a < 0.0) {
                throw InvalidArgument("exposure a[" + std::to_string(i) + "][" + std::to_string(j) +
                                      "] must be finite and >= 0");
            }
        }
    }
    if (premiums_.size() != n) {
        throw InvalidArgument("premium count " + std::to_string(premiums_.size()) +
                              " does not match department count " + std::to_string(n));
    }
    for (double c : premiums_) {
        if (!std::isfinite(c) || c < 0.0) throw InvalidArgument("premium rates must be finite and >= 0");
    }
    const std::vector<double> D = column_sums();
    for (std::size_t j = 0; j < m; ++j) {
        if (!(D[j] > 0.0)) throw InvalidArgument("factor " + std::to_string(j) + " has no exposure (zero column)");
    }
    if (!std::isfinite(T_) || !(T_ > 0.0)) throw InvalidArgument("horizon T must be > 0");
    if (!std::isfinite(beta_) || !(beta_ > 0.0 && beta_ < 1.0)) {
        throw InvalidArgument("portfolio beta must lie in (0, 1) (got " + std::to_string(beta_) + ")");
    }
    weight_.check_normalized(T_);
}

std::vector<double> FactorPortfolio::column_sums() const { return loadings(ones(departments())); }

std::vector<double> FactorPortfolio::loadings(const std::vector<double>& u) const {
    if (u.size() != departments()) {
        throw InvalidArgument("department weight vector has " + std::to_string(u.size()) + " entries, expected " +
                              std::to_string(departments()));
    }
    std::vector<double> d(factor_count(), 0.0);
    for (std::size_t k = 0; k < departments(); ++k) {
        if (!std::isfinite(u[k]) || u[k] < 0.0) throw InvalidArgument("department weights must be >= 0");
        for (std::size_t j = 0; j < factor_count(); ++j) d[j] += u[k] * exposures_[k][j];
    }
    return d;
}

FactorCombination FactorPortfolio::combination(const std::vector<double>& u) const {
    return {factors_, loadings(u)};
}

FactorCombination FactorPortfolio::aggregate() const { return combination(ones(departments())); }

FactorCombination FactorPortfolio::department(std::size_t i) const {
    if (i >= departments()) throw InvalidArgument("department index out of range");
    return {factors_, exposures_[i]};
}

FactorPortfolio FactorPortfolio::scaled(double lambda) const {
    if (!std::isfinite(lambda) || !(lambda > 0.0)) throw InvalidArgument("scale factor must be > 0");
    auto rows = exposures_;
    for (auto& row : rows) {
        for (double& a : row) a *= lambda;
    }
    auto c = premiums_;
    for (double& x : c) x *= lambda;
    return {std::move(rows), factors_, std::move(c), T_, beta_, weight_};
}

double solve_s_star(const FactorPortfolio& portfolio, const std::vector<double>& u, double t,
                    const EvarOptions& options) {
    if (!std::isfinite(t) || !(t > 0.0)) throw InvalidArgument("solve_s_star requires t > 0");
    FactorCombination combo = portfolio.combination(u);
    if (combo.is_null()) throw InvalidArgument("solve_s_star: all loadings d_j are zero");
    EvarResult r = evar(EvarQuery{std::move(combo), t, portfolio.beta()}, options);
    if (r.attained != Attainment::interior) {
        throw NoStationaryPoint("no positive root of the stationarity equation at t = " + std::to_string(t) +
                                    " (infimum is the " + std::string(to_string(r.attained)) + ")",
                                std::string(to_string(r.attained)));
    }
    return *r.s_star;
}

EulerContributions euler_contributions(const FactorPortfolio& portfolio, double t, const EvarOptions& options) {
    if (!std::isfinite(t) || t < 0.0) throw InvalidArgument("euler_contributions requires t >= 0");
    const std::size_t n = portfolio.departments();
    const std::size_t m = portfolio.factor_count();
    EulerContributions out;
    out.K.assign(n, 0.0);
    out.aggregate = evar(EvarQuery{portfolio.aggregate(), t, portfolio.beta()}, options);
    if (t == 0.0) return out;

    const std::vector<double> D = portfolio.column_sums();
    std::vector<double> slope(m);
    for (std::size_t j = 0; j < m; ++j) {
        const LevyFactor& f = portfolio.factors()[j];
        switch (out.aggregate.attained) {
            case Attainment::interior: slope[j] = f.derivative(*out.aggregate.s_star * D[j], 1); break;
            case Attainment::limit_at_infinity: slope[j] = f.asymptotic_slope(); break;
            case Attainment::limit_at_zero: slope[j] = f.mean(); break;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double k = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double a = portfolio.exposure(i, j);
            if (a != 0.0) k += a * slope[j];
        }
        out.K[i] = -t * k;
    }
    return out;
}

AllocationReport allocate(const FactorPortfolio& portfolio, const AllocationOptions& options) {
    const std::size_t n = portfolio.departments();
    const double T = portfolio.horizon();
    const WeightFunction& weight = portfolio.weight();

    EvarOptions eo = options.evar;
    std::optional<double> last_s;
    auto integrand = [&](double t) -> std::vector<double> {
        const double w = weight(t, T);
        if (t == 0.0 || w == 0.0) return std::vector<double>(n, 0.0);
        eo.s_hint = last_s;
        EulerContributions c = euler_contributions(portfolio, t, eo);
        if (c.aggregate.s_star) last_s = c.aggregate.s_star;
        for (double& k : c.K) k *= w;
        return c.K;
    };
    const std::vector<double> bps = weight.breakpoints(T);
    QuadratureResult q = integrate_graded(integrand, T, bps, options.quadrature);

    AllocationReport report;
    report.premium_moment = weight.time_moment(T);
    report.L.resize(n);
    double sum_l = 0.0;
    double sum_c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        report.L[i] = q.value[i] + portfolio.premiums()[i] * report.premium_moment;
        sum_l += report.L[i];
        sum_c += portfolio.premiums()[i];
    }
    report.quadrature_evaluations = q.evaluations;

    CevarOptions co{options.evar, options.quadrature};
    report.claims_cevar = cevar(CevarQuery{portfolio.aggregate(), T, portfolio.beta(), weight, 0.0}, co);
    report.total_cevar = report.claims_cevar + sum_c * report.premium_moment;
    report.full_allocation_gap = sum_l - report.total_cevar;

    const int points = std::max(options.curve_points, 2);
    std::optional<double> hint;
    for (int k = 0; k < points; ++k) {
        const double t = T * k / (points - 1);
        EvarOptions po = options.evar;
        po.s_hint = hint;
        EulerContributions c = euler_contributions(portfolio, t, po);
        if (c.aggregate.s_star) hint = c.aggregate.s_star;
        report.K_curve.push_back({t, c.aggregate.s_star, std::move(c.K)});
    }
    return report;
}

DirectionalDerivative directional_derivative_check(const FactorPortfolio& portfolio, std::size_t i, double t,
                                                   double epsilon, const EvarOptions& options) {
    if (i >= portfolio.departments()) throw InvalidArgument("department index out of range");
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
    DirectionalDerivative out;
    EulerContributions c = euler_contributions(portfolio, t, options);
    out.analytic = c.K[i];
    std::vector<double> u(portfolio.departments(), 1.0);
    u[i] += epsilon;
    const double bumped = evar(EvarQuery{portfolio.combination(u), t, portfolio.beta()}, options).value;
    out.finite_diff = (bumped - c.aggregate.value) / epsilon;
    return out;
}

DiversificationCheck diversification_check(const FactorPortfolio& portfolio, const std::vector<double>& h, double t,
                                           const EvarOptions& options) {
    DiversificationCheck out;
    out.rhs = evar(EvarQuery{portfolio.combination(h), t, portfolio.beta()}, options).value;
    EulerContributions c = euler_contributions(portfolio, t, options);
    for (std::size_t i = 0; i < h.size(); ++i) out.lhs += h[i] * c.K[i];
    out.ok = out.lhs <= out.rhs + 1e-9;
    return out;
}

}  // namespace levyrisk
