#include "levyrisk/levy_models.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "levyrisk/errors.hpp"

namespace levyrisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& message) {
    if (!ok) throw InvalidArgument(message);
}

void require_finite(double v, const char* name) {
    require(std::isfinite(v), std::string("parameter '") + name + "' must be finite");
}

void check_s(double s) {
    require(std::isfinite(s), "Laplace exponent argument must be finite");
    require(s >= 0.0, "Laplace exponent argument s must be >= 0 (got " + std::to_string(s) + ")");
}

// log1p(x) - x/(1+x) for x >= 0. Power series below 1e-2 avoids the cancellation.
double log1p_minus_ratio(double x) {
    if (x < 1e-2) {
        double term = x * x;
        double sum = 0.0;
        for (int k = 2; k <= 14; ++k) {
            double coef = static_cast<double>(k - 1) / k;
            sum += (k % 2 == 0 ? coef : -coef) * term;
            term *= x;
        }
        return sum;
    }
    return std::log1p(x) - x / (1.0 + x);
}

void validate(const LevyFactor::Model& model) {
    std::visit(Overloaded{
                   [](const BrownianWithDrift& m) {
                       require_finite(m.mu, "mu");
                       require_finite(m.sigma, "sigma");
                       require(m.sigma > 0.0, "BrownianWithDrift requires sigma > 0");
                   },
                   [](const GammaSubordinator& m) {
                       require_finite(m.a, "a");
                       require_finite(m.b, "b");
                       require_finite(m.mu, "mu");
                       require(m.a > 0.0, "GammaSubordinator requires a > 0");
                       require(m.b > 0.0, "GammaSubordinator requires b > 0");
                   },
                   [](const AlphaStableSubordinator& m) {
                       require_finite(m.alpha, "alpha");
                       require_finite(m.mu, "mu");
                       require(m.alpha > 0.0 && m.alpha < 1.0, "AlphaStableSubordinator requires 0 < alpha < 1");
                   },
                   [](const CompoundPoissonExp& m) {
                       require_finite(m.lambda, "lambda");
                       require_finite(m.eta, "eta");
                       require_finite(m.mu, "mu");
                       require(m.lambda > 0.0, "CompoundPoissonExp requires lambda > 0");
                       require(m.eta > 0.0, "CompoundPoissonExp requires eta > 0");
                   },
               },
               model);
}

}  // namespace

std::string_view to_string(FactorKind kind) {
    switch (kind) {
        case FactorKind::brownian_with_drift: return "brownian_with_drift";
        case FactorKind::gamma_subordinator: return "gamma_subordinator";
        case FactorKind::alpha_stable_subordinator: return "alpha_stable_subordinator";
        case FactorKind::compound_poisson_exp: return "compound_poisson_exp";
    }
    return "unknown";
}

FactorKind factor_kind_from_string(std::string_view name) {
    if (name == "brownian_with_drift" || name == "BrownianWithDrift") return FactorKind::brownian_with_drift;
    if (name == "gamma_subordinator" || name == "GammaSubordinator") return FactorKind::gamma_subordinator;
    if (name == "alpha_stable_subordinator" || name == "AlphaStableSubordinator")
        return FactorKind::alpha_stable_subordinator;
    if (name == "compound_poisson_exp" || name == "CompoundPoissonExp") return FactorKind::compound_poisson_exp;
    throw InvalidArgument("unknown factor kind '" + std::string(name) + "'");
}

LevyFactor::LevyFactor(Model model) : model_(std::move(model)) { validate(model_); }

FactorKind LevyFactor::kind() const {
    return static_cast<FactorKind>(model_.index());
}

double LevyFactor::drift() const {
    return std::visit([](const auto& m) { return m.mu; }, model_);
}

LevyFactor LevyFactor::with_drift(double mu) const {
    Model copy = model_;
    std::visit([mu](auto& m) { m.mu = mu; }, copy);
    return LevyFactor(copy);
}

double LevyFactor::exponent(double s) const {
    check_s(s);
    return std::visit(Overloaded{
                          [s](const BrownianWithDrift& m) { return m.mu * s - 0.5 * m.sigma * m.sigma * s * s; },
                          [s](const GammaSubordinator& m) { return m.mu * s + m.a * std::log1p(s / m.b); },
                          [s](const AlphaStableSubordinator& m) { return m.mu * s + std::pow(s, m.alpha); },
                          [s](const CompoundPoissonExp& m) { return m.mu * s + m.lambda * s / (m.eta + s); },
                      },
                      model_);
}

double LevyFactor::derivative(double s, int order) const {
    check_s(s);
    if (order == 1) {
        return std::visit(
            Overloaded{
                [s](const BrownianWithDrift& m) { return m.mu - m.sigma * m.sigma * s; },
                [s](const GammaSubordinator& m) { return m.mu + m.a / (m.b + s); },
                [s](const AlphaStableSubordinator& m) {
                    return s == 0.0 ? kInf : m.mu + m.alpha * std::pow(s, m.alpha - 1.0);
                },
                [s](const CompoundPoissonExp& m) {
                    double q = m.eta + s;
                    return m.mu + m.lambda * m.eta / (q * q);
                },
            },
            model_);
    }
    if (order == 2) {
        return std::visit(Overloaded{
                              [](const BrownianWithDrift& m) { return -m.sigma * m.sigma; },
                              [s](const GammaSubordinator& m) {
                                  double q = m.b + s;
                                  return -m.a / (q * q);
                              },
                              [s](const AlphaStableSubordinator& m) {
                                  require(s > 0.0, "second derivative of the stable exponent requires s > 0");
                                  return m.alpha * (m.alpha - 1.0) * std::pow(s, m.alpha - 2.0);
                              },
                              [s](const CompoundPoissonExp& m) {
                                  double q = m.eta + s;
                                  return -2.0 * m.lambda * m.eta / (q * q * q);
                              },
                          },
                          model_);
    }
    throw InvalidArgument("derivative order must be 1 or 2");
}

double LevyFactor::stationarity_term(double s) const {
    check_s(s);
    return std::visit(Overloaded{
                          [s](const BrownianWithDrift& m) { return 0.5 * m.sigma * m.sigma * s * s; },
                          [s](const GammaSubordinator& m) { return m.a * log1p_minus_ratio(s / m.b); },
                          [s](const AlphaStableSubordinator& m) { return (1.0 - m.alpha) * std::pow(s, m.alpha); },
                          [s](const CompoundPoissonExp& m) {
                              double r = s / (m.eta + s);
                              return m.lambda * r * r;
                          },
                      },
                      model_);
}

double LevyFactor::stationarity_term_slope(double s) const {
    check_s(s);
    return std::visit(Overloaded{
                          [s](const BrownianWithDrift& m) { return m.sigma * m.sigma * s; },
                          [s](const GammaSubordinator& m) {
                              double q = m.b + s;
                              return m.a * s / (q * q);
                          },
                          [s](const AlphaStableSubordinator& m) {
                              return s == 0.0 ? kInf : m.alpha * (1.0 - m.alpha) * std::pow(s, m.alpha - 1.0);
                          },
                          [s](const CompoundPoissonExp& m) {
                              double q = m.eta + s;
                              return 2.0 * m.lambda * m.eta * s / (q * q * q);
                          },
                      },
                      model_);
}

double LevyFactor::asymptotic_slope() const {
    if (kind() == FactorKind::brownian_with_drift) return -kInf;
    return drift();
}

double laplace_exponent(const LevyFactor& factor, double s) { return factor.exponent(s); }

double laplace_exponent_deriv(const LevyFactor& factor, double s, int order) { return factor.derivative(s, order); }

// --- FactorCombination -------------------------------------------------------

FactorCombination::FactorCombination(std::vector<LevyFactor> factors, std::vector<double> weights)
    : factors_(std::move(factors)), weights_(std::move(weights)) {
    if (factors_.size() != weights_.size()) {
        throw InvalidArgument("factor combination length mismatch: " + std::to_string(factors_.size()) +
                              " factors vs " + std::to_string(weights_.size()) + " weights");
    }
    for (double d : weights_) {
        require(std::isfinite(d) && d >= 0.0, "factor combination weights must be finite and >= 0");
    }
}

FactorCombination::FactorCombination(LevyFactor single) : factors_{std::move(single)}, weights_{1.0} {}

bool FactorCombination::is_null() const {
    for (double d : weights_) {
        if (d != 0.0) return false;
    }
    return true;
}

double FactorCombination::exponent(double s) const {
    check_s(s);
    double sum = 0.0;
    for (std::size_t j = 0; j < factors_.size(); ++j) {
        if (weights_[j] != 0.0) sum += factors_[j].exponent(s * weights_[j]);
    }
    return sum;
}

double FactorCombination::exponent_deriv(double s) const {
    check_s(s);
    double sum = 0.0;
    for (std::size_t j = 0; j < factors_.size(); ++j) {
        if (weights_[j] != 0.0) sum += weights_[j] * factors_[j].derivative(s * weights_[j], 1);
    }
    return sum;
}

double FactorCombination::stationarity_term(double s) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < factors_.size(); ++j) {
        if (weights_[j] != 0.0) sum += factors_[j].stationarity_term(s * weights_[j]);
    }
    return sum;
}

double FactorCombination::stationarity_term_slope(double s) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < factors_.size(); ++j) {
        if (weights_[j] != 0.0) sum += weights_[j] * factors_[j].stationarity_term_slope(s * weights_[j]);
    }
    return sum;
}

double FactorCombination::mean() const { return exponent_deriv(0.0); }

double FactorCombination::asymptotic_slope() const {
    double sum = 0.0;
    for (std::size_t j = 0; j < factors_.size(); ++j) {
        if (weights_[j] != 0.0) sum += weights_[j] * factors_[j].asymptotic_slope();
    }
    return sum;
}

FactorCombination FactorCombination::scaled(double lambda) const {
    require(std::isfinite(lambda) && lambda >= 0.0, "scale factor must be finite and >= 0");
    std::vector<double> w = weights_;
    for (double& d : w) d *= lambda;
    return {factors_, std::move(w)};
}

FactorCombination FactorCombination::concat(const FactorCombination& other) const {
    std::vector<LevyFactor> f = factors_;
    std::vector<double> w = weights_;
    f.insert(f.end(), other.factors_.begin(), other.factors_.end());
    w.insert(w.end(), other.weights_.begin(), other.weights_.end());
    return {std::move(f), std::move(w)};
}

FactorCombination FactorCombination::with_drift_shift(std::size_t j, double delta) const {
    require(j < factors_.size(), "factor index out of range");
    std::vector<LevyFactor> f = factors_;
    f[j] = f[j].with_drift(f[j].drift() + delta);
    return {std::move(f), weights_};
}

double combine(const FactorCombination& combination, double s) { return combination.exponent(s); }

double combine_deriv(const FactorCombination& combination, double s) { return combination.exponent_deriv(s); }

}  // namespace levyrisk
