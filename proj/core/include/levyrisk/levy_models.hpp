#pragma once

#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace levyrisk {

// Laplace-exponent convention used throughout the library:
//
//     E[exp(-s W_t)] = exp(-t * phi(s)),   s >= 0.
//
// Every model carries its own drift mu, so "mu*t + X_t" maps onto a single factor.

/// mu*t + sigma*B_t. phi(s) = mu*s - sigma^2 s^2 / 2.
struct BrownianWithDrift {
    double mu = 0.0;
    double sigma = 1.0;
    bool operator==(const BrownianWithDrift&) const = default;
};

/// mu*t + Gamma process with shape rate a and inverse scale b. phi(s) = mu*s + a*ln(1 + s/b).
struct GammaSubordinator {
    double a = 1.0;
    double b = 1.0;
    double mu = 0.0;
    bool operator==(const GammaSubordinator&) const = default;
};

/// mu*t + one-sided alpha-stable subordinator. phi(s) = mu*s + s^alpha.
struct AlphaStableSubordinator {
    double alpha = 0.5;
    double mu = 0.0;
    bool operator==(const AlphaStableSubordinator&) const = default;
};

/// mu*t + compound Poisson with intensity lambda and Exp(eta) jumps. phi(s) = mu*s + lambda*s/(eta+s).
struct CompoundPoissonExp {
    double lambda = 1.0;
    double eta = 1.0;
    double mu = 0.0;
    bool operator==(const CompoundPoissonExp&) const = default;
};

enum class FactorKind { brownian_with_drift, gamma_subordinator, alpha_stable_subordinator, compound_poisson_exp };

std::string_view to_string(FactorKind kind);
FactorKind factor_kind_from_string(std::string_view name);

/// Admissible s-range [lower, upper). All supported kinds have upper = +inf.
struct SDomain {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();

    bool contains(double s) const { return s >= lower && s < upper; }
};

/// A one-sided Levy claim factor described by its Laplace exponent.
///
/// Immutable after construction; the constructor validates parameters and
/// throws InvalidArgument on violations.
class LevyFactor {
public:
    using Model = std::variant<BrownianWithDrift, GammaSubordinator, AlphaStableSubordinator, CompoundPoissonExp>;

    LevyFactor(Model model);  // NOLINT(google-explicit-constructor)
    LevyFactor(BrownianWithDrift m) : LevyFactor(Model(m)) {}        // NOLINT(google-explicit-constructor)
    LevyFactor(GammaSubordinator m) : LevyFactor(Model(m)) {}        // NOLINT(google-explicit-constructor)
    LevyFactor(AlphaStableSubordinator m) : LevyFactor(Model(m)) {}  // NOLINT(google-explicit-constructor)
    LevyFactor(CompoundPoissonExp m) : LevyFactor(Model(m)) {}       // NOLINT(google-explicit-constructor)

    FactorKind kind() const;
    const Model& model() const { return model_; }
    SDomain domain() const { return {}; }

    double drift() const;
    LevyFactor with_drift(double mu) const;

    /// phi(s).
    double exponent(double s) const;
    /// phi'(s) (order 1) or phi''(s) (order 2). Order 2 requires s > 0 for the stable kind.
    double derivative(double s, int order = 1) const;

    /// h(s) = phi(s) - s*phi'(s), evaluated without cancellation. Drift drops out exactly.
    double stationarity_term(double s) const;
    /// h'(s) = -s*phi''(s) >= 0.
    double stationarity_term_slope(double s) const;

    /// E[W_1] = phi'(0+); +inf for the stable kind.
    double mean() const { return derivative(0.0, 1); }
    /// lim_{s->inf} phi'(s); -inf for the Brownian kind.
    double asymptotic_slope() const;

    bool operator==(const LevyFactor&) const = default;

private:
    Model model_;
};

double laplace_exponent(const LevyFactor& factor, double s);
double laplace_exponent_deriv(const LevyFactor& factor, double s, int order);

/// Independent factors with nonnegative loadings d_j: X = sum_j d_j W^j.
///
/// phi_X(s) = sum_j phi_j(s*d_j).
class FactorCombination {
public:
    FactorCombination() = default;
    FactorCombination(std::vector<LevyFactor> factors, std::vector<double> weights);
    explicit FactorCombination(LevyFactor single);

    std::size_t size() const { return factors_.size(); }
    const std::vector<LevyFactor>& factors() const { return factors_; }
    const std::vector<double>& weights() const { return weights_; }

    /// True when every weight is zero (the position is identically zero).
    bool is_null() const;

    double exponent(double s) const;
    /// d/ds phi_X(s) = sum_j d_j phi_j'(s d_j).
    double exponent_deriv(double s) const;
    /// sum_j h_j(s d_j), the drift-free part of the stationarity equation.
    double stationarity_term(double s) const;
    double stationarity_term_slope(double s) const;
    /// sum_j d_j E[W_1^j]; +inf if any loaded factor has infinite mean.
    double mean() const;
    /// lim_{s->inf} d/ds phi_X(s).
    double asymptotic_slope() const;

    FactorCombination scaled(double lambda) const;
    /// Block sum: factors of both combinations, treated as mutually independent.
    FactorCombination concat(const FactorCombination& other) const;
    /// Copy with factor j's drift shifted by delta.
    FactorCombination with_drift_shift(std::size_t j, double delta) const;

    bool operator==(const FactorCombination&) const = default;

private:
    std::vector<LevyFactor> factors_;
    std::vector<double> weights_;
};

double combine(const FactorCombination& combination, double s);
double combine_deriv(const FactorCombination& combination, double s);

}  // namespace levyrisk
