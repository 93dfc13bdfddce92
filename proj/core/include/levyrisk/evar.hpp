#pragma once

#include <optional>
#include <string_view>

#include "levyrisk/levy_models.hpp"

namespace levyrisk {

/// EVaR_{1-beta}(X_t) for X_t = sum_j d_j W_t^j.
struct EvarQuery {
    FactorCombination combination;
    double t = 1.0;
    double beta = 0.05;
};

enum class Attainment { interior, limit_at_zero, limit_at_infinity };

std::string_view to_string(Attainment a);

struct EvarResult {
    double value = 0.0;
    std::optional<double> s_star;
    Attainment attained = Attainment::interior;
    int iterations = 0;
    /// Stationarity residual N(s*) at the returned optimiser; 0 for boundary limits.
    double residual = 0.0;
};

struct EvarOptions {
    /// Interior solutions satisfy |N(s*)| <= stationarity_tol * (1 + |ln beta|).
    double stationarity_tol = 1e-10;
    int max_iterations = 200;
    double s_lower = 1e-100;
    double s_upper = 1e100;
    /// Warm start for the bracket search.
    std::optional<double> s_hint;
};

/// Validates beta in (0,1], t >= 0 and finiteness; throws InvalidArgument.
void validate(const EvarQuery& query);

/// g(s) = (-t*phi_X(s) - ln beta) / s for s > 0.
double evar_objective(const EvarQuery& query, double s);

/// Numerator of g'(s): N(s) = t * sum_j [phi_j(s d_j) - s d_j phi_j'(s d_j)] + ln beta.
///
/// N is nondecreasing in s and g'(s) = N(s) / s^2.
double stationarity_residual(const EvarQuery& query, double s);

EvarResult evar(const EvarQuery& query, const EvarOptions& options = {});

/// -mu*t + sigma*sqrt(-2 t ln beta).
double evar_closed_form_brownian(double mu, double sigma, double t, double beta);

/// Spot check of the dual representation with the exponentially tilted density
/// f_s = exp(-s X_t) / E[exp(-s X_t)].
struct DualCheck {
    double entropy = 0.0;    ///< E[f_s ln f_s]
    double bound = 0.0;      ///< -ln beta
    double candidate = 0.0;  ///< E[-f_s X_t]
    double evar_value = 0.0;
    bool ok = false;         ///< entropy <= bound implies candidate <= evar + tol
};

DualCheck dual_feasibility_check(const EvarQuery& query, double s, double tol = 1e-9);

}  // namespace levyrisk
