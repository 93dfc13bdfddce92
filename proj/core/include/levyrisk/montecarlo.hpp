#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levyrisk/allocation.hpp"
#include "levyrisk/evar.hpp"
#include "levyrisk/levy_models.hpp"
#include "levyrisk/rng.hpp"

namespace levyrisk {

struct SimulationConfig {
    std::uint64_t seed = 20240611;
    std::size_t n_paths = 100000;
    std::size_t n_steps = 1;
    double horizon = 1.0;
    /// Half-width multiplier for every reported confidence band.
    double z = 4.0;
    /// Worker threads; 0 picks hardware concurrency. Output does not depend on it.
    unsigned threads = 0;
};

void validate(const SimulationConfig& config);

/// One increment of the factor over a step of length dt.
double sample_increment(const LevyFactor& factor, double dt, StreamRng& rng);

/// n i.i.d. increments; increment k is drawn from StreamRng::stream(seed, k).
std::vector<double> sample_increments(const LevyFactor& factor, double dt, std::size_t n, std::uint64_t seed);

/// Simulated paths of X_t = sum_j d_j W_t^j on an equidistant grid over [0, horizon].
struct PathEnsemble {
    std::uint64_t seed = 0;
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    std::vector<double> times;
    /// Row-major n_paths x (n_steps + 1); column 0 is X_0 = 0.
    std::vector<double> values;

    double at(std::size_t path, std::size_t step) const { return values[path * (n_steps + 1) + step]; }
    std::vector<double> column(std::size_t step) const;
    std::vector<double> terminal() const { return column(n_steps); }
};

PathEnsemble simulate_paths(const FactorCombination& combination, const SimulationConfig& config);

/// Exact draws of X_t (one increment of length t per loaded factor and path).
std::vector<double> simulate_terminal(const FactorCombination& combination, double t, const SimulationConfig& config);

struct LaplaceEstimate {
    double mean = 0.0;       ///< (1/N) sum exp(-s x_k)
    double std_error = 0.0;  ///< standard error of that mean
};

LaplaceEstimate empirical_laplace(std::span<const double> samples, double s);

/// Plug-in EVaR: inf_s (ln (1/N) sum exp(-s x_k) - ln beta) / s, evaluated with a shifted
/// log-sum-exp so no intermediate overflows.
EvarResult empirical_evar(std::span<const double> samples, double beta, const EvarOptions& options = {});
EvarResult empirical_evar(const FactorCombination& combination, double t, double beta,
                          const SimulationConfig& config);

struct BootstrapBand {
    double mean = 0.0;
    double std_error = 0.0;
};

BootstrapBand bootstrap_empirical_evar(std::span<const double> samples, double beta, int resamples,
                                       std::uint64_t seed);

/// Smallest positive root R of lambda + c r = lambda * eta / (eta - r) for a claims factor
/// mu*t + compound Poisson; the premium rate seen by the reserve is c - mu.
double adjustment_coefficient(const CompoundPoissonExp& claims, double premium);

struct RuinEstimate {
    double u = 0.0;
    double psi_hat = 0.0;
    double ci_half_width = 0.0;
    double R = 0.0;
    double lundberg_bound = 0.0;  ///< exp(-R u)
    double horizon = 0.0;         ///< finite horizon used for the infinite-horizon estimate
    bool bound_ok = false;        ///< psi_hat <= lundberg_bound + ci_half_width
};

/// Monte Carlo ruin probability over the horizon max(50, 30/R).
RuinEstimate ruin_probability(const CompoundPoissonExp& claims, double premium, double u,
                              const SimulationConfig& config);

struct VarInfBound {
    double var_est = 0.0;  ///< empirical VaR_beta of inf_{0<=t<=T} C_t
    double bound = 0.0;    ///< -ln(beta) / R
    double ci_half_width = 0.0;
    bool ok = false;
};

/// Checks VaR_beta(inf_{t<=T} C_t) <= -ln(beta)/R with C_t = c t - claims_t and T = config.horizon.
VarInfBound var_inf_bound_check(const CompoundPoissonExp& claims, double premium, double beta,
                                const SimulationConfig& config);

/// sup_{0<=t<=T} (claims_t - c t) per path, floored at 0. Path k uses stream (seed, k), so
/// a longer horizon extends the same jump sequence.
std::vector<double> simulate_max_deficit(const CompoundPoissonExp& claims, double premium, double T,
                                         const SimulationConfig& config);

struct ValidationRecord {
    std::string check_name;
    double analytic = 0.0;
    double estimate = 0.0;
    double ci = 0.0;
    bool pass = false;
};

/// Empirical Laplace exponent -ln(mean exp(-s dW))/dt against phi(s), band z standard errors.
std::vector<ValidationRecord> laplace_exponent_checks(const LevyFactor& factor, double dt,
                                                      const std::vector<double>& s_grid,
                                                      const SimulationConfig& config,
                                                      const std::string& label = "factor");

/// Monte Carlo cross-checks for a portfolio: Laplace exponents of every factor, terminal
/// EVaR of the aggregate, and the analytic full-allocation identity at the horizon.
std::vector<ValidationRecord> validate_portfolio(const FactorPortfolio& portfolio, const SimulationConfig& config);

}  // namespace levyrisk
