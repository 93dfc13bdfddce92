#include "levyrisk/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "levyrisk/errors.hpp"
#include "levyrisk/root_finding.hpp"

namespace levyrisk {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Runs body(begin, end) over a fixed partition of [0, n).
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t, std::size_t)>& body) {
    unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, n / 4096)));
    if (workers <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(body, begin, end);
    }
    for (auto& th : pool) th.join();
}

// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0.0;
    double c = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + c; }
};

// Positive alpha-stable variate with E[exp(-s S)] = exp(-s^alpha) (Kanter's representation).
double positive_stable(double alpha, StreamRng& rng) {
    const double u = std::numbers::pi * rng.uniform_open();
    const double e = -std::log(rng.uniform_open());
    const double a = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha);
    const double b = std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
    return a * b;
}

double normal_quantile_free_se(double p, std::size_t n) {
    return std::sqrt(std::max(p * (1.0 - p), 1.0 / static_cast<double>(n)) / static_cast<double>(n));
}

std::string format_check(const std::string& base, const std::string& detail) {
    return base + "[" + detail + "]";
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Sums over exp(-s y_k) for the shifted sample y_k = x_k - min(x) >= 0.
class TiltedSums {
public:
    explicit TiltedSums(std::span<const double> y) : y_(y) {}

    void evaluate(double s) {
        if (s == last_s_) return;
        CompensatedSum s0, s1, s2;
        for (double y : y_) {
            const double w = std::exp(-s * y);
            s0.add(w);
            s1.add(w * y);
            s2.add(w * y * y);
        }
        w0_ = s0.value();
        mean_ = s1.value() / w0_;
        var_ = std::max(0.0, s2.value() / w0_ - mean_ * mean_);
        log_mean_ = std::log(w0_ / static_cast<double>(y_.size()));
        last_s_ = s;
    }

    double log_mean() const { return log_mean_; }
    double tilted_mean() const { return mean_; }
    double tilted_var() const { return var_; }

private:
    std::span<const double> y_;
    double last_s_ = -1.0;
    double w0_ = 0.0;
    double mean_ = 0.0;
    double var_ = 0.0;
    double log_mean_ = 0.0;
};

}  // namespace

void validate(const SimulationConfig& config) {
    if (config.n_paths < 1) throw InvalidArgument("simulation needs n_paths >= 1");
    if (config.n_steps < 1) throw InvalidArgument("simulation needs n_steps >= 1");
    if (!std::isfinite(config.horizon) || !(config.horizon > 0.0)) {
        throw InvalidArgument("simulation horizon must be > 0");
    }
    if (!(config.z > 0.0)) throw InvalidArgument("confidence multiplier z must be > 0");
}

double sample_increment(const LevyFactor& factor, double dt, StreamRng& rng) {
    if (!std::isfinite(dt) || !(dt > 0.0)) throw InvalidArgument("increment step dt must be > 0");
    return std::visit(
        Overloaded{
            [&](const BrownianWithDrift& m) {
                std::normal_distribution<double> normal(0.0, 1.0);
                return m.mu * dt + m.sigma * std::sqrt(dt) * normal(rng);
            },
            [&](const GammaSubordinator& m) {
                std::gamma_distribution<double> gamma(m.a * dt, 1.0 / m.b);
                return m.mu * dt + gamma(rng);
            },
            [&](const AlphaStableSubordinator& m) {
                return m.mu * dt + std::pow(dt, 1.0 / m.alpha) * positive_stable(m.alpha, rng);
            },
            [&](const CompoundPoissonExp& m) {
                std::poisson_distribution<long> poisson(m.lambda * dt);
                const long jumps = poisson(rng);
                double total = 0.0;
                if (jumps > 0) {
                    std::gamma_distribution<double> sizes(static_cast<double>(jumps), 1.0 / m.eta);
                    total = sizes(rng);
                }
                return m.mu * dt + total;
            },
        },
        factor.model());
}

std::vector<double> sample_increments(const LevyFactor& factor, double dt, std::size_t n, std::uint64_t seed) {
    if (!std::isfinite(dt) || !(dt > 0.0)) throw InvalidArgument("increment step dt must be > 0");
    std::vector<double> out(n);
    parallel_for(n, 0, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            StreamRng rng = StreamRng::stream(seed, k);
            out[k] = sample_increment(factor, dt, rng);
        }
    });
    return out;
}

std::vector<double> PathEnsemble::column(std::size_t step) const {
    std::vector<double> out(n_paths);
    for (std::size_t k = 0; k < n_paths; ++k) out[k] = at(k, step);
    return out;
}

PathEnsemble simulate_paths(const FactorCombination& combination, const SimulationConfig& config) {
    validate(config);
    PathEnsemble ens;
    ens.seed = config.seed;
    ens.n_paths = config.n_paths;
    ens.n_steps = config.n_steps;
    const double dt = config.horizon / static_cast<double>(config.n_steps);
    ens.times.resize(config.n_steps + 1);
    for (std::size_t s = 0; s <= config.n_steps; ++s) ens.times[s] = dt * static_cast<double>(s);
    ens.times.back() = config.horizon;
    ens.values.assign(config.n_paths * (config.n_steps + 1), 0.0);
    const auto& factors = combination.factors();
    const auto& d = combination.weights();
    parallel_for(config.n_paths, config.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            StreamRng rng = StreamRng::stream(config.seed, k);
            double* row = &ens.values[k * (config.n_steps + 1)];
            double x = 0.0;
            for (std::size_t s = 1; s <= config.n_steps; ++s) {
                for (std::size_t j = 0; j < factors.size(); ++j) {
                    if (d[j] != 0.0) x += d[j] * sample_increment(factors[j], dt, rng);
                }
                row[s] = x;
            }
        }
    });
    return ens;
}

std::vector<double> simulate_terminal(const FactorCombination& combination, double t, const SimulationConfig& config) {
    SimulationConfig c = config;
    c.horizon = t;
    c.n_steps = 1;
    return simulate_paths(combination, c).terminal();
}

LaplaceEstimate empirical_laplace(std::span<const double> samples, double s) {
    if (samples.empty()) throw InvalidArgument("empirical_laplace needs samples");
    CompensatedSum s1, s2;
    for (double x : samples) {
        const double w = std::exp(-s * x);
        s1.add(w);
        s2.add(w * w);
    }
    const double n = static_cast<double>(samples.size());
    LaplaceEstimate out;
    out.mean = s1.value() / n;
    const double var = std::max(0.0, s2.value() / n - out.mean * out.mean) * n / std::max(1.0, n - 1.0);
    out.std_error = std::sqrt(var / n);
    return out;
}

EvarResult empirical_evar(std::span<const double> samples, double beta, const EvarOptions& options) {
    if (samples.empty()) throw InvalidArgument("empirical_evar needs samples");
    if (!std::isfinite(beta) || !(beta > 0.0) || beta > 1.0) throw InvalidArgument("beta must lie in (0, 1]");
    double x_min = samples[0];
    CompensatedSum total;
    for (double x : samples) {
        if (!std::isfinite(x)) throw InvalidArgument("empirical_evar: non-finite sample");
        x_min = std::min(x_min, x);
        total.add(x);
    }
    EvarResult out;
    if (beta == 1.0) {
        out.value = -total.value() / static_cast<double>(samples.size());
        out.attained = Attainment::limit_at_zero;
        return out;
    }
    std::vector<double> y(samples.size());
    bool degenerate = true;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        y[k] = samples[k] - x_min;
        if (y[k] != 0.0) degenerate = false;
    }
    if (degenerate) {
        out.value = -x_min;
        out.attained = Attainment::limit_at_infinity;
        return out;
    }

    const double ln_beta = std::log(beta);
    TiltedSums sums(y);
    auto residual = [&](double s) {
        sums.evaluate(s);
        return -s * sums.tilted_mean() - sums.log_mean() + ln_beta;
    };
    auto slope = [&](double s) {
        sums.evaluate(s);
        return s * sums.tilted_var();
    };
    IncreasingRootOptions ro;
    ro.s_lower = options.s_lower;
    ro.s_upper = options.s_upper;
    ro.ftol = options.stationarity_tol * (1.0 + std::abs(ln_beta));
    ro.max_iterations = options.max_iterations;
    ro.hint = options.s_hint;
    IncreasingRootResult root = solve_increasing_root(residual, slope, ro);
    if (root.location == RootLocation::above_range) {
        out.value = -x_min;
        out.attained = Attainment::limit_at_infinity;
        out.iterations = root.iterations;
        return out;
    }
    if (root.location == RootLocation::below_range) {
        throw SolverError("empirical EVaR stationary point lies below the search range");
    }
    sums.evaluate(root.s);
    out.s_star = root.s;
    out.value = -x_min + (sums.log_mean() - ln_beta) / root.s;
    out.attained = Attainment::interior;
    out.iterations = root.iterations;
    out.residual = root.residual;
    return out;
}

EvarResult empirical_evar(const FactorCombination& combination, double t, double beta,
                          const SimulationConfig& config) {
    if (!(t > 0.0)) throw InvalidArgument("empirical_evar requires t > 0");
    const std::vector<double> x = simulate_terminal(combination, t, config);
    return empirical_evar(x, beta);
}

BootstrapBand bootstrap_empirical_evar(std::span<const double> samples, double beta, int resamples,
                                       std::uint64_t seed) {
    if (resamples < 2) throw InvalidArgument("bootstrap needs at least two resamples");
    std::vector<double> estimates(static_cast<std::size_t>(resamples));
    std::vector<double> resample(samples.size());
    for (int r = 0; r < resamples; ++r) {
        StreamRng rng = StreamRng::stream(seed, static_cast<std::uint64_t>(r));
        std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
        for (double& v : resample) v = samples[pick(rng)];
        estimates[static_cast<std::size_t>(r)] = empirical_evar(resample, beta).value;
    }
    CompensatedSum m;
    for (double e : estimates) m.add(e);
    BootstrapBand band;
    band.mean = m.value() / resamples;
    CompensatedSum v;
    for (double e : estimates) v.add((e - band.mean) * (e - band.mean));
    band.std_error = std::sqrt(v.value() / (resamples - 1));
    return band;
}

double adjustment_coefficient(const CompoundPoissonExp& claims, double premium) {
    const LevyFactor checked{claims};
    (void)checked;
    const double c = premium - claims.mu;
    if (!std::isfinite(premium) || !(c > claims.lambda / claims.eta)) {
        throw InvalidArgument("net profit condition violated: premium - mu must exceed lambda/eta");
    }
    // lambda + c r = lambda M(r) with M(r) = eta/(eta - r); dividing out the trivial root r = 0
    // leaves the decreasing function c - lambda/(eta - r) on (0, eta).
    auto f = [&](double r) { return c - claims.lambda / (claims.eta - r); };
    auto df = [&](double r) {
        const double q = claims.eta - r;
        return -claims.lambda / (q * q);
    };
    const double lo = 0.0;
    const double hi = claims.eta * (1.0 - 1e-15);
    RootResult r = safeguarded_newton(f, df, lo, hi, 1e-14 * (1.0 + c), 200);
    if (!r.converged) throw SolverError("adjustment coefficient solver did not converge");
    return r.x;
}

std::vector<double> simulate_max_deficit(const CompoundPoissonExp& claims, double premium, double T,
                                         const SimulationConfig& config) {
    validate(config);
    if (!std::isfinite(T) || !(T > 0.0)) throw InvalidArgument("ruin horizon must be > 0");
    const double c = premium - claims.mu;
    std::vector<double> out(config.n_paths);
    parallel_for(config.n_paths, config.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            StreamRng rng = StreamRng::stream(config.seed, k);
            std::exponential_distribution<double> arrival(claims.lambda);
            std::exponential_distribution<double> size(claims.eta);
            double time = 0.0;
            double paid = 0.0;
            double worst = 0.0;
            while (true) {
                time += arrival(rng);
                if (time > T) break;
                paid += size(rng);
                worst = std::max(worst, paid - c * time);
            }
            out[k] = worst;
        }
    });
    return out;
}

RuinEstimate ruin_probability(const CompoundPoissonExp& claims, double premium, double u,
                              const SimulationConfig& config) {
    if (!std::isfinite(u) || u < 0.0) throw InvalidArgument("initial reserve u must be >= 0");
    RuinEstimate out;
    out.u = u;
    out.R = adjustment_coefficient(claims, premium);
    out.horizon = std::max(50.0, 30.0 / out.R);
    const std::vector<double> deficit = simulate_max_deficit(claims, premium, out.horizon, config);
    std::size_t ruined = 0;
    for (double m : deficit) {
        if (m > u) ++ruined;
    }
    const double n = static_cast<double>(deficit.size());
    out.psi_hat = static_cast<double>(ruined) / n;
    out.ci_half_width = config.z * normal_quantile_free_se(out.psi_hat, deficit.size());
    out.lundberg_bound = std::exp(-out.R * u);
    out.bound_ok = out.psi_hat <= out.lundberg_bound + out.ci_half_width;
    return out;
}

VarInfBound var_inf_bound_check(const CompoundPoissonExp& claims, double premium, double beta,
                                const SimulationConfig& config) {
    if (!std::isfinite(beta) || !(beta > 0.0 && beta <= 1.0)) throw InvalidArgument("beta must lie in (0, 1]");
    VarInfBound out;
    const double R = adjustment_coefficient(claims, premium);
    out.bound = -std::log(beta) / R;
    std::vector<double> deficit = simulate_max_deficit(claims, premium, config.horizon, config);
    std::sort(deficit.begin(), deficit.end());
    const double n = static_cast<double>(deficit.size());
    const double q = 1.0 - beta;
    auto order_stat = [&](double rank) {
        const double idx = std::clamp(std::ceil(rank) - 1.0, 0.0, n - 1.0);
        return deficit[static_cast<std::size_t>(idx)];
    };
    out.var_est = order_stat(q * n);
    const double spread = config.z * std::sqrt(n * q * (1.0 - q));
    const double hi = order_stat(q * n + spread);
    const double lo = order_stat(q * n - spread);
    out.ci_half_width = std::max(hi - out.var_est, out.var_est - lo);
    out.ok = out.var_est <= out.bound + out.ci_half_width;
    return out;
}

std::vector<ValidationRecord> laplace_exponent_checks(const LevyFactor& factor, double dt,
                                                      const std::vector<double>& s_grid,
                                                      const SimulationConfig& config, const std::string& label) {
    validate(config);
    const std::vector<double> inc = sample_increments(factor, dt, config.n_paths, config.seed);
    std::vector<ValidationRecord> out;
    for (double s : s_grid) {
        const LaplaceEstimate est = empirical_laplace(inc, s);
        ValidationRecord rec;
        rec.check_name = format_check("laplace_exponent", label + ",s=" + fmt(s));
        rec.analytic = factor.exponent(s);
        rec.estimate = -std::log(est.mean) / dt;
        rec.ci = config.z * est.std_error / (est.mean * dt);
        rec.pass = std::isfinite(rec.estimate) && std::abs(rec.estimate - rec.analytic) <= rec.ci;
        out.push_back(rec);
    }
    return out;
}

std::vector<ValidationRecord> validate_portfolio(const FactorPortfolio& portfolio, const SimulationConfig& config) {
    validate(config);
    std::vector<ValidationRecord> out;
    const std::vector<double> s_grid{0.5, 1.0, 2.0};
    for (std::size_t j = 0; j < portfolio.factor_count(); ++j) {
        SimulationConfig c = config;
        c.seed = config.seed + 1000003ULL * (j + 1);
        auto recs = laplace_exponent_checks(portfolio.factors()[j], 1.0, s_grid, c,
                                            "factor=" + std::to_string(j) + "," +
                                                std::string(to_string(portfolio.factors()[j].kind())));
        out.insert(out.end(), recs.begin(), recs.end());
    }

    const double T = portfolio.horizon();
    SimulationConfig pc = config;
    pc.horizon = T;
    const PathEnsemble paths = simulate_paths(portfolio.aggregate(), pc);
    const std::vector<double> terminal = paths.terminal();
    const EvarResult analytic = evar(EvarQuery{portfolio.aggregate(), T, portfolio.beta()});
    const EvarResult empirical = empirical_evar(terminal, portfolio.beta());
    const BootstrapBand band = bootstrap_empirical_evar(terminal, portfolio.beta(), 40, config.seed ^ 0xB007ULL);
    ValidationRecord ev;
    ev.check_name = format_check("evar_aggregate", "t=" + fmt(T));
    ev.analytic = analytic.value;
    ev.estimate = empirical.value;
    ev.ci = config.z * band.std_error;
    ev.pass = std::abs(ev.estimate - ev.analytic) <= ev.ci;
    out.push_back(ev);

    const EulerContributions k = euler_contributions(portfolio, T);
    double sum_k = 0.0;
    for (double v : k.K) sum_k += v;
    ValidationRecord fa;
    fa.check_name = format_check("full_allocation", "t=" + fmt(T));
    fa.analytic = k.aggregate.value;
    fa.estimate = sum_k;
    fa.ci = 1e-9 * (1.0 + std::abs(k.aggregate.value));
    fa.pass = std::abs(fa.estimate - fa.analytic) <= fa.ci;
    out.push_back(fa);
    return out;
}

}  // namespace levyrisk
