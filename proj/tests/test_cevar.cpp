#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "levyrisk/cevar.hpp"
#include "levyrisk/errors.hpp"
#include "oracles.hpp"
#include "random_models.hpp"

using namespace levyrisk;
using levyrisk::testing::Gen;
using levyrisk::testing::log_uniform;
using levyrisk::testing::uniform;

namespace {

FactorCombination single(LevyFactor f) { return FactorCombination(std::move(f)); }

double brownian_cevar(double mu, double sigma, double T, double beta) {
    return -mu * T / 2.0 + 2.0 / 3.0 * sigma * std::sqrt(-2.0 * T * std::log(beta));
}

// Simpson reference for a table weight: one graded panel per knot segment.
double simpson_table(const oracle::Combo& c, double beta, const WeightFunction& w, double T, int n) {
    double total = 0.0;
    const auto& knots = w.knots();
    for (std::size_t k = 1; k < knots.size(); ++k) {
        const double a = knots[k - 1].first, b = knots[k].first;
        total += oracle::simpson(
            [&](double t) { return t == 0.0 ? 0.0 : oracle::evar(c, t, beta).value * w(t, T); }, a, b, n);
    }
    return total;
}

}  // namespace

TEST(Cevar, BrownianClosedForm) {
    Gen gen(11);
    for (int k = 0; k < 30; ++k) {
        const double mu = uniform(gen, -2, 2), sigma = uniform(gen, 0.1, 5), T = log_uniform(gen, 0.05, 10),
                     beta = uniform(gen, 0.001, 0.99);
        const double v = cevar({single(BrownianWithDrift{mu, sigma}), T, beta});
        const double expected = brownian_cevar(mu, sigma, T, beta);
        EXPECT_NEAR(v, expected, 1e-8 * std::abs(expected)) << mu << ' ' << sigma << ' ' << T << ' ' << beta;
    }
}

TEST(Cevar, MeanLimitAtBetaOne) {
    for (double T : {0.5, 1.0, 4.0}) {
        EXPECT_NEAR(cevar({single(BrownianWithDrift{0.8, 1.3}), T, 1.0}), -0.8 * T / 2.0, 1e-12);
    }
}

TEST(Cevar, GammaAgainstSimpsonOracle) {
    const oracle::Combo c{{GammaSubordinator{2.0, 3.0, 0.0}}, {1.0}};
    const double ref = oracle::simpson(
                           [&](double t) { return t == 0.0 ? 0.0 : oracle::evar(c, t, 0.05).value; }, 0.0, 1.0,
                           10000);
    const double v = cevar({single(GammaSubordinator{2.0, 3.0, 0.0}), 1.0, 0.05});
    EXPECT_NEAR(v, ref, 1e-7 * (1 + std::abs(ref)));
}

TEST(Cevar, UniformWeightMatchesFixedGridSimpson) {
    Gen gen(12);
    for (int k = 0; k < 10; ++k) {
        const FactorCombination c = levyrisk::testing::random_combination(gen, 3);
        const double T = uniform(gen, 0.5, 3), beta = log_uniform(gen, 0.005, 0.5);
        const oracle::Combo oc{c.factors(), c.weights()};
        const double ref =
            oracle::simpson_graded([&](double t) { return t == 0.0 ? 0.0 : oracle::evar(oc, t, beta).value; }, T,
                                   4000) /
            T;
        EXPECT_NEAR(cevar({c, T, beta}), ref, 1e-7) << "case " << k;
    }
}

TEST(Cevar, TableWeight) {
    const auto w = WeightFunction::table({{0.0, 0.2}, {0.5, 1.0}, {1.5, 1.2}, {2.0, 0.0}});
    const double mass = w.mass(2.0);
    EXPECT_NEAR(mass, 0.5 * 0.5 * 1.2 + 1.0 * 1.1 + 0.5 * 0.5 * 1.2, 1e-15);
    const WeightFunction wn = w.normalized(2.0);
    EXPECT_NEAR(wn.mass(2.0), 1.0, 1e-15);
    EXPECT_THROW(w.check_normalized(2.0), InvalidArgument);
    EXPECT_THROW(wn.check_normalized(1.5), InvalidArgument);

    const double moment = oracle::simpson([&](double t) { return t * wn(t, 2.0); }, 0.0, 0.5, 2) +
                          oracle::simpson([&](double t) { return t * wn(t, 2.0); }, 0.5, 1.5, 2) +
                          oracle::simpson([&](double t) { return t * wn(t, 2.0); }, 1.5, 2.0, 2);
    EXPECT_NEAR(wn.time_moment(2.0), moment, 1e-14);
    EXPECT_DOUBLE_EQ(WeightFunction::uniform().time_moment(3.0), 1.5);

    const FactorCombination c({GammaSubordinator{1.5, 2.0, 0.1}, BrownianWithDrift{0.0, 0.7}}, {1.0, 0.5});
    const double v = cevar({c, 2.0, 0.05, wn});
    const double ref = simpson_table({c.factors(), c.weights()}, 0.05, wn, 2.0, 4000);
    EXPECT_NEAR(v, ref, 1e-7);

    EXPECT_THROW(cevar({c, 2.0, 0.05, w}), InvalidArgument);
}

TEST(Cevar, RenormalisationInvariance) {
    const FactorCombination c(CompoundPoissonExp{2.0, 1.5, 0.0});
    const auto raw = WeightFunction::table({{0.0, 1.0}, {1.0, 3.0}, {3.0, 0.5}});
    const WeightFunction a = raw.normalized(3.0);
    std::vector<std::pair<double, double>> doubled = raw.knots();
    for (auto& [t, w] : doubled) w *= 2.0;
    const WeightFunction b = WeightFunction::table(doubled).normalized(3.0);
    EXPECT_NEAR(cevar({c, 3.0, 0.05, a}), cevar({c, 3.0, 0.05, b}), 1e-9);
}

TEST(Cevar, CoherenceUnderRandomWeights) {
    Gen gen(13);
    for (int k = 0; k < 20; ++k) {
        const FactorCombination c = levyrisk::testing::random_combination(gen, 3);
        const double T = uniform(gen, 0.5, 2), beta = log_uniform(gen, 0.005, 0.5);
        const WeightFunction w =
            WeightFunction::table({{0.0, uniform(gen, 0, 1)}, {T / 3, uniform(gen, 0, 1)}, {T, uniform(gen, 0, 1)}})
                .normalized(T);
        const double base = cevar({c, T, beta, w});

        const double lambda = log_uniform(gen, 0.2, 5);
        EXPECT_NEAR(cevar({c.scaled(lambda), T, beta, w}), lambda * base, 1e-9 * (1 + std::abs(lambda * base)));

        // shifting factor 0's drift by delta moves X_t by delta*d_0*t
        const double delta = uniform(gen, -1, 1);
        const double shifted = cevar({c.with_drift_shift(0, delta), T, beta, w});
        EXPECT_NEAR(shifted, base - delta * c.weights()[0] * w.time_moment(T), 1e-9 * (1 + std::abs(base)));
    }
}

TEST(Cevar, QuadratureBudgetIsReported) {
    CevarOptions opts;
    opts.quadrature.max_evaluations = 20;
    try {
        cevar({single(GammaSubordinator{2.0, 3.0, 0.0}), 1.0, 0.05, WeightFunction::uniform(), 1e-14}, opts);
        FAIL() << "expected QuadratureError";
    } catch (const QuadratureError& e) {
        ASSERT_EQ(e.partial_estimate().size(), 1u);
        EXPECT_TRUE(std::isfinite(e.partial_estimate()[0]));
        EXPECT_GT(e.error_estimate(), 0.0);
    }
}

TEST(Cevar, InvalidQueries) {
    const FactorCombination c(BrownianWithDrift{0, 1});
    EXPECT_THROW(cevar({c, 0.0, 0.05}), InvalidArgument);
    EXPECT_THROW(cevar({c, 1.0, 0.0}), InvalidArgument);
    EXPECT_THROW(WeightFunction::table({{0.0, 1.0}}), InvalidArgument);
    EXPECT_THROW(WeightFunction::table({{0.0, 1.0}, {0.0, 1.0}}), InvalidArgument);
    EXPECT_THROW(WeightFunction::table({{0.0, -1.0}, {1.0, 1.0}}), InvalidArgument);
}

TEST(EvarCurve, ZeroTimePoint) {
    const auto curve = evar_curve({FactorCombination(GammaSubordinator{2, 3, 0}), 1.0, 0.05}, {0.0});
    ASSERT_EQ(curve.points.size(), 1u);
    EXPECT_EQ(curve.points[0].t, 0.0);
    EXPECT_EQ(curve.points[0].evar, 0.0);
    EXPECT_FALSE(curve.points[0].s_star.has_value());
}

TEST(EvarCurve, BrownianMatchesClosedForm) {
    std::vector<double> grid(41);
    for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = 3.0 * k / 40.0;
    const auto curve = evar_curve({FactorCombination(BrownianWithDrift{0.4, 1.2}), 3.0, 0.01}, grid);
    for (const auto& p : curve.points) {
        const double cf = evar_closed_form_brownian(0.4, 1.2, p.t, 0.01);
        EXPECT_NEAR(p.evar, cf, 1e-10 * std::abs(cf)) << p.t;
    }
    EXPECT_TRUE(curve.s_star_monotone);
    EXPECT_THROW(evar_curve({FactorCombination(BrownianWithDrift{0, 1}), 1.0, 0.05}, {0.5, 1.5}), InvalidArgument);
}

TEST(EvarCurve, StableLogLogSlope) {
    for (double alpha : {0.3, 0.5, 0.7}) {
        const FactorCombination c({AlphaStableSubordinator{alpha, 0.0}, AlphaStableSubordinator{alpha, 0.0}},
                                  {1.0, 2.5});
        std::vector<double> grid;
        for (int k = 0; k <= 20; ++k) grid.push_back(std::pow(10.0, -1.0 + 1.5 * k / 20.0));
        const auto curve = evar_curve({c, 5.0, 0.05}, grid);
        // least-squares slope of ln|EVaR| on ln t
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(grid.size());
        for (const auto& p : curve.points) {
            const double x = std::log(p.t), y = std::log(std::abs(p.evar));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        EXPECT_NEAR(slope, 1.0 / alpha, 1e-3) << alpha;
        EXPECT_TRUE(curve.s_star_monotone);
    }
}
