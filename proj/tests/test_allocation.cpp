#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "levyrisk/allocation.hpp"
#include "levyrisk/errors.hpp"
#include "oracles.hpp"
#include "random_models.hpp"

using namespace levyrisk;
using levyrisk::testing::Gen;
using levyrisk::testing::log_uniform;
using levyrisk::testing::uniform;

namespace {

// root of 2 (ln(1+s) - s/(1+s)) = -ln 0.05
constexpr double kTwoGammaRoot = 10.1101407967282087;

using Matrix = std::vector<std::vector<double>>;

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Matrix random_matrix(Gen& gen, std::size_t n, std::size_t m) {
    Matrix A(n, std::vector<double>(m));
    for (auto& row : A) {
        for (double& a : row) a = uniform(gen, 0.05, 2.0);
    }
    return A;
}

std::vector<double> oracle_contributions(const FactorPortfolio& p, double t) {
    const oracle::Combo agg{p.factors(), p.column_sums()};
    const oracle::EvarRef ref = oracle::evar(agg, t, p.beta());
    const double s = std::isnan(ref.s_star) ? 1e300 : ref.s_star;
    std::vector<double> K(p.departments(), 0.0);
    for (std::size_t i = 0; i < p.departments(); ++i) {
        for (std::size_t j = 0; j < p.factor_count(); ++j) {
            K[i] -= t * p.exposure(i, j) * oracle::dphi(p.factors()[j], s * agg.d[j]);
        }
    }
    return K;
}

}  // namespace

TEST(SolveSStar, SingleBrownian) {
    for (double t : {0.1, 1.0, 7.0}) {
        const FactorPortfolio p({{1.0}}, {BrownianWithDrift{0.0, 1.7}}, {0.0}, 10.0, 0.01);
        const double s = solve_s_star(p, {1.0}, t);
        EXPECT_LE(rel_err(s, std::sqrt(-2 * std::log(0.01)) / (1.7 * std::sqrt(t))), 1e-12);
    }
}

TEST(SolveSStar, ScalesInverselyWithU) {
    const FactorPortfolio p({{1.0, 0.5}, {0.2, 2.0}}, {GammaSubordinator{2, 1, 0}, CompoundPoissonExp{3, 2, 0}},
                            {0.1, 0.2}, 1.0, 0.05);
    const double base = solve_s_star(p, {1.0, 1.0}, 2.0);
    for (double lambda : {0.5, 3.0}) {
        EXPECT_LE(rel_err(solve_s_star(p, {lambda, lambda}, 2.0), base / lambda), 1e-10);
    }
}

TEST(SolveSStar, TwoGammaFactors) {
    const FactorPortfolio p({{1.0, 0.0}, {0.0, 1.0}}, {GammaSubordinator{1, 1, 0}, GammaSubordinator{1, 1, 0}},
                            {0.0, 0.0}, 1.0, 0.05);
    const double s = solve_s_star(p, {1.0, 1.0}, 1.0);
    const double bis = oracle::bisect(
        [](double x) { return 2.0 * (std::log1p(x) - x / (1.0 + x)) + std::log(0.05); }, 1.0, 100.0);
    EXPECT_LE(rel_err(s, kTwoGammaRoot), 1e-12);
    EXPECT_LE(rel_err(s, bis), 1e-12);
}

TEST(SolveSStar, MissingRootRaisesWithDiagnosis) {
    // lambda * t = 0.5 < -ln 0.05: h saturates below the target
    const FactorPortfolio p({{1.0}}, {CompoundPoissonExp{1.0, 1.0, 0.0}}, {0.0}, 1.0, 0.05);
    try {
        solve_s_star(p, {1.0}, 0.5);
        FAIL() << "expected NoStationaryPoint";
    } catch (const NoStationaryPoint& e) {
        EXPECT_EQ(e.boundary(), "limit_at_infinity");
    }
    EXPECT_NO_THROW(solve_s_star(p, {1.0}, 5.0));
}

TEST(SolveSStar, AgreesWithEvarCore) {
    Gen gen(21);
    for (int k = 0; k < 100; ++k) {
        const FactorPortfolio p = levyrisk::testing::random_portfolio(gen);
        const double t = log_uniform(gen, 0.05, 5);
        const EvarResult r = evar({p.aggregate(), t, p.beta()});
        if (r.attained != Attainment::interior) {
            EXPECT_THROW(solve_s_star(p, std::vector<double>(p.departments(), 1.0), t), NoStationaryPoint);
            continue;
        }
        const double s = solve_s_star(p, std::vector<double>(p.departments(), 1.0), t);
        EXPECT_LE(rel_err(s, *r.s_star), 1e-9);
    }
}

TEST(EulerContributions, SingleDepartmentEqualsEvar) {
    const FactorPortfolio p({{1.0}}, {GammaSubordinator{2, 3, 0.1}}, {0.5}, 2.0, 0.05);
    for (double t : {0.3, 1.0, 2.0}) {
        const auto ec = euler_contributions(p, t);
        ASSERT_EQ(ec.K.size(), 1u);
        EXPECT_NEAR(ec.K[0], evar({p.aggregate(), t, 0.05}).value, 1e-12);
    }
}

TEST(EulerContributions, BrownianClosedForm) {
    Gen gen(22);
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 1 + k % 4, m = 1 + k % 3;
        const Matrix A = random_matrix(gen, n, m);
        std::vector<LevyFactor> factors;
        std::vector<double> sigma;
        for (std::size_t j = 0; j < m; ++j) {
            sigma.push_back(uniform(gen, 0.1, 3));
            factors.push_back(BrownianWithDrift{0.0, sigma.back()});
        }
        const double beta = log_uniform(gen, 0.001, 0.5), t = log_uniform(gen, 0.01, 10);
        const FactorPortfolio p(A, factors, std::vector<double>(n, 0.0), 10.0, beta);
        const auto K = euler_contributions(p, t).K;
        const auto ref = oracle::brownian_contributions(A, sigma, t, beta);
        for (std::size_t i = 0; i < n; ++i) EXPECT_LE(rel_err(K[i], ref[i]), 1e-8) << k << ' ' << i;
    }
}

TEST(EulerContributions, IdenticalDepartmentsShareEqually) {
    const FactorPortfolio p({{1.0, 0.3}, {1.0, 0.3}, {0.2, 2.0}},
                            {GammaSubordinator{2, 1, 0}, AlphaStableSubordinator{0.6, 0.1}}, {0, 0, 0}, 1.0, 0.05);
    const auto K = euler_contributions(p, 0.7).K;
    EXPECT_DOUBLE_EQ(K[0], K[1]);
}

TEST(EulerContributions, FullAllocationAndOracle) {
    Gen gen(23);
    for (int k = 0; k < 100; ++k) {
        const FactorPortfolio p = levyrisk::testing::random_portfolio(gen);
        const double t = uniform(gen, 0.0, p.horizon());
        const auto ec = euler_contributions(p, t);
        const double agg = ec.aggregate.value;
        EXPECT_NEAR(sum(ec.K), agg, 1e-9 * (1 + std::abs(agg))) << "case " << k;
        const auto ref = oracle_contributions(p, t);
        for (std::size_t i = 0; i < p.departments(); ++i) {
            EXPECT_NEAR(ec.K[i], ref[i], 1e-8 * (1 + std::abs(ref[i]))) << "case " << k << " dept " << i;
        }
    }
}

TEST(EulerContributions, NoUndercut) {
    Gen gen(24);
    for (int k = 0; k < 100; ++k) {
        const FactorPortfolio p = levyrisk::testing::random_portfolio(gen);
        const double t = uniform(gen, 0.01, p.horizon());
        const auto K = euler_contributions(p, t).K;
        for (std::size_t i = 0; i < p.departments(); ++i) {
            EXPECT_LE(K[i], evar({p.department(i), t, p.beta()}).value + 1e-9) << "case " << k << " dept " << i;
        }
    }
}

TEST(EulerContributions, BoundaryRegimeKeepsFullAllocation) {
    // compound Poisson only: no interior optimum for lambda*t < -ln beta
    const FactorPortfolio p({{1.0, 0.5}, {0.5, 1.0}}, {CompoundPoissonExp{1, 1, 0.3}, CompoundPoissonExp{2, 3, 0.1}},
                            {0, 0}, 1.0, 0.01);
    const auto ec = euler_contributions(p, 0.2);
    EXPECT_EQ(ec.aggregate.attained, Attainment::limit_at_infinity);
    EXPECT_NEAR(ec.K[0], -0.2 * (1.0 * 0.3 + 0.5 * 0.1), 1e-15);
    EXPECT_NEAR(sum(ec.K), ec.aggregate.value, 1e-15);
    EXPECT_EQ(euler_contributions(p, 0.0).K, std::vector<double>(2, 0.0));
}

TEST(Allocate, BrownianClosedForm) {
    Gen gen(25);
    for (int k = 0; k < 15; ++k) {
        const std::size_t n = 1 + k % 4, m = 1 + k % 3;
        const Matrix A = random_matrix(gen, n, m);
        std::vector<LevyFactor> factors;
        std::vector<double> sigma, c(n);
        for (std::size_t j = 0; j < m; ++j) {
            sigma.push_back(uniform(gen, 0.1, 3));
            factors.push_back(BrownianWithDrift{0.0, sigma.back()});
        }
        for (double& ci : c) ci = uniform(gen, 0, 1);
        const double beta = log_uniform(gen, 0.001, 0.5), T = log_uniform(gen, 0.1, 10);
        const AllocationReport rep = allocate(FactorPortfolio(A, factors, c, T, beta));
        const auto ref = oracle::brownian_allocation(A, sigma, c, T, beta);
        for (std::size_t i = 0; i < n; ++i) EXPECT_LE(rel_err(rep.L[i], ref[i]), 1e-8) << k << ' ' << i;
        EXPECT_LE(std::abs(rep.full_allocation_gap), 1e-7 * (1 + std::abs(rep.total_cevar)));
    }
}

TEST(Allocate, CommonAlphaStableClosedForm) {
    Gen gen(26);
    for (double alpha : {0.3, 0.5, 0.7}) {
        for (int k = 0; k < 3; ++k) {
            const std::size_t n = 2 + k, m = 1 + k;
            const Matrix A = random_matrix(gen, n, m);
            std::vector<double> c(n);
            for (double& ci : c) ci = uniform(gen, 0, 1);
            const double beta = log_uniform(gen, 0.001, 0.5), T = log_uniform(gen, 0.1, 5);
            const AllocationReport rep = allocate(
                FactorPortfolio(A, std::vector<LevyFactor>(m, AlphaStableSubordinator{alpha, 0.0}), c, T, beta));
            const auto ref = oracle::stable_allocation(A, alpha, c, T, beta);
            for (std::size_t i = 0; i < n; ++i) {
                EXPECT_LE(rel_err(rep.L[i], ref[i]), 1e-8) << alpha << ' ' << k << ' ' << i;
            }
        }
    }
}

TEST(Allocate, GammaAgainstSimpsonOracle) {
    const Matrix A{{1.0, 0.5}, {0.3, 1.2}, {0.8, 0.0}};
    const std::vector<LevyFactor> factors{GammaSubordinator{2.0, 3.0, 0.0}, GammaSubordinator{0.7, 1.5, 0.0}};
    const std::vector<double> c{0.2, 0.4, 0.1};
    const FactorPortfolio p(A, factors, c, 1.0, 0.05);
    const AllocationReport rep = allocate(p);
    for (std::size_t i = 0; i < A.size(); ++i) {
        const double ref = oracle::simpson([&](double t) { return oracle_contributions(p, t)[i]; }, 0.0, 1.0, 10000) +
                           c[i] * 0.5;
        EXPECT_LE(rel_err(rep.L[i], ref), 1e-6) << i;
    }
}

TEST(Allocate, ReportIdentityAndCurve) {
    Gen gen(27);
    for (int k = 0; k < 10; ++k) {
        const FactorPortfolio p = levyrisk::testing::random_portfolio(gen, 4, 3);
        AllocationOptions opts;
        opts.curve_points = 11;
        const AllocationReport rep = allocate(p, opts);
        EXPECT_LE(std::abs(rep.full_allocation_gap), 1e-7 * (1 + std::abs(rep.total_cevar))) << k;
        EXPECT_NEAR(rep.full_allocation_gap, sum(rep.L) - rep.total_cevar, 1e-15 * (1 + std::abs(rep.total_cevar)));
        EXPECT_DOUBLE_EQ(rep.premium_moment, p.horizon() / 2);
        const double expected_total = cevar({p.aggregate(), p.horizon(), p.beta()}) + sum(p.premiums()) * p.horizon() / 2;
        EXPECT_NEAR(rep.total_cevar, expected_total, 1e-9 * (1 + std::abs(expected_total)));
        ASSERT_EQ(rep.K_curve.size(), 11u);
        EXPECT_EQ(rep.K_curve.front().t, 0.0);
        EXPECT_EQ(rep.K_curve.back().t, p.horizon());
    }
}

TEST(Allocate, TableWeightUsesPremiumMoment) {
    const auto w = WeightFunction::table({{0.0, 0.0}, {2.0, 1.0}});  // omega(t) = t/2, moment 4/3
    const FactorPortfolio p({{1.0}, {0.5}}, {BrownianWithDrift{0.0, 1.0}}, {0.3, 0.6}, 2.0, 0.05, w);
    const AllocationReport rep = allocate(p);
    EXPECT_NEAR(rep.premium_moment, 4.0 / 3.0, 1e-15);
    // K_t^i = a_i sqrt(-2 ln beta t), integral of sqrt(t) t/2 over [0,2] = 2^(5/2)/5
    const double base = std::sqrt(-2.0 * std::log(0.05)) * std::pow(2.0, 2.5) / 5.0;
    EXPECT_NEAR(rep.L[0], base * 1.0 + 0.3 * 4.0 / 3.0, 1e-9);
    EXPECT_NEAR(rep.L[1], base * 0.5 + 0.6 * 4.0 / 3.0, 1e-9);
}

TEST(Allocate, Homogeneity) {
    Gen gen(28);
    for (int k = 0; k < 10; ++k) {
        const FactorPortfolio p = levyrisk::testing::random_portfolio(gen, 4, 3);
        const double lambda = log_uniform(gen, 0.2, 5);
        const auto a = allocate(p).L, b = allocate(p.scaled(lambda)).L;
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_NEAR(b[i], lambda * a[i], 1e-9 * std::abs(lambda * a[i]) + 1e-12) << k << ' ' << i;
        }
    }
}

TEST(PortfolioValidation, RejectsBadInput) {
    const std::vector<LevyFactor> f{BrownianWithDrift{0, 1}};
    EXPECT_THROW(FactorPortfolio({{-1.0}}, f, {0.0}, 1.0, 0.05), InvalidArgument);
    EXPECT_THROW(FactorPortfolio({{1.0}}, f, {0.0, 1.0}, 1.0, 0.05), InvalidArgument);
    EXPECT_THROW(FactorPortfolio({{1.0, 0.0}}, {f[0], f[0]}, {0.0}, 1.0, 0.05), InvalidArgument);
    EXPECT_THROW(FactorPortfolio({{1.0}}, f, {-0.1}, 1.0, 0.05), InvalidArgument);
    EXPECT_THROW(FactorPortfolio({{1.0}}, f, {0.0}, 0.0, 0.05), InvalidArgument);
    EXPECT_THROW(FactorPortfolio({{1.0}}, f, {0.0}, 1.0, 1.0), InvalidArgument);
    EXPECT_THROW(FactorPortfolio({}, f, {}, 1.0, 0.05), InvalidArgument);
}

TEST(DirectionalDerivative, SingleBrownian) {
    const FactorPortfolio p({{1.0}}, {BrownianWithDrift{0.2, 1.3}}, {0.0}, 1.0, 0.05);
    const auto d = directional_derivative_check(p, 0, 0.8, 1e-6);
    EXPECT_LE(rel_err(d.finite_diff, d.analytic), 1e-4);
}

TEST(DirectionalDerivative, SymmetricDepartments) {
    const FactorPortfolio p({{1.0, 0.5}, {1.0, 0.5}}, {GammaSubordinator{2, 1, 0}, BrownianWithDrift{0, 1}}, {0, 0},
                            1.0, 0.05);
    const auto d0 = directional_derivative_check(p, 0, 0.5, 1e-6);
    const auto d1 = directional_derivative_check(p, 1, 0.5, 1e-6);
    EXPECT_DOUBLE_EQ(d0.analytic, d1.analytic);
    EXPECT_DOUBLE_EQ(d0.finite_diff, d1.finite_diff);
}

TEST(DirectionalDerivative, ErrorIsFirstOrderInEpsilon) {
    const FactorPortfolio p({{1.0, 0.5}, {0.2, 1.0}}, {GammaSubordinator{2, 1, 0}, BrownianWithDrift{0, 1}}, {0, 0},
                            1.0, 0.05);
    std::vector<double> err;
    for (double eps : {4e-2, 2e-2, 1e-2, 5e-3}) {
        const auto d = directional_derivative_check(p, 0, 0.7, eps);
        err.push_back(std::abs(d.finite_diff - d.analytic));
    }
    for (std::size_t k = 1; k < err.size(); ++k) EXPECT_NEAR(std::log2(err[k - 1] / err[k]), 1.0, 0.1);
}

TEST(Diversification, RandomWeights) {
    Gen gen(29);
    const FactorPortfolio p({{1.0, 0.5, 0.0}, {0.3, 1.2, 0.4}, {0.8, 0.0, 1.0}},
                            {GammaSubordinator{2, 3, 0}, BrownianWithDrift{0.1, 0.8}, AlphaStableSubordinator{0.5, 0}},
                            {0.1, 0.2, 0.3}, 1.0, 0.05);
    for (int k = 0; k < 100; ++k) {
        std::vector<double> h(3);
        for (double& v : h) v = uniform(gen, 0, 2);
        const auto d = diversification_check(p, h, 0.6);
        EXPECT_TRUE(d.ok) << d.lhs << " > " << d.rhs;
    }
    const auto full = diversification_check(p, {1, 1, 1}, 0.6);
    EXPECT_NEAR(full.lhs, full.rhs, 1e-9);
    for (std::size_t i = 0; i < 3; ++i) {
        std::vector<double> e(3, 0.0);
        e[i] = 1.0;
        const auto d = diversification_check(p, e, 0.6);
        EXPECT_TRUE(d.ok);
        EXPECT_NEAR(d.rhs, evar({p.department(i), 0.6, 0.05}).value, 1e-12);
    }
}
