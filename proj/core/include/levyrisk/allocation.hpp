#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "levyrisk/cevar.hpp"
#include "levyrisk/evar.hpp"
#include "levyrisk/levy_models.hpp"

namespace levyrisk {

/// n departments whose claims load on m independent factors: X^i_t = sum_j a_ij W^j_t.
/// Department i collects premium at rate c^i, so its net loss is X^i_t - c^i t.
class FactorPortfolio {
public:
    /// exposures: n rows of m nonnegative entries; every column must have a positive sum.
    FactorPortfolio(std::vector<std::vector<double>> exposures, std::vector<LevyFactor> factors,
                    std::vector<double> premiums, double T, double beta,
                    WeightFunction weight = WeightFunction::uniform());

    std::size_t departments() const { return exposures_.size(); }
    std::size_t factor_count() const { return factors_.size(); }
    const std::vector<std::vector<double>>& exposures() const { return exposures_; }
    double exposure(std::size_t i, std::size_t j) const { return exposures_[i][j]; }
    const std::vector<LevyFactor>& factors() const { return factors_; }
    const std::vector<double>& premiums() const { return premiums_; }
    double horizon() const { return T_; }
    double beta() const { return beta_; }
    const WeightFunction& weight() const { return weight_; }

    /// D_j = sum_k a_kj.
    std::vector<double> column_sums() const;
    /// d_j = sum_k u_k a_kj.
    std::vector<double> loadings(const std::vector<double>& u) const;
    /// Claims of the u-weighted aggregate sum_i u_i X^i.
    FactorCombination combination(const std::vector<double>& u) const;
    FactorCombination aggregate() const;
    FactorCombination department(std::size_t i) const;

    /// Copy with every exposure row and premium multiplied by lambda > 0.
    FactorPortfolio scaled(double lambda) const;

    bool operator==(const FactorPortfolio&) const = default;

private:
    std::vector<std::vector<double>> exposures_;
    std::vector<LevyFactor> factors_;
    std::vector<double> premiums_;
    double T_;
    double beta_;
    WeightFunction weight_;
};

/// Root of the stationarity equation for the u-weighted aggregate at time t.
/// Throws NoStationaryPoint when the infimum is a boundary limit.
double solve_s_star(const FactorPortfolio& portfolio, const std::vector<double>& u, double t,
                    const EvarOptions& options = {});

struct EulerContributions {
    /// K_t^i, one per department.
    std::vector<double> K;
    /// EVaR of the aggregate claims at t (the full-allocation target).
    EvarResult aggregate;
};

/// K_t^i = -t * sum_j a_ij phi_j'(s* D_j).
///
/// When the aggregate infimum is the s -> inf limit (no finite s*), phi_j'(s* D_j)
/// is replaced by its limit, which keeps sum_i K_t^i equal to the aggregate EVaR.
EulerContributions euler_contributions(const FactorPortfolio& portfolio, double t, const EvarOptions& options = {});

struct AllocationPoint {
    double t = 0.0;
    std::optional<double> s_star;
    std::vector<double> K;
};

struct AllocationReport {
    /// L^i = int K_t^i omega(t) dt + c^i * int t omega(t) dt.
    std::vector<double> L;
    std::vector<AllocationPoint> K_curve;
    /// CEVaR of the aggregate claims, integrated independently of the K_t^i.
    double claims_cevar = 0.0;
    /// int t omega(t) dt (T/2 for the uniform weight).
    double premium_moment = 0.0;
    /// CEVaR of the aggregate net-loss position: claims_cevar + sum_i c^i * premium_moment.
    double total_cevar = 0.0;
    /// sum_i L^i - total_cevar.
    double full_allocation_gap = 0.0;
    int quadrature_evaluations = 0;
};

struct AllocationOptions {
    EvarOptions evar;
    QuadratureOptions quadrature;
    /// Number of equally spaced points (including 0 and T) in the reported K curve.
    int curve_points = 21;
};

AllocationReport allocate(const FactorPortfolio& portfolio, const AllocationOptions& options = {});

struct DirectionalDerivative {
    double analytic = 0.0;
    double finite_diff = 0.0;
};

/// Analytic K_t^i against [EVaR(u = 1 + eps e_i) - EVaR(u = 1)] / eps.
DirectionalDerivative directional_derivative_check(const FactorPortfolio& portfolio, std::size_t i, double t,
                                                   double epsilon, const EvarOptions& options = {});

struct DiversificationCheck {
    double lhs = 0.0;  ///< sum_i h^i K_t^i
    double rhs = 0.0;  ///< EVaR of sum_i h^i X^i_t
    bool ok = false;
};

DiversificationCheck diversification_check(const FactorPortfolio& portfolio, const std::vector<double>& h, double t,
                                           const EvarOptions& options = {});

}  // namespace levyrisk
