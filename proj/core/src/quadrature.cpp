#include "levyrisk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "levyrisk/errors.hpp"

namespace levyrisk {

namespace {

using Vec = std::vector<double>;

Vec simpson(double h, const Vec& fa, const Vec& fm, const Vec& fb) {
    Vec out(fa.size());
    for (std::size_t k = 0; k < fa.size(); ++k) out[k] = h / 6.0 * (fa[k] + 4.0 * fm[k] + fb[k]);
    return out;
}

double max_abs_diff(const Vec& a, const Vec& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

void accumulate(Vec& acc, const Vec& v) {
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += v[k];
}

class GradedSimpson {
public:
    GradedSimpson(const VectorIntegrand& f, double T, const QuadratureOptions& options)
        : f_(f), T_(T), options_(options) {}

    Vec eval(double u) {
        ++evaluations_;
        const double p = options_.grading_power;
        const double t = u <= 0.0 ? 0.0 : (u >= 1.0 ? T_ : T_ * std::pow(u, p));
        const double jac = p * T_ * (p == 2.0 ? u : std::pow(u, p - 1.0));
        Vec v = f_(t);
        if (width_ == 0) width_ = v.size();
        if (v.size() != width_) throw InvalidArgument("integrand changed its number of components");
        for (double& x : v) {
            x *= jac;
            if (!std::isfinite(x)) throw InvalidArgument("integrand is not finite at t = " + std::to_string(t));
        }
        return v;
    }

    // Returns the refined estimate for [a, b]; whole = Simpson estimate from the parent.
    Vec refine(double a, double b, const Vec& fa, const Vec& fm, const Vec& fb, const Vec& whole, double tol,
               int depth) {
        const double m = 0.5 * (a + b);
        if (budget_exhausted_ || evaluations_ + 2 > options_.max_evaluations) {
            budget_exhausted_ = true;
            error_ += tol;
            return whole;
        }
        Vec flm = eval(0.5 * (a + m));
        Vec frm = eval(0.5 * (m + b));
        Vec left = simpson(m - a, fa, flm, fm);
        Vec right = simpson(b - m, fm, frm, fb);
        Vec both = left;
        accumulate(both, right);
        const double diff = max_abs_diff(both, whole);
        if (diff <= 15.0 * tol || depth >= options_.max_depth || (b - a) <= 1e-15) {
            error_ += diff / 15.0;
            for (std::size_t k = 0; k < both.size(); ++k) both[k] += (both[k] - whole[k]) / 15.0;
            return both;
        }
        Vec l = refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1);
        Vec r = refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
        accumulate(l, r);
        return l;
    }

    int evaluations() const { return evaluations_; }
    double error() const { return error_; }
    bool budget_exhausted() const { return budget_exhausted_; }

private:
    const VectorIntegrand& f_;
    double T_;
    QuadratureOptions options_;
    std::size_t width_ = 0;
    int evaluations_ = 0;
    double error_ = 0.0;
    bool budget_exhausted_ = false;
};

}  // namespace

QuadratureResult integrate_graded(const VectorIntegrand& f, double T, std::span<const double> breakpoints,
                                  const QuadratureOptions& options) {
    if (!std::isfinite(T) || !(T > 0.0)) throw InvalidArgument("integration horizon T must be > 0");
    if (!(options.grading_power >= 1.0)) throw InvalidArgument("grading_power must be >= 1");
    if (options.initial_panels < 1) throw InvalidArgument("initial_panels must be >= 1");

    std::vector<double> edges{0.0, 1.0};
    for (double t : breakpoints) {
        if (t > 0.0 && t < T) edges.push_back(std::pow(t / T, 1.0 / options.grading_power));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<double> grid;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        for (int k = 0; k < options.initial_panels; ++k) {
            grid.push_back(edges[e] + (edges[e + 1] - edges[e]) * k / options.initial_panels);
        }
    }
    grid.push_back(1.0);

    GradedSimpson quad(f, T, options);
    const std::size_t panels = grid.size() - 1;
    std::vector<Vec> f_edge(grid.size());
    std::vector<Vec> f_mid(panels);
    std::vector<Vec> coarse(panels);
    for (std::size_t k = 0; k < grid.size(); ++k) f_edge[k] = quad.eval(grid[k]);
    Vec total(f_edge[0].size(), 0.0);
    for (std::size_t k = 0; k < panels; ++k) {
        f_mid[k] = quad.eval(0.5 * (grid[k] + grid[k + 1]));
        coarse[k] = simpson(grid[k + 1] - grid[k], f_edge[k], f_mid[k], f_edge[k + 1]);
        accumulate(total, coarse[k]);
    }

    double tol = options.abs_tol;
    if (!(tol > 0.0)) {
        double scale = 0.0;
        for (double v : total) scale = std::max(scale, std::abs(v));
        tol = options.rel_tol * (1.0 + scale);
    }

    QuadratureResult out;
    out.value.assign(total.size(), 0.0);
    for (std::size_t k = 0; k < panels; ++k) {
        const double a = grid[k];
        const double b = grid[k + 1];
        Vec piece = quad.refine(a, b, f_edge[k], f_mid[k], f_edge[k + 1], coarse[k], tol * (b - a), 0);
        accumulate(out.value, piece);
    }
    out.evaluations = quad.evaluations();
    out.error_estimate = quad.error();
    if (quad.budget_exhausted()) {
        throw QuadratureError("adaptive quadrature exceeded " + std::to_string(options.max_evaluations) +
                                  " evaluations",
                              out.value, out.error_estimate);
    }
    return out;
}

}  // namespace levyrisk
