#include "fdkl/errors.hpp"
#include "fdkl/spectral_basis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

// Kernel c(s,t) = c0 + P exp(-a|s-t|) on [-T, T] with c0 = P = 1/4, a = 2 gamma.
//
// Odd eigenfunctions are sin(w t) with w cos(wT) + a sin(wT) = 0.
// Even eigenfunctions are cos(w t) + B (or cosh(k t) + B): the exponential part
// maps cos(w t) to a multiple of itself plus a cosh(a t) boundary term, and the
// constant part adds a constant. Cancelling the cosh term fixes B; matching the
// constants gives the characteristic equation. lambda = 2aP / (a^2 + w^2) in
// both cases (w^2 -> -k^2 on the hyperbolic branch).

namespace fdkl {

namespace {

constexpr double kConst = 0.25;
constexpr double kAmp = 0.25;

// On the hyperbolic branch everything is divided by cosh(kT), so the mode
// reads cosh(k t)/cosh(kT) + B and all terms stay O(1).
struct EvenBranch {
    double a;
    double tau;
    bool hyperbolic;

    // cos(wT), or 1 on the scaled hyperbolic branch
    double c(double w) const { return hyperbolic ? 1.0 : std::cos(w * tau); }
    // sin(wT)/w, or tanh(kT)/k
    double s_over_w(double w) const { return hyperbolic ? std::tanh(w * tau) / w : std::sin(w * tau) / w; }
    // w sin(wT), or -k tanh(kT)
    double w_s(double w) const { return hyperbolic ? -w * std::tanh(w * tau) : w * std::sin(w * tau); }
    double denom(double w) const { return hyperbolic ? a * a - w * w : a * a + w * w; }

    double offset(double w) const { return -a * (a * c(w) - w_s(w)) / denom(w); }
    double eigenvalue(double w) const { return 2.0 * a * kAmp / denom(w); }

    // Characteristic function and a magnitude scale for relative residuals.
    std::pair<double, double> characteristic(double w) const {
        const double b = offset(w);
        const double lhs = b * (eigenvalue(w) - 2.0 * kAmp / a - 2.0 * tau * kConst);
        const double rhs = 2.0 * kConst * s_over_w(w);
        return {lhs - rhs, std::abs(lhs) + std::abs(rhs)};
    }

    double norm_squared(double w, double b) const {
        const double cross = 4.0 * b * s_over_w(w);
        double sq = 0.0;
        if (hyperbolic) {
            const double ch = std::cosh(w * tau);
            sq = tau / (ch * ch) + std::tanh(w * tau) / w;
        } else {
            sq = tau + std::sin(2.0 * w * tau) / (2.0 * w);
        }
        return sq + cross + 2.0 * tau * b * b;
    }
};

// Bisection to adjacent doubles; f(lo) and f(hi) must differ in sign.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

void scan_even(const EvenBranch& br, double lo, double hi, std::size_t steps, std::vector<CosineMode>& out) {
    auto f = [&](double w) { return br.characteristic(w).first; };
    const double h = (hi - lo) / static_cast<double>(steps);
    double x0 = lo;
    double f0 = f(x0);
    for (std::size_t i = 1; i <= steps; ++i) {
        const double x1 = lo + h * static_cast<double>(i);
        const double f1 = f(x1);
        if (std::isfinite(f0) && std::isfinite(f1) && (f0 < 0.0) != (f1 < 0.0)) {
            const double w = bisect(f, x0, x1);
            const auto [val, scale] = br.characteristic(w);
            const double residual = std::abs(val) / std::max(scale, 1e-300);
            // sign changes across poles are not roots
            if (residual < 1e-8) {
                CosineMode m;
                m.kind = br.hyperbolic ? CosineMode::Kind::EvenHyperbolic : CosineMode::Kind::Even;
                m.omega = w;
                m.tau = br.tau;
                m.offset = br.offset(w);
                m.eigenvalue = br.eigenvalue(w);
                m.norm = 1.0 / std::sqrt(br.norm_squared(w, m.offset));
                m.residual = residual;
                out.push_back(m);
            }
        }
        x0 = x1;
        f0 = f1;
    }
}

} // namespace

double CosineMode::operator()(double t) const {
    switch (kind) {
    case Kind::Even: return norm * (std::cos(omega * t) + offset);
    case Kind::EvenHyperbolic: return norm * (std::cosh(omega * t) / std::cosh(omega * tau) + offset);
    case Kind::Odd: return norm * std::sin(omega * t);
    }
    return 0.0;
}

std::vector<CosineMode> cosine_example_modes(double gamma, double tau, std::size_t d) {
    if (!(tau > 0.0) || !(gamma > 1.0 / (2.0 * tau))) throw ArgumentError("cosine example requires tau > 0 and gamma > 1/(2 tau)");
    if (d == 0) throw ArgumentError("basis size d must be at least 1");
    const double a = 2.0 * gamma;
    const double pi = std::numbers::pi;
    const double cell = pi / tau;

    std::vector<CosineMode> modes;
    // hyperbolic even branch: k in (0, a)
    {
        const EvenBranch br{a, tau, true};
        const double eps = 1e-6 * a;
        scan_even(br, eps, a - eps, 4000, modes);
    }

    std::size_t cells = d / 2 + 4;
    for (;;) {
        std::vector<CosineMode> found = modes;
        const double w_max = cell * static_cast<double>(cells);
        scan_even(EvenBranch{a, tau, false}, 1e-6 * cell, w_max, 64 * cells, found);
        // odd branch: one root of w cos(wT) + a sin(wT) in each ((k-1/2) pi/T, k pi/T)
        for (std::size_t k = 1; k <= cells; ++k) {
            auto g = [&](double w) { return w * std::cos(w * tau) + a * std::sin(w * tau); };
            const double lo = (static_cast<double>(k) - 0.5) * cell;
            const double hi = static_cast<double>(k) * cell;
            const double w = bisect(g, lo, hi);
            CosineMode m;
            m.kind = CosineMode::Kind::Odd;
            m.omega = w;
            m.tau = tau;
            m.eigenvalue = 2.0 * a * kAmp / (a * a + w * w);
            m.norm = 1.0 / std::sqrt(tau - std::sin(2.0 * w * tau) / (2.0 * w));
            m.residual = std::abs(g(w)) / (std::abs(w) + a);
            found.push_back(m);
        }
        std::sort(found.begin(), found.end(), [](const CosineMode& x, const CosineMode& y) { return x.eigenvalue > y.eigenvalue; });
        const double lambda_cut = 2.0 * a * kAmp / (a * a + w_max * w_max);
        if (found.size() >= d && found[d - 1].eigenvalue > lambda_cut) {
            found.resize(d);
            for (auto& m : found)
                if (m(-tau) < 0.0) m.norm = -m.norm;
            return found;
        }
        cells *= 2;
    }
}

SpectralBasis analytic_cosine_basis(double gamma, double tau, std::size_t d, std::size_t n_nodes) {
    const auto modes = cosine_example_modes(gamma, tau, d);
    Grid grid = Grid::uniform(-tau, tau, n_nodes);
    Eigen::MatrixXd table(static_cast<Eigen::Index>(n_nodes), static_cast<Eigen::Index>(d));
    std::vector<double> eigenvalues;
    for (std::size_t k = 0; k < d; ++k) {
        eigenvalues.push_back(modes[k].eigenvalue);
        for (std::size_t j = 0; j < n_nodes; ++j)
            table(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = modes[k](grid.nodes()[j]);
    }
    auto weights = grid.trapezoid_weights();
    return SpectralBasis(std::move(eigenvalues), std::move(table), std::move(grid), std::move(weights), Quadrature::Trapezoid,
                         Kernel::cosine_example(gamma, tau));
}

} // namespace fdkl
