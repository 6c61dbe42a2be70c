#include "fdkl/kernels.hpp"

#include "fdkl/errors.hpp"

#include <cmath>
#include <sstream>

namespace fdkl {

Box Box::interval(double lo, double hi) {
    if (!(hi > lo)) throw ArgumentError("interval upper bound must exceed lower bound");
    return Box{1, {lo, 0.0}, {hi, 0.0}};
}

Box Box::rectangle(double lo1, double hi1, double lo2, double hi2) {
    if (!(hi1 > lo1) || !(hi2 > lo2)) throw ArgumentError("rectangle sides must have positive length");
    return Box{2, {lo1, lo2}, {hi1, hi2}};
}

bool Box::contains(const Point& p, double tol) const {
    for (std::size_t k = 0; k < dim; ++k) {
        const double slack = tol * std::max(1.0, hi[k] - lo[k]);
        if (p[k] < lo[k] - slack || p[k] > hi[k] + slack) return false;
    }
    return true;
}

double Box::measure() const {
    double m = 1.0;
    for (std::size_t k = 0; k < dim; ++k) m *= hi[k] - lo[k];
    return m;
}

std::string to_string(KernelFamily family) {
    switch (family) {
    case KernelFamily::MaternLike: return "matern_like";
    case KernelFamily::OU: return "ou";
    case KernelFamily::CosineExample: return "cosine_example";
    case KernelFamily::Gauss2D: return "gauss2d";
    }
    return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
    if (name == "matern_like") return KernelFamily::MaternLike;
    if (name == "ou") return KernelFamily::OU;
    if (name == "cosine_example") return KernelFamily::CosineExample;
    if (name == "gauss2d") return KernelFamily::Gauss2D;
    throw ArgumentError("unknown kernel family '" + name + "'");
}

Kernel::Kernel(KernelFamily family, double parameter, Box domain)
    : family_(family), parameter_(parameter), domain_(domain) {
    if (!std::isfinite(parameter)) throw ArgumentError("kernel parameter must be finite");
    const std::size_t want_dim = family == KernelFamily::Gauss2D ? 2 : 1;
    if (domain.dim != want_dim) throw ArgumentError(to_string(family) + " kernel needs a " + std::to_string(want_dim) + "D domain");
    switch (family) {
    case KernelFamily::Gauss2D:
        if (!(parameter > -1.0 && parameter < 1.0)) throw ArgumentError("gauss2d correlation parameter must lie in (-1, 1)");
        break;
    case KernelFamily::CosineExample: {
        if (!(parameter > 0.0)) throw ArgumentError("cosine_example rate must be positive");
        const double tau = 0.5 * (domain.hi[0] - domain.lo[0]);
        if (!(parameter > 1.0 / (2.0 * tau)))
            throw ArgumentError("cosine_example requires gamma > 1/(2 tau)");
        break;
    }
    default:
        if (!(parameter > 0.0)) throw ArgumentError(to_string(family) + " parameter must be positive");
    }
}

Kernel Kernel::matern_like(double nu, double tau) { return Kernel(KernelFamily::MaternLike, nu, Box::interval(0.0, tau)); }

Kernel Kernel::ou(double rho, double tau) { return Kernel(KernelFamily::OU, rho, Box::interval(0.0, tau)); }

Kernel Kernel::cosine_example(double gamma, double tau) {
    if (!(tau > 0.0)) throw ArgumentError("cosine_example half-width must be positive");
    return Kernel(KernelFamily::CosineExample, gamma, Box::interval(-tau, tau));
}

Kernel Kernel::gauss2d(double rho, double tau1, double tau2) {
    return Kernel(KernelFamily::Gauss2D, rho, Box::rectangle(0.0, tau1, 0.0, tau2));
}

double Kernel::at_lag(double h1, double h2) const {
    const double r = std::abs(h1);
    switch (family_) {
    case KernelFamily::MaternLike: return (1.0 + parameter_ * r) * std::exp(-parameter_ * r);
    case KernelFamily::OU: return std::exp(-parameter_ * r);
    case KernelFamily::CosineExample: return 0.25 * (1.0 + std::exp(-2.0 * parameter_ * r));
    case KernelFamily::Gauss2D: return std::exp(-0.5 * (h1 * h1 + 2.0 * parameter_ * h1 * h2 + h2 * h2));
    }
    return 0.0;
}

double Kernel::operator()(const Point& s, const Point& t) const {
    if (!domain_.contains(s) || !domain_.contains(t)) {
        std::ostringstream msg;
        msg << to_string(family_) << " kernel evaluated outside its domain at (" << s[0] << ", " << s[1] << ") / (" << t[0]
            << ", " << t[1] << ")";
        throw DomainError(msg.str());
    }
    return at_lag(t[0] - s[0], t[1] - s[1]);
}

double Kernel::variance() const { return at_lag(0.0, 0.0); }

Eigen::MatrixXd Kernel::matrix(const Grid& grid) const {
    if (grid.dim() != dim()) throw ArgumentError("grid dimension does not match kernel dimension");
    const std::size_t n = grid.size();
    for (std::size_t j = 0; j < n; ++j)
        if (!domain_.contains(grid.point(j))) throw DomainError("grid node " + std::to_string(j) + " lies outside the kernel domain");
    Eigen::MatrixXd c(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const Point pj = grid.point(j);
        c(j, j) = variance();
        for (std::size_t i = j + 1; i < n; ++i) {
            const Point pi = grid.point(i);
            const double v = at_lag(pi[0] - pj[0], pi[1] - pj[1]);
            c(i, j) = v;
            c(j, i) = v;
        }
    }
    return c;
}

} // namespace fdkl
