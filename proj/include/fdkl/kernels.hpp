#pragma once

#include "fdkl/grid.hpp"

#include <Eigen/Dense>

#include <string>

namespace fdkl {

/// Axis-aligned interval (dim 1) or rectangle (dim 2).
struct Box {
    std::size_t dim = 1;
    Point lo{0.0, 0.0};
    Point hi{1.0, 0.0};

    static Box interval(double lo, double hi);
    static Box rectangle(double lo1, double hi1, double lo2, double hi2);
    bool contains(const Point& p, double tol = 1e-9) const;
    double measure() const;
};

enum class KernelFamily {
    MaternLike,    ///< (1 + nu r) exp(-nu r)
    OU,            ///< exp(-rho r)
    CosineExample, ///< (1 + exp(-2 gamma r)) / 4 on [-tau, tau]
    Gauss2D,       ///< exp(-(h1^2 + 2 rho h1 h2 + h2^2) / 2)
};

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Stationary correlation function on a bounded domain.
class Kernel {
public:
    static Kernel matern_like(double nu, double tau);
    static Kernel ou(double rho, double tau);
    /// Domain is [-tau, tau]; requires gamma > 1/(2 tau).
    static Kernel cosine_example(double gamma, double tau);
    static Kernel gauss2d(double rho, double tau1, double tau2);

    /// Generic constructor; validates parameter ranges.
    Kernel(KernelFamily family, double parameter, Box domain);

    KernelFamily family() const { return family_; }
    double parameter() const { return parameter_; }
    const Box& domain() const { return domain_; }
    std::size_t dim() const { return domain_.dim; }

    /// c(s, t); throws DomainError when either point is outside the domain.
    double operator()(const Point& s, const Point& t) const;
    double operator()(double s, double t) const { return (*this)({s, 0.0}, {t, 0.0}); }

    /// Correlation as a function of the lag t - s, without domain checks.
    double at_lag(double h1, double h2 = 0.0) const;

    /// c(t, t).
    double variance() const;

    /// Dense matrix c(x_i, x_j) on all grid nodes.
    Eigen::MatrixXd matrix(const Grid& grid) const;

private:
    KernelFamily family_;
    double parameter_;
    Box domain_;
};

} // namespace fdkl
