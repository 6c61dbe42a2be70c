#pragma once

#include "fdkl/grid.hpp"
#include "fdkl/kernels.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace fdkl {

enum class Quadrature { Trapezoid, GaussLegendre };

std::string to_string(Quadrature q);
Quadrature quadrature_from_string(const std::string& name);

/// Eigenvalues and tabulated eigenfunctions of a correlation kernel.
///
/// Eigenvalues are sorted descending and nonnegative. Column k of modes()
/// holds phi_k at the quadrature nodes, normalized so that
/// sum_j w_j phi_k(t_j) phi_l(t_j) = delta_kl. Each mode is signed so that its
/// first node value is nonnegative.
class SpectralBasis {
public:
    SpectralBasis(std::vector<double> eigenvalues, Eigen::MatrixXd modes, Grid nodes, std::vector<double> weights,
                  Quadrature rule, std::optional<Kernel> kernel = std::nullopt);

    std::size_t size() const { return eigenvalues_.size(); }
    std::size_t n_nodes() const { return nodes_.size(); }

    const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    double eigenvalue(std::size_t k) const { return eigenvalues_.at(k); }
    const Eigen::MatrixXd& modes() const { return modes_; }
    const Grid& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    Quadrature rule() const { return rule_; }
    const std::optional<Kernel>& kernel() const { return kernel_; }

    /// C_k = max_j phi_k(t_j)^2.
    const std::vector<double>& sup_squares() const { return sup_squares_; }

    /// max |Phi^T W Phi - I|.
    double orthonormality_residual() const;

    /// First d modes.
    SpectralBasis truncated(std::size_t d) const;

    /// Modes linearly interpolated onto a 1D grid inside the node range. The
    /// returned basis keeps the eigenvalues, uses trapezoid weights of `grid`
    /// and is not renormalized.
    SpectralBasis interpolated_to(const Grid& grid) const;

private:
    std::vector<double> eigenvalues_;
    Eigen::MatrixXd modes_;
    Grid nodes_;
    std::vector<double> weights_;
    Quadrature rule_;
    std::optional<Kernel> kernel_;
    std::vector<double> sup_squares_;
};

/// Top-d eigenpairs of the kernel on n_nodes quadrature nodes (per axis for 2D kernels).
SpectralBasis nystrom_eigendecomposition(const Kernel& kernel, std::size_t n_nodes, Quadrature quadrature, std::size_t d);

/// Top-d eigenpairs of the kernel discretized on a given grid with trapezoid weights.
SpectralBasis nystrom_on_grid(const Kernel& kernel, const Grid& grid, std::size_t d);

/// Top-d eigenpairs of an arbitrary symmetric covariance matrix on (grid, weights).
/// Used for covariances that are not a closed-form kernel.
SpectralBasis nystrom_from_covariance(const Eigen::MatrixXd& covariance, const Grid& grid, std::vector<double> weights,
                                      Quadrature rule, std::size_t d);

/// One closed-form eigenpair of the CosineExample kernel.
///
/// Even modes are cos(omega t) + offset (cosh(omega t)/cosh(omega tau) + offset
/// for the hyperbolic top mode); odd modes are sin(omega t).
struct CosineMode {
    enum class Kind { Even, EvenHyperbolic, Odd };
    Kind kind = Kind::Even;
    double omega = 0.0;      ///< angular frequency (or hyperbolic rate)
    double tau = 1.0;        ///< half-width of the domain
    double offset = 0.0;     ///< additive constant of even modes
    double norm = 1.0;       ///< 1 / L2 norm on [-tau, tau]
    double eigenvalue = 0.0;
    double residual = 0.0;   ///< characteristic-equation residual at the root

    double operator()(double t) const;
};

/// Leading d eigenpairs of CosineExample(gamma) on [-tau, tau], sorted by eigenvalue.
std::vector<CosineMode> cosine_example_modes(double gamma, double tau, std::size_t d);

/// cosine_example_modes tabulated on a grid over [-tau, tau] (trapezoid weights).
SpectralBasis analytic_cosine_basis(double gamma, double tau, std::size_t d, std::size_t n_nodes = 1001);

/// Partial sums S_d = sum_{k<=d} lambda_k C_k with their terms.
struct BoundDiagnostic {
    std::vector<double> terms;
    std::vector<double> partial_sums;
};

BoundDiagnostic uniform_bound_condition(const SpectralBasis& basis);

/// Writes <stem>.csv (t[, t2], phi_1..phi_d per node) and <stem>.json.
void write_basis(const SpectralBasis& basis, const std::string& stem);
SpectralBasis read_basis(const std::string& stem);

} // namespace fdkl
