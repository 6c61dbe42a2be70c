#pragma once

#include "fdkl/ensemble.hpp"
#include "fdkl/kernels.hpp"
#include "fdkl/marginals.hpp"
#include "fdkl/rng.hpp"

#include <Eigen/Dense>

#include <vector>

namespace fdkl {

/// Lower Cholesky factor of a covariance matrix plus the diagonal jitter it needed.
struct CovarianceFactor {
    Eigen::MatrixXd lower;
    double jitter = 0.0;
};

/// Cholesky of cov + jitter I. Jitter starts at 1e-12 trace/n and grows by 10x
/// up to 1e-6 trace/n; NumericalError lists the attempted levels on failure.
CovarianceFactor factor_covariance(const Eigen::MatrixXd& covariance);

/// Zero-mean Gaussian paths with covariance c(t_i, t_j) on a 1D grid.
/// Sample s draws its normals from rng.engine(s).
PathEnsemble sample_gaussian_process(const Kernel& kernel, const Grid& grid, std::size_t n_samples, const SeededRng& rng);

/// Zero-mean Gaussian fields on a 2D tensor grid with at most max_nodes nodes.
PathEnsemble sample_gaussian_field_2d(const Kernel& kernel, const Grid& grid, std::size_t n_samples, const SeededRng& rng,
                                      std::size_t max_nodes = 4096);

/// Pointwise X = F^{-1}(Phi(G)) on every component; sample order is preserved.
PathEnsemble translation_apply(const Marginal& marginal, const PathEnsemble& gaussian);
/// One marginal per component.
PathEnsemble translation_apply(const std::vector<Marginal>& marginals, const PathEnsemble& gaussian);

/// Stationary OU paths by the exact AR(1) recursion on a uniform grid.
PathEnsemble sample_ou(double rho, const Grid& grid, std::size_t n_samples, const SeededRng& rng);

/// Paths interpolating the fine paths linearly between the N + 1 knots
/// t_i = t_0 + i (t_M - t_0)/N; requires N to divide the fine interval count M.
PathEnsemble piecewise_linear_reference(const PathEnsemble& fine, std::size_t n_intervals);

} // namespace fdkl

namespace fdkl {

/// Covariance of Y(s) = F^{-1}(Phi(G(s))) and Y(t) as a function of the
/// correlation rho of the standard Gaussian pair (G(s), G(t)), from the Hermite
/// expansion sum_k a_k^2 rho^k / k! of the translation map.
class TranslationCovariance {
public:
    explicit TranslationCovariance(const Marginal& marginal, std::size_t order = 60);
    double operator()(double rho) const;
    double mean() const { return mean_; }
    double variance() const { return variance_; }
    /// a_k^2 / k!, k = 1..order
    const std::vector<double>& weights() const { return weights_; }

private:
    double mean_ = 0.0;
    double variance_ = 0.0;
    double remainder_ = 0.0; ///< variance not captured by the truncated series, carried by rho^order
    std::vector<double> weights_;
};

/// Covariance matrix of the translation process over a grid; the kernel must have unit variance.
Eigen::MatrixXd translation_covariance(const Kernel& kernel, const Marginal& marginal, const Grid& grid);

} // namespace fdkl
