#include "fdkl/errors.hpp"
#include "fdkl/spectral_basis.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fdkl {

namespace {

// Top-d eigenpairs of the symmetric matrix a (overwritten), largest first.
void top_eigenpairs(Eigen::MatrixXd& a, std::size_t d, std::vector<double>& values, Eigen::MatrixXd& vectors) {
    const auto n = static_cast<lapack_int>(a.rows());
    const auto want = static_cast<lapack_int>(d);
    std::vector<double> w(static_cast<std::size_t>(n));
    Eigen::MatrixXd z(n, want);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(want));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0, n - want + 1, n, 0.0,
                                           &found, w.data(), z.data(), n, support.data());
    if (info != 0 || found != want) {
        std::ostringstream msg;
        msg << "symmetric eigensolve failed (dsyevr info=" << info << ", matrix size " << n << ", requested " << want
            << ", found " << found << ")";
        throw NumericalError(msg.str());
    }
    // dsyevr returns ascending order
    values.assign(static_cast<std::size_t>(want), 0.0);
    vectors.resize(n, want);
    for (lapack_int k = 0; k < want; ++k) {
        values[static_cast<std::size_t>(k)] = w[static_cast<std::size_t>(want - 1 - k)];
        vectors.col(k) = z.col(want - 1 - k);
    }
}

} // namespace

SpectralBasis nystrom_from_covariance(const Eigen::MatrixXd& covariance, const Grid& grid, std::vector<double> weights,
                                      Quadrature rule, std::size_t d) {
    const std::size_t n = grid.size();
    if (d == 0) throw ArgumentError("basis size d must be at least 1");
    if (d > n) throw ArgumentError("basis size d=" + std::to_string(d) + " exceeds node count " + std::to_string(n));
    if (covariance.rows() != static_cast<Eigen::Index>(n) || covariance.cols() != static_cast<Eigen::Index>(n))
        throw ArgumentError("covariance matrix does not match the grid");
    if (weights.size() != n) throw ArgumentError("quadrature weights do not match the grid");

    Eigen::VectorXd sqrt_w(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        if (!(weights[j] > 0.0)) throw ArgumentError("quadrature weights must be positive");
        sqrt_w(static_cast<Eigen::Index>(j)) = std::sqrt(weights[j]);
    }
    // symmetric form W^1/2 C W^1/2
    Eigen::MatrixXd a = sqrt_w.asDiagonal() * covariance * sqrt_w.asDiagonal();
    std::vector<double> values;
    Eigen::MatrixXd vectors;
    top_eigenpairs(a, d, values, vectors);

    // round-off negatives are clamped and dropped
    std::size_t keep = 0;
    while (keep < values.size() && values[keep] > 0.0) ++keep;
    values.resize(keep);
    Eigen::MatrixXd modes = sqrt_w.cwiseInverse().asDiagonal() * vectors.leftCols(static_cast<Eigen::Index>(keep));
    return SpectralBasis(std::move(values), std::move(modes), grid, std::move(weights), rule);
}

namespace {

SpectralBasis with_kernel(const SpectralBasis& b, const Kernel& kernel) {
    return SpectralBasis(b.eigenvalues(), b.modes(), b.nodes(), b.weights(), b.rule(), kernel);
}

} // namespace

SpectralBasis nystrom_on_grid(const Kernel& kernel, const Grid& grid, std::size_t d) {
    if (d > grid.size()) throw ArgumentError("basis size d=" + std::to_string(d) + " exceeds node count " + std::to_string(grid.size()));
    return with_kernel(nystrom_from_covariance(kernel.matrix(grid), grid, grid.trapezoid_weights(), Quadrature::Trapezoid, d), kernel);
}

SpectralBasis nystrom_eigendecomposition(const Kernel& kernel, std::size_t n_nodes, Quadrature quadrature, std::size_t d) {
    if (n_nodes < 2) throw ArgumentError("Nystrom discretization needs at least 2 nodes per axis");
    const std::size_t total = kernel.dim() == 2 ? n_nodes * n_nodes : n_nodes;
    if (d > total) throw ArgumentError("basis size d=" + std::to_string(d) + " exceeds node count " + std::to_string(total));
    const Box& box = kernel.domain();

    auto axis_rule = [&](std::size_t k) {
        if (quadrature == Quadrature::Trapezoid) {
            Grid g = Grid::uniform(box.lo[k], box.hi[k], n_nodes);
            return QuadratureRule{g.nodes(), g.trapezoid_weights()};
        }
        return gauss_legendre(box.lo[k], box.hi[k], n_nodes);
    };

    if (kernel.dim() == 1) {
        QuadratureRule r = axis_rule(0);
        Grid grid = Grid::from_nodes(r.nodes);
        return with_kernel(nystrom_from_covariance(kernel.matrix(grid), grid, std::move(r.weights), quadrature, d), kernel);
    }
    QuadratureRule r1 = axis_rule(0);
    QuadratureRule r2 = axis_rule(1);
    Grid grid = Grid::tensor(Grid::from_nodes(r1.nodes), Grid::from_nodes(r2.nodes));
    std::vector<double> w(grid.size());
    for (std::size_t i2 = 0; i2 < n_nodes; ++i2)
        for (std::size_t i1 = 0; i1 < n_nodes; ++i1) w[i1 + n_nodes * i2] = r1.weights[i1] * r2.weights[i2];
    return with_kernel(nystrom_from_covariance(kernel.matrix(grid), grid, std::move(w), quadrature, d), kernel);
}

} // namespace fdkl
