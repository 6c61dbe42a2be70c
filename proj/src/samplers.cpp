#include "fdkl/samplers.hpp"

#include "fdkl/errors.hpp"
#include "fdkl/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace fdkl {

CovarianceFactor factor_covariance(const Eigen::MatrixXd& covariance) {
    const auto n = covariance.rows();
    if (n == 0 || covariance.cols() != n) throw ArgumentError("covariance must be a nonempty square matrix");
    const double scale = covariance.trace() / static_cast<double>(n);
    std::ostringstream tried;
    for (double rel = 1e-12; rel <= 1e-6 * (1 + 1e-9); rel *= 10.0) {
        const double jitter = rel * scale;
        Eigen::MatrixXd a = covariance;
        a.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() == Eigen::Success) return {llt.matrixL(), jitter};
        tried << ' ' << jitter;
    }
    throw NumericalError("Cholesky factorization failed for jitter levels:" + tried.str());
}

namespace {

PathEnsemble sample_with_factor(const CovarianceFactor& factor, const Grid& grid, std::size_t n_samples, const SeededRng& rng,
                                const std::string& label) {
    if (n_samples == 0) throw ArgumentError("n_samples must be at least 1");
    const auto n = factor.lower.rows();
    // fixed-width, zero-padded column blocks: a sample's arithmetic does not depend
    // on the sample count or the thread count
    constexpr std::size_t block = 128;
    const std::size_t n_blocks = (n_samples + block - 1) / block;
    const auto width = static_cast<Eigen::Index>(block);
    Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(n_blocks * block));
    Eigen::MatrixXd padded(n, xi.cols());
    parallel_for(
        n_blocks,
        [&](std::size_t b) {
            const std::size_t end = std::min(n_samples, (b + 1) * block);
            for (std::size_t s = b * block; s < end; ++s) {
                auto engine = rng.engine(s);
                std::normal_distribution<double> normal;
                for (Eigen::Index j = 0; j < n; ++j) xi(j, static_cast<Eigen::Index>(s)) = normal(engine);
            }
            const auto first = static_cast<Eigen::Index>(b * block);
            padded.middleCols(first, width).noalias() = factor.lower.triangularView<Eigen::Lower>() * xi.middleCols(first, width);
        },
        1);
    Eigen::MatrixXd out = padded.leftCols(static_cast<Eigen::Index>(n_samples));
    return PathEnsemble(grid, {std::move(out)}, {label}, rng);
}

} // namespace

PathEnsemble sample_gaussian_process(const Kernel& kernel, const Grid& grid, std::size_t n_samples, const SeededRng& rng) {
    if (kernel.dim() != 1 || grid.dim() != 1) throw ArgumentError("sample_gaussian_process needs a 1D kernel and grid");
    return sample_with_factor(factor_covariance(kernel.matrix(grid)), grid, n_samples, rng, "G");
}

PathEnsemble sample_gaussian_field_2d(const Kernel& kernel, const Grid& grid, std::size_t n_samples, const SeededRng& rng,
                                      std::size_t max_nodes) {
    if (kernel.dim() != 2 || grid.dim() != 2) throw ArgumentError("sample_gaussian_field_2d needs a 2D kernel and tensor grid");
    if (grid.size() > max_nodes)
        throw ArgumentError("grid has " + std::to_string(grid.size()) + " nodes, above the cap of " + std::to_string(max_nodes) +
                            "; use a coarser mesh");
    return sample_with_factor(factor_covariance(kernel.matrix(grid)), grid, n_samples, rng, "G");
}

PathEnsemble translation_apply(const std::vector<Marginal>& marginals, const PathEnsemble& gaussian) {
    if (marginals.size() != gaussian.n_components()) throw ArgumentError("translation needs one marginal per component");
    std::vector<Eigen::MatrixXd> comps;
    for (std::size_t c = 0; c < gaussian.n_components(); ++c) {
        const auto& g = gaussian.component(c);
        Eigen::MatrixXd x(g.rows(), g.cols());
        const Marginal& m = marginals[c];
        parallel_for(static_cast<std::size_t>(g.cols()), [&](std::size_t s) {
            const auto si = static_cast<Eigen::Index>(s);
            for (Eigen::Index j = 0; j < g.rows(); ++j) x(j, si) = m.from_gaussian(g(j, si));
        });
        comps.push_back(std::move(x));
    }
    return PathEnsemble(gaussian.grid(), std::move(comps), gaussian.labels(), gaussian.seed());
}

PathEnsemble translation_apply(const Marginal& marginal, const PathEnsemble& gaussian) {
    return translation_apply(std::vector<Marginal>(gaussian.n_components(), marginal), gaussian);
}

PathEnsemble sample_ou(double rho, const Grid& grid, std::size_t n_samples, const SeededRng& rng) {
    if (!(rho > 0.0)) throw ArgumentError("OU rate must be positive");
    if (grid.dim() != 1) throw ArgumentError("OU sampler needs a 1D grid");
    if (!grid.is_uniform()) throw ArgumentError("OU sampler needs a uniform grid");
    if (n_samples == 0) throw ArgumentError("n_samples must be at least 1");
    const auto n = static_cast<Eigen::Index>(grid.size());
    const double a = std::exp(-rho * grid.spacing());
    const double b = std::sqrt(1.0 - a * a);
    Eigen::MatrixXd out(n, static_cast<Eigen::Index>(n_samples));
    parallel_for(n_samples, [&](std::size_t s) {
        auto engine = rng.engine(s);
        std::normal_distribution<double> normal;
        const auto si = static_cast<Eigen::Index>(s);
        out(0, si) = normal(engine);
        for (Eigen::Index j = 1; j < n; ++j) out(j, si) = a * out(j - 1, si) + b * normal(engine);
    });
    return PathEnsemble(grid, {std::move(out)}, {"Y"}, rng);
}

PathEnsemble piecewise_linear_reference(const PathEnsemble& fine, std::size_t n_intervals) {
    if (fine.grid().dim() != 1) throw ArgumentError("piecewise-linear reference needs a 1D grid");
    const std::size_t m = fine.n_nodes() - 1;
    if (n_intervals == 0 || m == 0 || m % n_intervals != 0)
        throw ArgumentError("N=" + std::to_string(n_intervals) + " does not divide the " + std::to_string(m) + " fine intervals");
    const std::size_t stride = m / n_intervals;
    const auto& t = fine.grid().nodes();
    std::vector<Eigen::MatrixXd> comps;
    for (std::size_t c = 0; c < fine.n_components(); ++c) {
        const auto& x = fine.component(c);
        Eigen::MatrixXd out(x.rows(), x.cols());
        for (Eigen::Index s = 0; s < x.cols(); ++s)
            for (std::size_t j = 0; j <= m; ++j) {
                const std::size_t k0 = std::min(j / stride, n_intervals - 1) * stride;
                const std::size_t k1 = k0 + stride;
                const double f = (t[j] - t[k0]) / (t[k1] - t[k0]);
                out(static_cast<Eigen::Index>(j), s) =
                    (1.0 - f) * x(static_cast<Eigen::Index>(k0), s) + f * x(static_cast<Eigen::Index>(k1), s);
            }
        comps.push_back(std::move(out));
    }
    return PathEnsemble(fine.grid(), std::move(comps), fine.labels(), fine.seed());
}

} // namespace fdkl

namespace fdkl {

TranslationCovariance::TranslationCovariance(const Marginal& marginal, std::size_t order) {
    if (order < 1) throw ArgumentError("Hermite order must be at least 1");
    // trapezoid on [-10, 10] against the normal density; the integrands are smooth and decay like exp(-z^2/2)
    const int n = 8001;
    const double h = 20.0 / (n - 1);
    std::vector<double> b(order + 1, 0.0);
    double second = 0.0;
    std::vector<double> herm(order + 1);
    for (int i = 0; i < n; ++i) {
        const double z = -10.0 + h * i;
        const double w = h * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi) * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
        const double g = marginal.from_gaussian(z);
        herm[0] = 1.0;
        herm[1] = z;
        for (std::size_t k = 1; k < order; ++k)
            herm[k + 1] = (z * herm[k] - std::sqrt(static_cast<double>(k)) * herm[k - 1]) / std::sqrt(static_cast<double>(k + 1));
        for (std::size_t k = 0; k <= order; ++k) b[k] += w * g * herm[k];
        second += w * g * g;
    }
    mean_ = b[0];
    variance_ = second - mean_ * mean_;
    double captured = 0.0;
    for (std::size_t k = 1; k <= order; ++k) {
        weights_.push_back(b[k] * b[k]);
        captured += b[k] * b[k];
    }
    remainder_ = std::max(0.0, variance_ - captured);
}

double TranslationCovariance::operator()(double rho) const {
    if (!(rho >= -1.0 - 1e-12 && rho <= 1.0 + 1e-12)) throw ArgumentError("correlation must lie in [-1, 1]");
    rho = std::clamp(rho, -1.0, 1.0);
    double sum = 0.0, power = 1.0;
    for (double w : weights_) {
        power *= rho;
        sum += w * power;
    }
    return sum + remainder_ * power;
}

Eigen::MatrixXd translation_covariance(const Kernel& kernel, const Marginal& marginal, const Grid& grid) {
    if (std::abs(kernel.variance() - 1.0) > 1e-12) throw ArgumentError("translation covariance needs a unit-variance kernel");
    const TranslationCovariance map(marginal);
    Eigen::MatrixXd c = kernel.matrix(grid);
    for (Eigen::Index j = 0; j < c.cols(); ++j)
        for (Eigen::Index i = 0; i < c.rows(); ++i) c(i, j) = map(c(i, j));
    return c;
}

} // namespace fdkl
