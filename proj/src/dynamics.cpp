#include "fdkl/dynamics.hpp"

#include "fdkl/errors.hpp"
#include "fdkl/parallel.hpp"

#include <cmath>
#include <functional>

namespace fdkl {

double OscillatorParams::psi() const { return std::sqrt(stiffness - 0.25 * damping * damping); }

void OscillatorParams::validate() const {
    if (!(damping > 0.0) || !(stiffness > 0.0) || !(gain > 0.0)) throw ArgumentError("oscillator parameters must be positive");
    if (!(stiffness - 0.25 * damping * damping > 0.0))
        throw ArgumentError("oscillator must be underdamped: stiffness - damping^2/4 > 0");
}

namespace {

// impulse response reversed: rev[i] = h((n - 1 - i) dt)
Eigen::VectorXd reversed_impulse(const OscillatorParams& p, Eigen::Index n, double dt) {
    const double psi = p.psi();
    Eigen::VectorXd rev(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double r = static_cast<double>(k) * dt;
        rev(n - 1 - k) = p.gain / psi * std::exp(-0.5 * p.damping * r) * std::sin(psi * r);
    }
    return rev;
}

void convolve_into(const Eigen::VectorXd& rev, const Eigen::Ref<const Eigen::VectorXd>& f, double dt, Eigen::Ref<Eigen::VectorXd> out) {
    const Eigen::Index n = f.size();
    out(0) = 0.0;
    for (Eigen::Index m = 1; m < n; ++m) {
        // full-weight sum minus half weights at both ends; h(0) = 0 kills the j = m end
        const double full = rev.segment(n - 1 - m, m + 1).dot(f.head(m + 1));
        out(m) = dt * (full - 0.5 * rev(n - 1 - m) * f(0) - 0.5 * rev(n - 1) * f(m));
    }
}

void check_grid(const Grid& grid) {
    if (grid.dim() != 1 || !grid.is_uniform()) throw ArgumentError("oscillator responses need a uniform 1D grid");
    if (std::abs(grid.lo()) > 1e-12) throw ArgumentError("oscillator responses need a grid starting at t = 0");
}

} // namespace

Eigen::VectorXd duhamel_response(const OscillatorParams& params, const Eigen::Ref<const Eigen::VectorXd>& forcing, double dt) {
    params.validate();
    if (!(dt > 0.0)) throw ArgumentError("time step must be positive");
    if (!forcing.allFinite()) throw ArgumentError("forcing contains non-finite values");
    Eigen::VectorXd out(forcing.size());
    if (forcing.size() == 0) return out;
    convolve_into(reversed_impulse(params, forcing.size(), dt), forcing, dt, out);
    return out;
}

namespace {

PathEnsemble respond_to_squares(const std::vector<OscillatorParams>& params, const Grid& grid, std::size_t n_samples,
                                const std::function<Eigen::VectorXd(std::size_t)>& input_path, const SeededRng& seed) {
    if (params.empty()) throw ArgumentError("at least one oscillator is required");
    for (const auto& p : params) p.validate();
    check_grid(grid);
    const auto n = static_cast<Eigen::Index>(grid.size());
    const double dt = grid.spacing();
    std::vector<Eigen::VectorXd> kernels;
    for (const auto& p : params) kernels.push_back(reversed_impulse(p, n, dt));
    std::vector<Eigen::MatrixXd> comps(params.size(), Eigen::MatrixXd(n, static_cast<Eigen::Index>(n_samples)));
    parallel_for(n_samples, [&](std::size_t s) {
        const Eigen::VectorXd f = input_path(s).array().square().matrix();
        for (std::size_t i = 0; i < params.size(); ++i) convolve_into(kernels[i], f, dt, comps[i].col(static_cast<Eigen::Index>(s)));
    });
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < params.size(); ++i) labels.push_back("X" + std::to_string(i + 1));
    return PathEnsemble(grid, std::move(comps), std::move(labels), seed);
}

} // namespace

PathEnsemble oscillator_response(const std::vector<OscillatorParams>& params, const PathEnsemble& input, std::size_t component) {
    if (component >= input.n_components()) throw ArgumentError("input component out of range");
    const auto& y = input.component(component);
    return respond_to_squares(
        params, input.grid(), input.n_samples(), [&](std::size_t s) -> Eigen::VectorXd { return y.col(static_cast<Eigen::Index>(s)); },
        input.seed());
}

PathEnsemble fd_response_via_input(const std::vector<OscillatorParams>& params, const FdModel& input_model, std::size_t d) {
    if (input_model.n_components() != 1) throw ArgumentError("input FD model must be scalar");
    const FdModel model = input_model.truncated({d});
    return respond_to_squares(
        params, model.source().grid(), model.n_samples(), [&](std::size_t s) { return reconstruct(model, s, 0); },
        model.source().seed());
}

Eigen::VectorXd ensemble_mean(const PathEnsemble& ensemble, std::size_t component) {
    return ensemble.component(component).rowwise().mean();
}

ResponseMoments response_moments(const OscillatorParams& params, const Kernel& input_kernel, const Grid& grid) {
    params.validate();
    check_grid(grid);
    if (std::abs(input_kernel.variance() - 1.0) > 1e-12) throw ArgumentError("response moments need a unit-variance input kernel");
    const auto n = static_cast<Eigen::Index>(grid.size());
    const double dt = grid.spacing();
    const Eigen::VectorXd rev = reversed_impulse(params, n, dt);
    // row m applies the trapezoid convolution used by duhamel_response
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index m = 1; m < n; ++m) {
        h.row(m).head(m + 1) = dt * rev.segment(n - 1 - m, m + 1).transpose();
        h(m, 0) *= 0.5;
        h(m, m) *= 0.5;
    }
    // Y Gaussian with unit variance: E[Y^2] = 1, Cov(Y(u)^2, Y(v)^2) = 2 c(u, v)^2
    const Eigen::MatrixXd c = input_kernel.matrix(grid);
    const Eigen::MatrixXd c2 = 2.0 * c.cwiseProduct(c);
    ResponseMoments out;
    out.mean = h.rowwise().sum();
    out.covariance = h * c2.selfadjointView<Eigen::Lower>() * h.transpose();
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    return out;
}

SpectralBasis response_basis(const OscillatorParams& params, const Kernel& input_kernel, const Grid& grid, std::size_t d) {
    const ResponseMoments m = response_moments(params, input_kernel, grid);
    return nystrom_from_covariance(m.covariance, grid, grid.trapezoid_weights(), Quadrature::Trapezoid, d);
}

} // namespace fdkl
