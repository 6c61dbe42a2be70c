#pragma once

#include "fdkl/ensemble.hpp"
#include "fdkl/klmodel.hpp"
#include "fdkl/spectral_basis.hpp"

#include <Eigen/Dense>

#include <vector>

namespace fdkl {

/// Underdamped linear oscillator x'' + damping x' + stiffness x = gain f(t).
struct OscillatorParams {
    double damping = 0.0;
    double stiffness = 0.0;
    double gain = 0.0;

    /// sqrt(stiffness - damping^2 / 4)
    double psi() const;
    /// Throws ArgumentError unless all parameters are positive and the system is underdamped.
    void validate() const;
};

/// Zero-initial-condition response to forcing f sampled on a uniform grid with step dt:
/// x(t_m) = trapezoid sum over [0, t_m] of (gain/psi) e^{-damping (t_m - u)/2} sin(psi (t_m - u)) f(u).
Eigen::VectorXd duhamel_response(const OscillatorParams& params, const Eigen::Ref<const Eigen::VectorXd>& forcing, double dt);

/// Responses of each oscillator to Y(t)^2, Y = component `component` of the input.
/// Output component i belongs to params[i].
PathEnsemble oscillator_response(const std::vector<OscillatorParams>& params, const PathEnsemble& input, std::size_t component = 0);

/// Responses to Y_d(t)^2, with Y_d the FD model of the input truncated to d modes.
/// Sample order matches the model's source ensemble.
PathEnsemble fd_response_via_input(const std::vector<OscillatorParams>& params, const FdModel& input_model, std::size_t d);

/// Pointwise ensemble mean of one component.
Eigen::VectorXd ensemble_mean(const PathEnsemble& ensemble, std::size_t component);

/// Exact mean and covariance of the discretized response to Y(t)^2 when Y is a
/// zero-mean, unit-variance Gaussian process with the given kernel.
struct ResponseMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};
ResponseMoments response_moments(const OscillatorParams& params, const Kernel& input_kernel, const Grid& grid);

/// Top-d eigenpairs of the response covariance (trapezoid Nystrom on the grid).
SpectralBasis response_basis(const OscillatorParams& params, const Kernel& input_kernel, const Grid& grid, std::size_t d);

} // namespace fdkl
