#pragma once

#include "fdkl/ensemble.hpp"
#include "fdkl/grid.hpp"
#include "fdkl/klmodel.hpp"
#include "fdkl/marginals.hpp"

#include <Eigen/Dense>

#include <vector>

namespace fdkl {

/// Strictly positive nodal conductivity on a tensor grid over [0, tau1] x [0, tau2].
struct ConductivitySample {
    Grid grid;
    Eigen::VectorXd values;

    void validate() const;
};

/// Nodal potential; 0 on the t1 = 0 edge and 1 on the t1 = tau1 edge.
struct PotentialSample {
    Grid grid;
    Eigen::VectorXd values;
    std::vector<double> residual_history;
};

enum class LinearSolver { Direct, ConjugateGradient };

struct SolveOptions {
    LinearSolver solver = LinearSolver::Direct;
    double tolerance = 1e-10; ///< required relative residual
    int max_iterations = 20000;
};

/// Vertex-centred finite volumes for div(X grad U) = 0: harmonic-mean face
/// conductivities, Dirichlet U = 0 / U = 1 on the t1 edges, zero flux across the
/// t2 edges (half control volumes, equivalent to mirrored ghost nodes).
/// Throws NumericalError with the residual history if the relative residual
/// stays above the tolerance.
PotentialSample solve_conductivity(const ConductivitySample& field, const SolveOptions& options = {});

struct ApparentConductivity {
    /// (1/tau2) * integral of X dU/dt1 (trapezoid rule, centred differences).
    double literal = 0.0;
    /// tau1 * (flux through the t1 = tau1 edge) / (tau2 * unit potential drop);
    /// equals the literal integral for exact solutions and is exact for the scheme.
    double normalized = 0.0;
    double flux_left = 0.0;
    double flux_right = 0.0;
};

ApparentConductivity apparent_conductivity(const ConductivitySample& field, const PotentialSample& potential);

/// Solves every sample of a scalar 2D ensemble of conductivities.
std::vector<ApparentConductivity> apparent_conductivity_ensemble(const PathEnsemble& fields, const SolveOptions& options = {});

/// X_d = marginal(G_d) with G_d the Gaussian FD model truncated to d modes,
/// then solved per sample; sample order matches the model's source.
std::vector<ApparentConductivity> apparent_conductivity_fd(const FdModel& gaussian_model, const Marginal& marginal, std::size_t d,
                                                           const SolveOptions& options = {});

/// Harmonic mean of neighbouring values, the face conductivity of the scheme.
inline double harmonic_face(double a, double b) { return 2.0 * a * b / (a + b); }

} // namespace fdkl
