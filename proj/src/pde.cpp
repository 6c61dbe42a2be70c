#include "fdkl/pde.hpp"

#include "fdkl/errors.hpp"
#include "fdkl/parallel.hpp"
#include "fdkl/samplers.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <sstream>

namespace fdkl {

void ConductivitySample::validate() const {
    if (grid.dim() != 2) throw ArgumentError("conductivity needs a 2D tensor grid");
    if (grid.axis_size(0) < 3 || grid.axis_size(1) < 3) throw ArgumentError("conductivity grid must be at least 3 x 3");
    if (values.size() != static_cast<Eigen::Index>(grid.size())) throw ArgumentError("conductivity values do not match the grid");
    if (!values.allFinite() || !(values.minCoeff() > 0.0)) throw ArgumentError("conductivity must be finite and strictly positive");
}

namespace {

struct Geometry {
    std::size_t n1, n2;
    std::vector<double> dx;     // t1 spacing, size n1 - 1
    std::vector<double> dy;     // t2 spacing, size n2 - 1
    std::vector<double> height; // control-volume extent in t2, size n2
    std::vector<double> width;  // control-volume extent in t1, size n1
};

Geometry geometry(const Grid& g) {
    Geometry geo;
    geo.n1 = g.axis_size(0);
    geo.n2 = g.axis_size(1);
    const auto& t1 = g.axis(0);
    const auto& t2 = g.axis(1);
    for (std::size_t i = 0; i + 1 < geo.n1; ++i) geo.dx.push_back(t1[i + 1] - t1[i]);
    for (std::size_t j = 0; j + 1 < geo.n2; ++j) geo.dy.push_back(t2[j + 1] - t2[j]);
    geo.height.assign(geo.n2, 0.0);
    for (std::size_t j = 0; j + 1 < geo.n2; ++j) {
        geo.height[j] += 0.5 * geo.dy[j];
        geo.height[j + 1] += 0.5 * geo.dy[j];
    }
    geo.width.assign(geo.n1, 0.0);
    for (std::size_t i = 0; i + 1 < geo.n1; ++i) {
        geo.width[i] += 0.5 * geo.dx[i];
        geo.width[i + 1] += 0.5 * geo.dx[i];
    }
    return geo;
}

// transmissibility of the t1-face between (i, j) and (i + 1, j)
double tx(const Geometry& geo, const Eigen::VectorXd& k, std::size_t i, std::size_t j) {
    const std::size_t a = i + geo.n1 * j;
    return harmonic_face(k(static_cast<Eigen::Index>(a)), k(static_cast<Eigen::Index>(a + 1))) * geo.height[j] / geo.dx[i];
}

// transmissibility of the t2-face between (i, j) and (i, j + 1)
double ty(const Geometry& geo, const Eigen::VectorXd& k, std::size_t i, std::size_t j) {
    const std::size_t a = i + geo.n1 * j;
    return harmonic_face(k(static_cast<Eigen::Index>(a)), k(static_cast<Eigen::Index>(a + geo.n1))) * geo.width[i] / geo.dy[j];
}

} // namespace

PotentialSample solve_conductivity(const ConductivitySample& field, const SolveOptions& options) {
    field.validate();
    const Geometry geo = geometry(field.grid);
    const std::size_t n1 = geo.n1;
    const std::size_t n2 = geo.n2;
    const std::size_t inner = n1 - 2;
    const auto unknown = [&](std::size_t i, std::size_t j) { return static_cast<Eigen::Index>((i - 1) + inner * j); };
    const auto n_unknowns = static_cast<Eigen::Index>(inner * n2);

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(n_unknowns) * 5);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_unknowns);
    for (std::size_t j = 0; j < n2; ++j) {
        for (std::size_t i = 1; i + 1 < n1; ++i) {
            const Eigen::Index row = unknown(i, j);
            double diag = 0.0;
            // t1 neighbours; the boundary columns carry U = 0 (left) and U = 1 (right)
            const double west = tx(geo, field.values, i - 1, j);
            diag += west;
            if (i - 1 >= 1) entries.emplace_back(row, unknown(i - 1, j), -west);
            const double east = tx(geo, field.values, i, j);
            diag += east;
            if (i + 1 <= n1 - 2)
                entries.emplace_back(row, unknown(i + 1, j), -east);
            else
                rhs(row) += east * 1.0;
            if (j > 0) {
                const double south = ty(geo, field.values, i, j - 1);
                diag += south;
                entries.emplace_back(row, unknown(i, j - 1), -south);
            }
            if (j + 1 < n2) {
                const double north = ty(geo, field.values, i, j);
                diag += north;
                entries.emplace_back(row, unknown(i, j + 1), -north);
            }
            entries.emplace_back(row, row, diag);
        }
    }
    Eigen::SparseMatrix<double> a(n_unknowns, n_unknowns);
    a.setFromTriplets(entries.begin(), entries.end());

    PotentialSample out;
    out.grid = field.grid;
    Eigen::VectorXd u;
    const double rhs_norm = rhs.norm();
    auto relative_residual = [&](const Eigen::VectorXd& x) { return (rhs - a * x).norm() / rhs_norm; };

    if (options.solver == LinearSolver::Direct) {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
        if (ldlt.info() != Eigen::Success) throw NumericalError("sparse LDLT factorization failed");
        u = ldlt.solve(rhs);
        out.residual_history.push_back(relative_residual(u));
        // one step of iterative refinement if round-off left the residual high
        if (out.residual_history.back() > options.tolerance) {
            u += ldlt.solve(rhs - a * u);
            out.residual_history.push_back(relative_residual(u));
        }
    } else {
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
        cg.compute(a);
        cg.setTolerance(0.1 * options.tolerance);
        constexpr int block = 100;
        cg.setMaxIterations(block);
        u = Eigen::VectorXd::Zero(n_unknowns);
        for (int done = 0; done < options.max_iterations; done += block) {
            u = cg.solveWithGuess(rhs, u);
            out.residual_history.push_back(relative_residual(u));
            if (out.residual_history.back() <= options.tolerance) break;
        }
    }
    if (!(out.residual_history.back() <= options.tolerance)) {
        std::ostringstream msg;
        msg << "potential solve did not reach relative residual " << options.tolerance << "; history:";
        for (double r : out.residual_history) msg << ' ' << r;
        throw NumericalError(msg.str());
    }

    out.values.resize(static_cast<Eigen::Index>(n1 * n2));
    for (std::size_t j = 0; j < n2; ++j) {
        out.values(static_cast<Eigen::Index>(n1 * j)) = 0.0;
        out.values(static_cast<Eigen::Index>(n1 - 1 + n1 * j)) = 1.0;
        for (std::size_t i = 1; i + 1 < n1; ++i) out.values(static_cast<Eigen::Index>(i + n1 * j)) = u(unknown(i, j));
    }
    return out;
}

ApparentConductivity apparent_conductivity(const ConductivitySample& field, const PotentialSample& potential) {
    field.validate();
    if (!(field.grid == potential.grid) || potential.values.size() != field.values.size())
        throw ArgumentError("potential and conductivity grids differ");
    const Geometry geo = geometry(field.grid);
    const auto& t1 = field.grid.axis(0);
    const double tau1 = t1.back() - t1.front();
    const double tau2 = field.grid.hi(1) - field.grid.lo(1);
    const auto& u = potential.values;
    const auto at = [&](std::size_t i, std::size_t j) { return static_cast<Eigen::Index>(i + geo.n1 * j); };

    ApparentConductivity out;
    // trapezoid weights are the control-volume extents
    double integral = 0.0;
    for (std::size_t j = 0; j < geo.n2; ++j) {
        for (std::size_t i = 0; i < geo.n1; ++i) {
            double grad = 0.0;
            if (i == 0)
                grad = (u(at(1, j)) - u(at(0, j))) / geo.dx[0];
            else if (i + 1 == geo.n1)
                grad = (u(at(i, j)) - u(at(i - 1, j))) / geo.dx[i - 1];
            else
                grad = (u(at(i + 1, j)) - u(at(i - 1, j))) / (t1[i + 1] - t1[i - 1]);
            integral += geo.width[i] * geo.height[j] * field.values(at(i, j)) * grad;
        }
        out.flux_left += tx(geo, field.values, 0, j) * (u(at(1, j)) - u(at(0, j)));
        out.flux_right += tx(geo, field.values, geo.n1 - 2, j) * (u(at(geo.n1 - 1, j)) - u(at(geo.n1 - 2, j)));
    }
    out.literal = integral / tau2;
    out.normalized = tau1 * out.flux_right / tau2;
    return out;
}

std::vector<ApparentConductivity> apparent_conductivity_ensemble(const PathEnsemble& fields, const SolveOptions& options) {
    if (fields.n_components() != 1) throw ArgumentError("conductivity ensemble must be scalar");
    std::vector<ApparentConductivity> out(fields.n_samples());
    parallel_for(
        fields.n_samples(),
        [&](std::size_t s) {
            ConductivitySample x{fields.grid(), fields.path(0, s)};
            out[s] = apparent_conductivity(x, solve_conductivity(x, options));
        },
        4);
    return out;
}

std::vector<ApparentConductivity> apparent_conductivity_fd(const FdModel& gaussian_model, const Marginal& marginal, std::size_t d,
                                                           const SolveOptions& options) {
    if (gaussian_model.n_components() != 1) throw ArgumentError("Gaussian FD model must be scalar");
    const FdModel model = gaussian_model.truncated({d});
    const Grid& grid = model.source().grid();
    std::vector<ApparentConductivity> out(model.n_samples());
    parallel_for(
        model.n_samples(),
        [&](std::size_t s) {
            const Eigen::VectorXd g = reconstruct(model, s, 0);
            ConductivitySample x{grid, g.unaryExpr([&](double v) { return marginal.from_gaussian(v); })};
            out[s] = apparent_conductivity(x, solve_conductivity(x, options));
        },
        4);
    return out;
}

} // namespace fdkl
