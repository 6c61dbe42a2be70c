#include "fdkl/klmodel.hpp"

#include "fdkl/errors.hpp"
#include "fdkl/io.hpp"
#include "fdkl/parallel.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace fdkl {

FdModel::FdModel(std::shared_ptr<const PathEnsemble> source, std::vector<ComponentExpansion> components)
    : source_(std::move(source)), components_(std::move(components)) {
    if (!source_) throw ArgumentError("FD model needs its source ensemble");
    if (components_.size() != source_->n_components()) throw ArgumentError("FD model needs one expansion per component");
    for (const auto& c : components_) {
        if (!c.basis || c.d > c.basis->size()) throw ArgumentError("truncation level exceeds the basis size");
        if (c.coefficients.rows() != static_cast<Eigen::Index>(c.d) ||
            c.coefficients.cols() != static_cast<Eigen::Index>(source_->n_samples()))
            throw ArgumentError("coefficient matrix has the wrong shape");
        if (c.mean.size() != static_cast<Eigen::Index>(source_->n_nodes())) throw ArgumentError("mean has the wrong length");
    }
}

FdModel FdModel::truncated(const std::vector<std::size_t>& d) const {
    if (d.size() != components_.size()) throw ArgumentError("one truncation level per component is required");
    std::vector<ComponentExpansion> out;
    for (std::size_t c = 0; c < d.size(); ++c) {
        if (d[c] > components_[c].d)
            throw ArgumentError("cannot raise truncation level from " + std::to_string(components_[c].d) + " to " + std::to_string(d[c]));
        ComponentExpansion e = components_[c];
        e.d = d[c];
        e.coefficients = components_[c].coefficients.topRows(static_cast<Eigen::Index>(d[c]));
        out.push_back(std::move(e));
    }
    return FdModel(source_, std::move(out));
}

SpectralBasis basis_on_grid(const SpectralBasis& basis, const Grid& grid) {
    if (basis.nodes() == grid) return basis;
    if (grid.dim() != 1 || basis.nodes().dim() != 1)
        throw ArgumentError("2D ensembles must be projected on a basis tabulated on the same grid");
    // every basis node must be present in the ensemble grid
    const auto& fine = grid.nodes();
    const double tol = 1e-9 * std::max(1.0, fine.back() - fine.front());
    std::vector<double> offending;
    for (double x : basis.nodes().nodes()) {
        const auto it = std::lower_bound(fine.begin(), fine.end(), x - tol);
        if (it == fine.end() || std::abs(*it - x) > tol) offending.push_back(x);
    }
    if (!offending.empty()) {
        std::ostringstream msg;
        msg << "ensemble grid does not contain " << offending.size() << " basis node(s):";
        for (std::size_t i = 0; i < std::min<std::size_t>(offending.size(), 10); ++i) msg << ' ' << offending[i];
        if (offending.size() > 10) msg << " ...";
        throw ArgumentError(msg.str());
    }
    if (grid.lo() < basis.nodes().lo() - tol || grid.hi() > basis.nodes().hi() + tol)
        throw ArgumentError("ensemble grid extends outside the basis node range");
    return basis.interpolated_to(grid);
}

FdModel project(std::shared_ptr<const PathEnsemble> ensemble, const std::vector<SpectralBasis>& bases,
                const std::vector<std::size_t>& d, const std::vector<Eigen::VectorXd>& means) {
    if (!ensemble) throw ArgumentError("projection needs an ensemble");
    const std::size_t nc = ensemble->n_components();
    if (bases.size() != nc || d.size() != nc) throw ArgumentError("projection needs one basis and one level per component");
    if (!means.empty() && means.size() != nc) throw ArgumentError("projection needs one mean per component");
    const auto n = static_cast<Eigen::Index>(ensemble->n_nodes());
    const std::size_t n_samples = ensemble->n_samples();

    std::vector<ComponentExpansion> comps;
    for (std::size_t c = 0; c < nc; ++c) {
        if (d[c] < 1) throw ArgumentError("truncation level must be at least 1");
        if (d[c] > bases[c].size())
            throw ArgumentError("truncation level " + std::to_string(d[c]) + " exceeds basis size " + std::to_string(bases[c].size()));
        auto basis = std::make_shared<const SpectralBasis>(basis_on_grid(bases[c], ensemble->grid()));
        ComponentExpansion e;
        e.basis = basis;
        e.d = d[c];
        e.mean = means.empty() ? Eigen::VectorXd::Zero(n) : means[c];
        if (e.mean.size() != n) throw ArgumentError("mean has the wrong length");

        const Eigen::Map<const Eigen::VectorXd> w(basis->weights().data(), n);
        // rows: w_j phi_k(t_j)
        const Eigen::MatrixXd functional = (w.asDiagonal() * basis->modes().leftCols(static_cast<Eigen::Index>(d[c]))).transpose();
        e.coefficients.resize(static_cast<Eigen::Index>(d[c]), static_cast<Eigen::Index>(n_samples));
        const auto& x = ensemble->component(c);
        parallel_for(n_samples, [&](std::size_t s) {
            const auto si = static_cast<Eigen::Index>(s);
            e.coefficients.col(si).noalias() = functional * (x.col(si) - e.mean);
        });
        comps.push_back(std::move(e));
    }
    return FdModel(std::move(ensemble), std::move(comps));
}

Eigen::VectorXd reconstruct(const FdModel& model, std::size_t sample, std::size_t component) {
    if (component >= model.n_components()) throw ArgumentError("component index " + std::to_string(component) + " out of range");
    if (sample >= model.n_samples()) throw ArgumentError("sample index " + std::to_string(sample) + " out of range");
    const auto& e = model.component(component);
    return e.mean + e.basis->modes().leftCols(static_cast<Eigen::Index>(e.d)) * e.coefficients.col(static_cast<Eigen::Index>(sample));
}

PathEnsemble reconstruct_ensemble(const FdModel& model) {
    std::vector<Eigen::MatrixXd> comps;
    for (std::size_t c = 0; c < model.n_components(); ++c) {
        const auto& e = model.component(c);
        Eigen::MatrixXd out(e.mean.size(), static_cast<Eigen::Index>(model.n_samples()));
        const auto modes = e.basis->modes().leftCols(static_cast<Eigen::Index>(e.d));
        parallel_for(model.n_samples(), [&](std::size_t s) {
            const auto si = static_cast<Eigen::Index>(s);
            out.col(si).noalias() = e.mean + modes * e.coefficients.col(si);
        });
        comps.push_back(std::move(out));
    }
    return PathEnsemble(model.source().grid(), std::move(comps), model.source().labels(), model.source().seed());
}

double truncation_mse(const SpectralBasis& basis, std::size_t d, std::size_t node) {
    if (d > basis.size()) throw ArgumentError("truncation level exceeds the basis size");
    if (node >= basis.n_nodes()) throw ArgumentError("node index out of range");
    double sum = 0.0;
    for (std::size_t k = basis.size(); k-- > d;) {
        const double phi = basis.modes()(static_cast<Eigen::Index>(node), static_cast<Eigen::Index>(k));
        sum += basis.eigenvalue(k) * phi * phi;
    }
    return sum;
}

std::vector<double> sup_discrepancy(const FdModel& model, std::size_t component) {
    std::vector<double> out(model.n_samples(), 0.0);
    const auto& x = model.source().component(component);
    parallel_for(model.n_samples(), [&](std::size_t s) {
        const Eigen::VectorXd xd = reconstruct(model, s, component);
        out[s] = (xd - x.col(static_cast<Eigen::Index>(s))).cwiseAbs().maxCoeff();
    });
    return out;
}

std::vector<double> sup_discrepancy(const FdModel& model) {
    std::vector<double> out(model.n_samples(), 0.0);
    for (std::size_t c = 0; c < model.n_components(); ++c) {
        const auto part = sup_discrepancy(model, c);
        for (std::size_t s = 0; s < out.size(); ++s) out[s] = std::max(out[s], part[s]);
    }
    return out;
}

void write_coefficients_csv(const FdModel& model, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"sample_id", "component", "k", "value"});
    for (std::size_t s = 0; s < model.n_samples(); ++s)
        for (std::size_t c = 0; c < model.n_components(); ++c)
            for (std::size_t k = 0; k < model.d(c); ++k)
                csv.raw_row({std::to_string(s), std::to_string(c + 1), std::to_string(k + 1),
                             format_double(model.coefficients(c)(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s)))});
}

void write_model_json(const FdModel& model, const std::string& path) {
    nlohmann::json meta;
    meta["format"] = "fdkl.model";
    meta["version"] = 1;
    meta["n_samples"] = model.n_samples();
    meta["labels"] = model.source().labels();
    meta["rng"] = {{"algorithm", SeededRng::algorithm()}, {"seed", model.source().seed().seed()}, {"stream", model.source().seed().stream()}};
    meta["components"] = nlohmann::json::array();
    for (std::size_t c = 0; c < model.n_components(); ++c) {
        const auto& e = model.component(c);
        std::vector<double> ev(e.basis->eigenvalues().begin(), e.basis->eigenvalues().begin() + static_cast<std::ptrdiff_t>(e.d));
        nlohmann::json comp{{"d", e.d}, {"eigenvalues", ev}, {"centered", !e.mean.isZero(0.0)}};
        if (e.basis->kernel()) comp["kernel"] = {{"family", to_string(e.basis->kernel()->family())}, {"parameter", e.basis->kernel()->parameter()}};
        meta["components"].push_back(comp);
    }
    write_text_file(path, meta.dump(2) + "\n");
}

} // namespace fdkl
