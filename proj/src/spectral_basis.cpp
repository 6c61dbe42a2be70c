#include "fdkl/spectral_basis.hpp"

#include "fdkl/errors.hpp"
#include "fdkl/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fdkl {

std::string to_string(Quadrature q) { return q == Quadrature::Trapezoid ? "trapezoid" : "gauss_legendre"; }

Quadrature quadrature_from_string(const std::string& name) {
    if (name == "trapezoid") return Quadrature::Trapezoid;
    if (name == "gauss_legendre") return Quadrature::GaussLegendre;
    throw ArgumentError("unknown quadrature '" + name + "'");
}

SpectralBasis::SpectralBasis(std::vector<double> eigenvalues, Eigen::MatrixXd modes, Grid nodes, std::vector<double> weights,
                             Quadrature rule, std::optional<Kernel> kernel)
    : eigenvalues_(std::move(eigenvalues)), modes_(std::move(modes)), nodes_(std::move(nodes)), weights_(std::move(weights)),
      rule_(rule), kernel_(std::move(kernel)) {
    const auto n = static_cast<Eigen::Index>(nodes_.size());
    if (modes_.rows() != n || weights_.size() != nodes_.size())
        throw ArgumentError("basis modes/weights do not match the node count");
    if (modes_.cols() != static_cast<Eigen::Index>(eigenvalues_.size()))
        throw ArgumentError("basis has " + std::to_string(modes_.cols()) + " modes but " + std::to_string(eigenvalues_.size()) +
                            " eigenvalues");
    for (std::size_t k = 0; k < eigenvalues_.size(); ++k) {
        if (!(eigenvalues_[k] >= 0.0)) throw ArgumentError("basis eigenvalues must be nonnegative");
        if (k > 0 && eigenvalues_[k] > eigenvalues_[k - 1]) throw ArgumentError("basis eigenvalues must be sorted descending");
    }
    sup_squares_.resize(eigenvalues_.size());
    for (Eigen::Index k = 0; k < modes_.cols(); ++k) {
        auto col = modes_.col(k);
        const double scale = col.cwiseAbs().maxCoeff();
        // first node that is clearly nonzero decides the sign
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::abs(col(j)) > 1e-10 * scale) {
                if (col(j) < 0.0) col = -col;
                break;
            }
        }
        sup_squares_[static_cast<std::size_t>(k)] = scale * scale;
    }
}

double SpectralBasis::orthonormality_residual() const {
    const Eigen::Map<const Eigen::VectorXd> w(weights_.data(), static_cast<Eigen::Index>(weights_.size()));
    const Eigen::MatrixXd gram = modes_.transpose() * w.asDiagonal() * modes_;
    return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

SpectralBasis SpectralBasis::truncated(std::size_t d) const {
    if (d > size()) throw ArgumentError("cannot truncate a basis of size " + std::to_string(size()) + " to " + std::to_string(d));
    std::vector<double> ev(eigenvalues_.begin(), eigenvalues_.begin() + static_cast<std::ptrdiff_t>(d));
    return SpectralBasis(std::move(ev), modes_.leftCols(static_cast<Eigen::Index>(d)), nodes_, weights_, rule_, kernel_);
}

SpectralBasis SpectralBasis::interpolated_to(const Grid& grid) const {
    if (nodes_.dim() != 1 || grid.dim() != 1) throw ArgumentError("mode interpolation is only defined for 1D bases");
    const auto& src = nodes_.nodes();
    const double slack = 1e-9 * std::max(1.0, src.back() - src.front());
    if (grid.lo() < src.front() - slack || grid.hi() > src.back() + slack)
        throw ArgumentError("interpolation grid extends outside the basis node range");
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd out(n, modes_.cols());
    for (Eigen::Index k = 0; k < modes_.cols(); ++k) {
        const double* col = modes_.col(k).data();
        for (Eigen::Index j = 0; j < n; ++j) out(j, k) = interpolate_linear(src, col, grid.nodes()[static_cast<std::size_t>(j)]);
    }
    return SpectralBasis(eigenvalues_, std::move(out), grid, grid.trapezoid_weights(), Quadrature::Trapezoid, kernel_);
}

BoundDiagnostic uniform_bound_condition(const SpectralBasis& basis) {
    if (basis.size() == 0) throw ArgumentError("uniform bound condition needs a nonempty basis");
    BoundDiagnostic out;
    double sum = 0.0;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const double term = basis.eigenvalue(k) * basis.sup_squares()[k];
        out.terms.push_back(term);
        sum += term;
        out.partial_sums.push_back(sum);
    }
    return out;
}

void write_basis(const SpectralBasis& basis, const std::string& stem) {
    {
        CsvWriter csv(stem + ".csv");
        std::vector<std::string> header{"t"};
        if (basis.nodes().dim() == 2) {
            header = {"t1", "t2"};
        }
        for (std::size_t k = 0; k < basis.size(); ++k) header.push_back("phi_" + std::to_string(k + 1));
        csv.header(header);
        for (std::size_t j = 0; j < basis.n_nodes(); ++j) {
            const Point p = basis.nodes().point(j);
            std::vector<double> row{p[0]};
            if (basis.nodes().dim() == 2) row.push_back(p[1]);
            for (std::size_t k = 0; k < basis.size(); ++k)
                row.push_back(basis.modes()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)));
            csv.row(row);
        }
    }
    nlohmann::json meta;
    meta["format"] = "fdkl.basis";
    meta["version"] = 1;
    meta["eigenvalues"] = basis.eigenvalues();
    meta["sup_squares"] = basis.sup_squares();
    meta["weights"] = basis.weights();
    meta["quadrature"] = to_string(basis.rule());
    meta["axes"] = nlohmann::json::array();
    for (std::size_t k = 0; k < basis.nodes().dim(); ++k) meta["axes"].push_back(basis.nodes().axis(k));
    if (basis.kernel()) {
        const Kernel& kern = *basis.kernel();
        meta["kernel"] = {{"family", to_string(kern.family())},
                          {"parameter", kern.parameter()},
                          {"domain_lo", kern.domain().lo},
                          {"domain_hi", kern.domain().hi},
                          {"dim", kern.dim()}};
    }
    write_text_file(stem + ".json", meta.dump(2) + "\n");
}

SpectralBasis read_basis(const std::string& stem) {
    const nlohmann::json meta = nlohmann::json::parse(read_text_file(stem + ".json"));
    if (meta.value("format", "") != "fdkl.basis") throw ArgumentError(stem + ".json is not a basis sidecar");
    const auto axes = meta.at("axes").get<std::vector<std::vector<double>>>();
    Grid grid = axes.size() == 2 ? Grid::tensor(Grid::from_nodes(axes[0]), Grid::from_nodes(axes[1])) : Grid::from_nodes(axes.at(0));
    auto eigenvalues = meta.at("eigenvalues").get<std::vector<double>>();
    auto weights = meta.at("weights").get<std::vector<double>>();
    const CsvTable table = read_csv(stem + ".csv");
    const std::size_t coord_cols = grid.dim();
    if (table.rows.size() != grid.size() || table.header.size() != coord_cols + eigenvalues.size())
        throw ArgumentError(stem + ".csv does not match its sidecar");
    Eigen::MatrixXd modes(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(eigenvalues.size()));
    for (std::size_t j = 0; j < table.rows.size(); ++j)
        for (std::size_t k = 0; k < eigenvalues.size(); ++k)
            modes(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = table.rows[j][coord_cols + k];
    std::optional<Kernel> kernel;
    if (meta.contains("kernel")) {
        const auto& k = meta["kernel"];
        const auto lo = k.at("domain_lo").get<Point>();
        const auto hi = k.at("domain_hi").get<Point>();
        const Box box = k.at("dim").get<std::size_t>() == 2 ? Box::rectangle(lo[0], hi[0], lo[1], hi[1]) : Box::interval(lo[0], hi[0]);
        kernel = Kernel(kernel_family_from_string(k.at("family")), k.at("parameter").get<double>(), box);
    }
    return SpectralBasis(std::move(eigenvalues), std::move(modes), std::move(grid), std::move(weights),
                         quadrature_from_string(meta.at("quadrature")), std::move(kernel));
}

} // namespace fdkl
