#include "fdkl/ensemble.hpp"

#include "fdkl/errors.hpp"
#include "fdkl/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>

namespace fdkl {

PathEnsemble::PathEnsemble(Grid grid, std::vector<Eigen::MatrixXd> components, std::vector<std::string> labels, SeededRng seed)
    : grid_(std::move(grid)), components_(std::move(components)), labels_(std::move(labels)), seed_(seed) {
    if (components_.empty()) throw ArgumentError("ensemble needs at least one component");
    const auto rows = static_cast<Eigen::Index>(grid_.size());
    const auto cols = components_.front().cols();
    if (cols < 1) throw ArgumentError("ensemble needs at least one sample");
    for (std::size_t c = 0; c < components_.size(); ++c) {
        const auto& m = components_[c];
        if (m.rows() != rows || m.cols() != cols) throw ArgumentError("ensemble component " + std::to_string(c) + " has the wrong shape");
        if (!m.allFinite()) throw ArgumentError("ensemble component " + std::to_string(c) + " contains non-finite values");
    }
    if (labels_.empty())
        for (std::size_t c = 0; c < components_.size(); ++c) labels_.push_back("X" + std::to_string(c + 1));
    if (labels_.size() != components_.size()) throw ArgumentError("one label per component is required");
}

Eigen::MatrixXd::ConstColXpr PathEnsemble::path(std::size_t c, std::size_t sample) const {
    if (sample >= n_samples()) throw ArgumentError("sample index " + std::to_string(sample) + " out of range");
    return component(c).col(static_cast<Eigen::Index>(sample));
}

PathEnsemble PathEnsemble::select(std::size_t c) const { return PathEnsemble(grid_, {component(c)}, {labels_.at(c)}, seed_); }

PathEnsemble PathEnsemble::head(std::size_t n) const {
    n = std::min(n, n_samples());
    std::vector<Eigen::MatrixXd> parts;
    for (const auto& m : components_) parts.push_back(m.leftCols(static_cast<Eigen::Index>(n)));
    return PathEnsemble(grid_, std::move(parts), labels_, seed_);
}

PathEnsemble stack_components(const std::vector<PathEnsemble>& parts) {
    if (parts.empty()) throw ArgumentError("nothing to stack");
    std::vector<Eigen::MatrixXd> comps;
    std::vector<std::string> labels;
    for (const auto& p : parts) {
        if (!(p.grid() == parts.front().grid()) || p.n_samples() != parts.front().n_samples())
            throw ArgumentError("stacked ensembles must share grid and sample count");
        for (std::size_t c = 0; c < p.n_components(); ++c) {
            comps.push_back(p.component(c));
            labels.push_back(p.labels()[c]);
        }
    }
    return PathEnsemble(parts.front().grid(), std::move(comps), std::move(labels), parts.front().seed());
}

PathEnsemble resample_linear(const PathEnsemble& ensemble, const Grid& target) {
    const Grid& src = ensemble.grid();
    if (src.dim() != 1 || target.dim() != 1) throw ArgumentError("linear resampling is only defined for 1D grids");
    const double slack = 1e-9 * std::max(1.0, src.hi() - src.lo());
    if (target.lo() < src.lo() - slack || target.hi() > src.hi() + slack)
        throw ArgumentError("resampling grid extends outside the ensemble grid");
    // interpolation matrix, two nonzeros per row
    const std::size_t n = target.size();
    std::vector<std::size_t> left(n);
    std::vector<double> frac(n);
    const auto& xs = src.nodes();
    for (std::size_t j = 0; j < n; ++j) {
        const double x = target.nodes()[j];
        std::size_t i = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
        i = std::clamp<std::size_t>(i, 1, xs.size() - 1);
        left[j] = i - 1;
        frac[j] = xs.size() == 1 ? 0.0 : std::clamp((x - xs[i - 1]) / (xs[i] - xs[i - 1]), 0.0, 1.0);
    }
    std::vector<Eigen::MatrixXd> comps;
    for (std::size_t c = 0; c < ensemble.n_components(); ++c) {
        const auto& m = ensemble.component(c);
        Eigen::MatrixXd out(static_cast<Eigen::Index>(n), m.cols());
        for (Eigen::Index s = 0; s < m.cols(); ++s)
            for (std::size_t j = 0; j < n; ++j) {
                const auto l = static_cast<Eigen::Index>(left[j]);
                const double a = m(l, s);
                const double b = xs.size() == 1 ? a : m(l + 1, s);
                out(static_cast<Eigen::Index>(j), s) = (1.0 - frac[j]) * a + frac[j] * b;
            }
        comps.push_back(std::move(out));
    }
    return PathEnsemble(target, std::move(comps), ensemble.labels(), ensemble.seed());
}

namespace {

constexpr char kMagic[8] = {'F', 'D', 'K', 'L', 'E', 'N', 'S', '1'};

void put_u64(std::ofstream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }
void put_f64(std::ofstream& out, double v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::uint64_t get_u64(std::ifstream& in, const std::string& path) {
    std::uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ArgumentError("'" + path + "' is truncated");
    return v;
}

double get_f64(std::ifstream& in, const std::string& path) {
    double v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ArgumentError("'" + path + "' is truncated");
    return v;
}

} // namespace

void write_ensemble(const PathEnsemble& ensemble, const std::string& stem) {
    const std::string path = stem + ".bin";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(kMagic, sizeof kMagic);
    const Grid& g = ensemble.grid();
    put_u64(out, g.dim());
    for (std::size_t k = 0; k < g.dim(); ++k) put_u64(out, g.axis_size(k));
    for (std::size_t k = 0; k < g.dim(); ++k)
        for (double x : g.axis(k)) put_f64(out, x);
    put_u64(out, ensemble.n_samples());
    put_u64(out, ensemble.n_components());
    for (std::size_t s = 0; s < ensemble.n_samples(); ++s)
        for (std::size_t c = 0; c < ensemble.n_components(); ++c) {
            const auto col = ensemble.path(c, s);
            out.write(reinterpret_cast<const char*>(col.data()), static_cast<std::streamsize>(sizeof(double) * ensemble.n_nodes()));
        }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");

    nlohmann::json meta;
    meta["format"] = "fdkl.ensemble";
    meta["version"] = 1;
    meta["labels"] = ensemble.labels();
    meta["rng"] = {{"algorithm", SeededRng::algorithm()}, {"seed", ensemble.seed().seed()}, {"stream", ensemble.seed().stream()}};
    meta["n_samples"] = ensemble.n_samples();
    meta["n_components"] = ensemble.n_components();
    meta["n_nodes"] = ensemble.n_nodes();
    write_text_file(stem + ".json", meta.dump(2) + "\n");
}

PathEnsemble read_ensemble(const std::string& stem) {
    const std::string path = stem + ".bin";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw ArgumentError("'" + path + "' is not an ensemble file");
    const auto dim = get_u64(in, path);
    if (dim != 1 && dim != 2) throw ArgumentError("'" + path + "' has unsupported dimension");
    std::vector<std::uint64_t> sizes(dim);
    for (auto& s : sizes) s = get_u64(in, path);
    std::vector<std::vector<double>> axes(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        axes[k].resize(sizes[k]);
        for (auto& x : axes[k]) x = get_f64(in, path);
    }
    Grid grid = dim == 2 ? Grid::tensor(Grid::from_nodes(axes[0]), Grid::from_nodes(axes[1])) : Grid::from_nodes(axes[0]);
    const auto n_samples = get_u64(in, path);
    const auto n_comp = get_u64(in, path);
    std::vector<Eigen::MatrixXd> comps(n_comp, Eigen::MatrixXd(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(n_samples)));
    for (std::uint64_t s = 0; s < n_samples; ++s)
        for (std::uint64_t c = 0; c < n_comp; ++c) {
            auto col = comps[c].col(static_cast<Eigen::Index>(s));
            if (!in.read(reinterpret_cast<char*>(col.data()), static_cast<std::streamsize>(sizeof(double) * grid.size())))
                throw ArgumentError("'" + path + "' is truncated");
        }
    const nlohmann::json meta = nlohmann::json::parse(read_text_file(stem + ".json"));
    const auto& rng = meta.at("rng");
    return PathEnsemble(std::move(grid), std::move(comps), meta.at("labels").get<std::vector<std::string>>(),
                        SeededRng(rng.at("seed").get<std::uint64_t>(), rng.at("stream").get<std::uint64_t>()));
}

void write_ensemble_csv(const PathEnsemble& ensemble, const std::string& path, std::size_t max_samples) {
    CsvWriter csv(path);
    const bool two_d = ensemble.grid().dim() == 2;
    if (two_d)
        csv.header({"sample_id", "component", "t1", "t2", "value"});
    else
        csv.header({"sample_id", "component", "t", "value"});
    const std::size_t n = std::min(max_samples, ensemble.n_samples());
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t c = 0; c < ensemble.n_components(); ++c) {
            const auto col = ensemble.path(c, s);
            for (std::size_t j = 0; j < ensemble.n_nodes(); ++j) {
                const Point p = ensemble.grid().point(j);
                if (two_d)
                    csv.row({static_cast<double>(s), static_cast<double>(c), p[0], p[1], col(static_cast<Eigen::Index>(j))});
                else
                    csv.row({static_cast<double>(s), static_cast<double>(c), p[0], col(static_cast<Eigen::Index>(j))});
            }
        }
}

} // namespace fdkl
