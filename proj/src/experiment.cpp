#include "fdkl/experiment.hpp"

#include "fdkl/errors.hpp"
#include "fdkl/io.hpp"
#include "fdkl/klmodel.hpp"
#include "fdkl/parallel.hpp"
#include "fdkl/pde.hpp"
#include "fdkl/samplers.hpp"

#include <boost/version.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace fdkl {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::pair<ExperimentKind, std::string>> kKindNames = {
    {ExperimentKind::Example1Direct, "example1_direct"},
    {ExperimentKind::Example1Translation, "example1_translation"},
    {ExperimentKind::Example2Response, "example2_response"},
    {ExperimentKind::Example2Input, "example2_input"},
    {ExperimentKind::Example3Conductivity, "example3_conductivity"},
    {ExperimentKind::Custom, "custom"},
};

constexpr const char* kVersion = "1.0.0";

} // namespace

std::string to_string(ExperimentKind kind) {
    for (const auto& [k, name] : kKindNames)
        if (k == kind) return name;
    return "custom";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    for (const auto& [k, n] : kKindNames)
        if (n == name) return k;
    throw ArgumentError("unknown experiment kind '" + name + "'");
}

Marginal MarginalSpec::build() const {
    const auto need = [&](std::size_t n) {
        if (params.size() != n)
            throw ArgumentError("marginal " + family + " needs " + std::to_string(n) + " parameters, got " + std::to_string(params.size()));
    };
    switch (marginal_family_from_string(family)) {
    case MarginalFamily::StandardNormal: need(0); return Marginal::standard_normal();
    case MarginalFamily::Gumbel: need(2); return Marginal::gumbel(params[0], params[1]);
    case MarginalFamily::ScaledBeta: need(4); return Marginal::scaled_beta(params[0], params[1], params[2], params[3]);
    }
    throw ArgumentError("unknown marginal family '" + family + "'");
}

// ---------------------------------------------------------------- config I/O

json ExperimentConfig::to_json() const {
    json j;
    j["schema_version"] = schema_version;
    j["name"] = name;
    j["kind"] = to_string(kind);
    j["seed"] = seed;
    j["n_samples"] = n_samples;
    j["paper_scale_samples"] = paper_scale_samples;
    json g;
    g["dim"] = grid.dim;
    if (grid.dim == 2) {
        g["tau"] = {grid.tau1, grid.tau2};
        g["dt"] = {grid.dt1, grid.dt2};
    } else {
        g["tau"] = {grid.tau1};
        g["dt"] = {grid.dt1};
    }
    j["grid"] = g;
    j["stride"] = stride;
    j["kernels"] = json::array();
    for (const auto& k : kernels) j["kernels"].push_back({{"family", k.family}, {"parameter", k.parameter}});
    j["marginals"] = json::array();
    for (const auto& m : marginals) j["marginals"].push_back({{"family", m.family}, {"params", m.params}});
    j["oscillators"] = json::array();
    for (const auto& o : oscillators)
        j["oscillators"].push_back({{"damping", o.damping}, {"stiffness", o.stiffness}, {"gain", o.gain}});
    j["d_levels"] = d_levels;
    j["stored_samples"] = stored_samples;
    j["pde_statistic"] = pde_statistic;
    j["output_dir"] = output_dir;
    return j;
}

namespace {

template <class T>
T field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("missing field '" + where + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("field '" + where + key + "' has the wrong type: " + e.what());
    }
}

template <class T>
T field_or(const json& j, const char* key, const std::string& where, T fallback) {
    return j.contains(key) ? field<T>(j, key, where) : fallback;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    c.schema_version = field<int>(j, "schema_version", "");
    c.name = field_or<std::string>(j, "name", "", "");
    const auto kind = field<std::string>(j, "kind", "");
    try {
        c.kind = experiment_kind_from_string(kind);
    } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
    }
    c.seed = field<std::uint64_t>(j, "seed", "");
    c.n_samples = field<std::size_t>(j, "n_samples", "");
    c.paper_scale_samples = field_or<std::size_t>(j, "paper_scale_samples", "", 0);
    if (!j.contains("grid") || !j["grid"].is_object()) throw ConfigError("missing object 'grid'");
    const json& g = j["grid"];
    c.grid.dim = field<std::size_t>(g, "dim", "grid.");
    const auto tau = field<std::vector<double>>(g, "tau", "grid.");
    const auto dt = field<std::vector<double>>(g, "dt", "grid.");
    if (tau.size() != c.grid.dim || dt.size() != c.grid.dim)
        throw ConfigError("grid.tau and grid.dt need one entry per dimension");
    c.grid.tau1 = tau[0];
    c.grid.dt1 = dt[0];
    if (c.grid.dim == 2) {
        c.grid.tau2 = tau[1];
        c.grid.dt2 = dt[1];
    }
    c.stride = field_or<std::size_t>(j, "stride", "", 1);
    for (const auto& k : field_or<json>(j, "kernels", "", json::array()))
        c.kernels.push_back({field<std::string>(k, "family", "kernels[]."), field<double>(k, "parameter", "kernels[].")});
    for (const auto& m : field_or<json>(j, "marginals", "", json::array()))
        c.marginals.push_back({field<std::string>(m, "family", "marginals[]."),
                               field_or<std::vector<double>>(m, "params", "marginals[].", {})});
    for (const auto& o : field_or<json>(j, "oscillators", "", json::array()))
        c.oscillators.push_back({field<double>(o, "damping", "oscillators[]."), field<double>(o, "stiffness", "oscillators[]."),
                                 field<double>(o, "gain", "oscillators[].")});
    c.d_levels = field<std::vector<std::vector<std::size_t>>>(j, "d_levels", "");
    c.stored_samples = field_or<std::size_t>(j, "stored_samples", "", 5);
    c.pde_statistic = field_or<std::string>(j, "pde_statistic", "", "normalized");
    c.output_dir = field_or<std::string>(j, "output_dir", "", "");
    return c;
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config syntax error: ") + e.what());
    }
    return ExperimentConfig::from_json(j);
}

// ---------------------------------------------------------------- geometry

namespace {

std::size_t interval_count(double length, double dt) {
    const double n = length / dt;
    return static_cast<std::size_t>(std::llround(n));
}

bool divides_evenly(double length, double dt) {
    const double n = length / dt;
    return std::abs(n - std::round(n)) < 1e-9 * std::max(1.0, n);
}

bool is_cosine(const ExperimentConfig& c) { return c.kernels.size() == 1 && c.kernels[0].family == "cosine_example"; }

Grid fine_grid(const ExperimentConfig& c) {
    if (c.grid.dim == 2)
        return Grid::tensor(Grid::uniform(0.0, c.grid.tau1, interval_count(c.grid.tau1, c.grid.dt1) + 1),
                            Grid::uniform(0.0, c.grid.tau2, interval_count(c.grid.tau2, c.grid.dt2) + 1));
    if (is_cosine(c)) return Grid::uniform(-c.grid.tau1, c.grid.tau1, interval_count(2.0 * c.grid.tau1, c.grid.dt1) + 1);
    return Grid::uniform(0.0, c.grid.tau1, interval_count(c.grid.tau1, c.grid.dt1) + 1);
}

Grid coarse_grid(const Grid& fine, std::size_t stride) {
    if (stride <= 1 || fine.dim() != 1) return fine;
    std::vector<double> nodes;
    for (std::size_t i = 0; i < fine.size(); i += stride) nodes.push_back(fine.axis(0)[i]);
    return Grid::from_nodes(std::move(nodes));
}

Kernel build_kernel(const KernelSpec& k, const GridSpec& g) {
    switch (kernel_family_from_string(k.family)) {
    case KernelFamily::MaternLike: return Kernel::matern_like(k.parameter, g.tau1);
    case KernelFamily::OU: return Kernel::ou(k.parameter, g.tau1);
    case KernelFamily::CosineExample: return Kernel::cosine_example(k.parameter, g.tau1);
    case KernelFamily::Gauss2D: return Kernel::gauss2d(k.parameter, g.tau1, g.tau2);
    }
    throw ArgumentError("unknown kernel family '" + k.family + "'");
}

std::size_t expected_components(const ExperimentConfig& c) {
    switch (c.kind) {
    case ExperimentKind::Example1Direct:
    case ExperimentKind::Example1Translation: return 2;
    case ExperimentKind::Example2Response:
    case ExperimentKind::Example2Input: return c.oscillators.size();
    default: return 1;
    }
}

std::size_t max_d(const ExperimentConfig& c) {
    std::size_t m = 0;
    for (const auto& level : c.d_levels)
        for (auto d : level) m = std::max(m, d);
    return m;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    return os.str();
}

} // namespace

std::vector<std::string> component_labels(const ExperimentConfig& config) {
    if (config.kind == ExperimentKind::Example3Conductivity) return {"Xapp"};
    if (config.kind == ExperimentKind::Custom) return {"X"};
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < expected_components(config); ++i) labels.push_back("X" + std::to_string(i + 1));
    return labels;
}

// ---------------------------------------------------------------- validation

std::vector<std::string> validate(const ExperimentConfig& c) {
    std::vector<std::string> v;
    if (c.schema_version != 1) v.push_back("schema_version must be 1, got " + std::to_string(c.schema_version));
    if (c.n_samples < 2) v.push_back("n_samples must be at least 2");
    if (c.paper_scale_samples == 1) v.push_back("paper_scale_samples must be 0 (same as n_samples) or at least 2");
    if (c.pde_statistic != "normalized" && c.pde_statistic != "literal")
        v.push_back("pde_statistic must be 'normalized' or 'literal', got '" + c.pde_statistic + "'");

    const auto& g = c.grid;
    bool grid_ok = true;
    if (g.dim != 1 && g.dim != 2) {
        v.push_back("grid.dim must be 1 or 2");
        grid_ok = false;
    } else {
        const std::vector<std::pair<double, double>> axes =
            g.dim == 1 ? std::vector<std::pair<double, double>>{{g.tau1, g.dt1}}
                       : std::vector<std::pair<double, double>>{{g.tau1, g.dt1}, {g.tau2, g.dt2}};
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const auto [tau, dt] = axes[a];
            const std::string ax = "grid axis " + std::to_string(a + 1);
            if (!(tau > 0.0) || !(dt > 0.0) || !std::isfinite(tau) || !std::isfinite(dt)) {
                v.push_back(ax + ": tau and dt must be positive");
                grid_ok = false;
            } else if (!divides_evenly(tau, dt) || interval_count(tau, dt) < 2) {
                v.push_back(ax + ": tau must be an integer multiple (at least 2) of dt");
                grid_ok = false;
            }
        }
    }
    if (c.stride < 1) v.push_back("stride must be at least 1");
    if (grid_ok && g.dim == 1 && c.stride > 1) {
        const std::size_t intervals = interval_count(is_cosine(c) ? 2.0 * g.tau1 : g.tau1, g.dt1);
        if (intervals % c.stride != 0)
            v.push_back("stride " + std::to_string(c.stride) + " must divide the grid interval count " + std::to_string(intervals));
    }
    if (g.dim == 2 && c.stride > 1) v.push_back("stride applies to 1D grids only");

    // per-kind shape
    std::size_t want_kernels = 1, want_marginals = 0;
    switch (c.kind) {
    case ExperimentKind::Example1Direct:
    case ExperimentKind::Example1Translation: want_kernels = 2; want_marginals = 2; break;
    case ExperimentKind::Example2Response:
    case ExperimentKind::Example2Input: want_marginals = 0; break;
    case ExperimentKind::Example3Conductivity:
    case ExperimentKind::Custom: want_marginals = 1; break;
    }
    if (c.kernels.size() != want_kernels)
        v.push_back(to_string(c.kind) + " needs " + std::to_string(want_kernels) + " kernel(s), got " + std::to_string(c.kernels.size()));
    if (c.marginals.size() != want_marginals)
        v.push_back(to_string(c.kind) + " needs " + std::to_string(want_marginals) + " marginal(s), got " +
                    std::to_string(c.marginals.size()));

    for (std::size_t i = 0; i < c.kernels.size(); ++i) {
        const std::string at = "kernel " + std::to_string(i + 1) + ": ";
        try {
            const Kernel k = build_kernel(c.kernels[i], g);
            if (k.dim() != g.dim) v.push_back(at + c.kernels[i].family + " is " + std::to_string(k.dim()) + "D but the grid is " +
                                              std::to_string(g.dim) + "D");
            const bool is_ex2 = c.kind == ExperimentKind::Example2Response || c.kind == ExperimentKind::Example2Input;
            if (is_ex2 && k.family() != KernelFamily::OU) v.push_back(at + "oscillator inputs must use the ou kernel");
            if (c.kind == ExperimentKind::Example3Conductivity && k.family() != KernelFamily::Gauss2D)
                v.push_back(at + "conductivity studies must use the gauss2d kernel");
            if ((c.kind == ExperimentKind::Example1Direct || c.kind == ExperimentKind::Example1Translation) &&
                k.family() == KernelFamily::CosineExample)
                v.push_back(at + "cosine_example is defined on [-tau, tau]; use a custom study");
        } catch (const std::exception& e) {
            v.push_back(at + e.what());
        }
    }
    for (std::size_t i = 0; i < c.marginals.size(); ++i) {
        try {
            const Marginal m = c.marginals[i].build();
            if (c.kind == ExperimentKind::Example3Conductivity && m.family() != MarginalFamily::ScaledBeta)
                v.push_back("marginal 1: conductivity needs a positive scaled_beta marginal");
            if (c.kind == ExperimentKind::Example3Conductivity && m.family() == MarginalFamily::ScaledBeta && !(m.param(2) > 0.0))
                v.push_back("marginal 1: conductivity needs a strictly positive lower bound");
        } catch (const std::exception& e) {
            v.push_back("marginal " + std::to_string(i + 1) + ": " + e.what());
        }
    }

    const bool is_ex2 = c.kind == ExperimentKind::Example2Response || c.kind == ExperimentKind::Example2Input;
    if (is_ex2) {
        if (c.oscillators.empty()) v.push_back(to_string(c.kind) + " needs at least one oscillator");
        if (grid_ok && g.dim != 1) v.push_back("oscillator studies need a 1D grid");
    } else if (!c.oscillators.empty()) {
        v.push_back(to_string(c.kind) + " takes no oscillators");
    }
    for (std::size_t i = 0; i < c.oscillators.size(); ++i) {
        const auto& o = c.oscillators[i];
        const std::string at = "oscillator " + std::to_string(i + 1) + ": ";
        if (!(o.damping > 0.0) || !(o.stiffness > 0.0) || !(o.gain > 0.0)) v.push_back(at + "damping, stiffness and gain must be positive");
        const double margin = o.stiffness - 0.25 * o.damping * o.damping;
        if (!(margin > 0.0)) {
            std::ostringstream os;
            os << at << "underdamping constraint stiffness - damping^2/4 > 0 violated (" << margin << ")";
            v.push_back(os.str());
        }
    }
    if (c.kind == ExperimentKind::Example3Conductivity && g.dim != 2) v.push_back("conductivity studies need a 2D grid");

    // truncation levels
    const std::size_t nc = expected_components(c);
    if (c.d_levels.empty()) v.push_back("d_levels must list at least one level");
    for (std::size_t l = 0; l < c.d_levels.size(); ++l) {
        const auto& level = c.d_levels[l];
        if (level.size() != nc)
            v.push_back("d level " + std::to_string(l + 1) + " has " + std::to_string(level.size()) + " entries, expected " +
                        std::to_string(nc));
        for (auto d : level)
            if (d < 1) v.push_back("d level " + std::to_string(l + 1) + ": truncation levels must be at least 1");
        if (c.kind == ExperimentKind::Example2Input && !level.empty() &&
            std::any_of(level.begin(), level.end(), [&](std::size_t d) { return d != level.front(); }))
            v.push_back("d level " + std::to_string(l + 1) + ": the input model has one truncation level shared by all responses");
    }
    for (std::size_t comp = 0; comp < nc; ++comp) {
        std::vector<std::size_t> seq;
        for (const auto& level : c.d_levels)
            if (comp < level.size()) seq.push_back(level[comp]);
        for (std::size_t l = 1; l < seq.size(); ++l)
            if (seq[l] <= seq[l - 1]) {
                v.push_back("d list of component " + std::to_string(comp + 1) + " is not strictly increasing: " + join_sizes(seq));
                break;
            }
    }
    if (grid_ok && c.stride >= 1) {
        const Grid fine = fine_grid(c);
        const std::size_t basis_nodes = coarse_grid(fine, c.stride).size();
        if (max_d(c) > basis_nodes)
            v.push_back("largest d (" + std::to_string(max_d(c)) + ") exceeds the " + std::to_string(basis_nodes) + " basis nodes");
        if (g.dim == 2 && fine.size() > 4096)
            v.push_back("2D grid has " + std::to_string(fine.size()) + " nodes, above the 4096-node cap; use a coarser mesh");
    }
    if (c.output_dir.empty()) v.push_back("output_dir is empty");
    return v;
}

// ---------------------------------------------------------------- computation

namespace {

using PathSet = std::vector<Eigen::VectorXd>;

/// Paired per-sample generators for the 1D and custom studies.
struct PairedSource {
    Grid grid;
    std::vector<std::string> labels;
    std::function<PathSet(std::size_t s)> target;
    std::function<PathSet(std::size_t level, std::size_t s)> fd;
    /// optional per-component upper bound on the discrepancy
    std::function<std::vector<double>(std::size_t level, std::size_t s)> bound;
};

struct FieldSnapshot {
    std::size_t level = 0;
    Eigen::VectorXd g, g_d, x, x_d, u, u_d;
};

struct Computation {
    Grid grid = Grid::uniform(0.0, 1.0, 2);
    std::vector<std::string> labels;
    std::vector<ComponentStudy> studies;
    std::vector<std::vector<std::vector<double>>> bounds; ///< [level][component][sample]
    std::optional<PathEnsemble> target_head;
    std::vector<PathEnsemble> fd_head;
    std::optional<FdModel> model;
    std::vector<std::vector<ApparentConductivity>> xapp; ///< [0] target, [l + 1] level l
    std::vector<FieldSnapshot> snapshots;
};

Eigen::VectorXd mapped(const Marginal& m, const Eigen::VectorXd& g) { return g.unaryExpr([&](double x) { return m.from_gaussian(x); }); }

double sup_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// Mode matrices of a model tabulated on its ensemble grid.
std::vector<Eigen::MatrixXd> grid_modes(const FdModel& model) {
    std::vector<Eigen::MatrixXd> out;
    for (std::size_t c = 0; c < model.n_components(); ++c) out.push_back(model.component(c).basis->modes());
    return out;
}

Eigen::VectorXd expand(const FdModel& model, const std::vector<Eigen::MatrixXd>& modes, std::size_t c, std::size_t d, std::size_t s) {
    const auto& comp = model.component(c);
    const auto di = static_cast<Eigen::Index>(d);
    Eigen::VectorXd x = modes[c].leftCols(di) * comp.coefficients.col(static_cast<Eigen::Index>(s)).head(di);
    if (comp.mean.size() > 0) x += comp.mean;
    return x;
}

PathEnsemble sample_gp(const Kernel& kernel, const Grid& fine, std::size_t stride, std::size_t n, const SeededRng& rng) {
    if (fine.dim() == 2) return sample_gaussian_field_2d(kernel, fine, n, rng);
    const Grid coarse = coarse_grid(fine, stride);
    PathEnsemble g = sample_gaussian_process(kernel, coarse, n, rng);
    return stride > 1 ? resample_linear(g, fine) : g;
}

Computation run_paired(const PairedSource& src, const ExperimentConfig& c, std::size_t n_samples) {
    const std::size_t nc = src.labels.size(), nl = c.d_levels.size();
    Computation out;
    out.grid = src.grid;
    out.labels = src.labels;
    out.studies.resize(nc);
    for (std::size_t i = 0; i < nc; ++i) {
        out.studies[i].label = src.labels[i];
        out.studies[i].target.assign(n_samples, 0.0);
        for (std::size_t l = 0; l < nl; ++l) {
            ConvergenceInput in;
            in.d = c.d_levels[l][i];
            in.fd_sup.assign(n_samples, 0.0);
            in.discrepancy.assign(n_samples, 0.0);
            out.studies[i].levels.push_back(std::move(in));
        }
    }
    if (src.bound) out.bounds.assign(nl, std::vector<std::vector<double>>(nc, std::vector<double>(n_samples, 0.0)));

    parallel_for(n_samples, [&](std::size_t s) {
        const PathSet target = src.target(s);
        for (std::size_t i = 0; i < nc; ++i) out.studies[i].target[s] = target[i].cwiseAbs().maxCoeff();
        for (std::size_t l = 0; l < nl; ++l) {
            const PathSet fd = src.fd(l, s);
            for (std::size_t i = 0; i < nc; ++i) {
                out.studies[i].levels[l].fd_sup[s] = fd[i].cwiseAbs().maxCoeff();
                out.studies[i].levels[l].discrepancy[s] = sup_diff(fd[i], target[i]);
            }
            if (src.bound) {
                const auto b = src.bound(l, s);
                for (std::size_t i = 0; i < nc; ++i) out.bounds[l][i][s] = b[i];
            }
        }
    }, 8);

    const std::size_t head = std::min(c.stored_samples, n_samples);
    if (head > 0) {
        const auto n = static_cast<Eigen::Index>(src.grid.size());
        const auto collect = [&](const std::function<PathSet(std::size_t)>& f) {
            std::vector<Eigen::MatrixXd> comps(nc, Eigen::MatrixXd(n, static_cast<Eigen::Index>(head)));
            for (std::size_t s = 0; s < head; ++s) {
                const PathSet p = f(s);
                for (std::size_t i = 0; i < nc; ++i) comps[i].col(static_cast<Eigen::Index>(s)) = p[i];
            }
            return PathEnsemble(src.grid, std::move(comps), src.labels, SeededRng(c.seed));
        };
        out.target_head = collect(src.target);
        for (std::size_t l = 0; l < nl; ++l) out.fd_head.push_back(collect([&](std::size_t s) { return src.fd(l, s); }));
    }
    return out;
}

std::vector<std::size_t> largest_per_component(const ExperimentConfig& c) {
    std::vector<std::size_t> m(expected_components(c), 0);
    for (const auto& level : c.d_levels)
        for (std::size_t i = 0; i < level.size() && i < m.size(); ++i) m[i] = std::max(m[i], level[i]);
    return m;
}

Computation compute_example1(const ExperimentConfig& c, std::size_t n) {
    const Grid fine = fine_grid(c);
    const Grid coarse = coarse_grid(fine, c.stride);
    const SeededRng rng(c.seed);
    const std::vector<Kernel> kernels{build_kernel(c.kernels[0], c.grid), build_kernel(c.kernels[1], c.grid)};
    const std::vector<Marginal> margs{c.marginals[0].build(), c.marginals[1].build()};
    const std::size_t dmax = max_d(c);

    auto gauss = std::make_shared<const PathEnsemble>(stack_components(
        {sample_gp(kernels[0], fine, c.stride, n, rng.with_stream(1)), sample_gp(kernels[1], fine, c.stride, n, rng.with_stream(2))}));
    const bool direct = c.kind == ExperimentKind::Example1Direct;

    std::shared_ptr<const PathEnsemble> projected = gauss;
    std::vector<SpectralBasis> bases;
    std::vector<Eigen::VectorXd> means;
    if (direct) {
        projected = std::make_shared<const PathEnsemble>(translation_apply(margs, *gauss));
        for (std::size_t i = 0; i < 2; ++i) {
            bases.push_back(nystrom_from_covariance(translation_covariance(kernels[i], margs[i], coarse), coarse,
                                                    coarse.trapezoid_weights(), Quadrature::Trapezoid, dmax));
            means.push_back(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(fine.size()), margs[i].mean()));
        }
    } else {
        for (std::size_t i = 0; i < 2; ++i) bases.push_back(nystrom_on_grid(kernels[i], coarse, dmax));
    }
    const FdModel model = project(projected, bases, {dmax, dmax}, means);
    const auto modes = grid_modes(model);

    PairedSource src;
    src.grid = fine;
    src.labels = {"X1", "X2"};
    src.target = [&](std::size_t s) {
        const auto si = static_cast<Eigen::Index>(s);
        if (direct) {
            const Eigen::VectorXd y1 = projected->component(0).col(si);
            return PathSet{y1, y1 + projected->component(1).col(si)};
        }
        const Eigen::VectorXd y1 = mapped(margs[0], gauss->component(0).col(si));
        return PathSet{y1, y1 + mapped(margs[1], gauss->component(1).col(si))};
    };
    src.fd = [&](std::size_t l, std::size_t s) {
        const std::size_t d1 = c.d_levels[l][0], d2 = c.d_levels[l][1];
        if (direct) return PathSet{expand(model, modes, 0, d1, s), expand(model, modes, 0, d2, s) + expand(model, modes, 1, d2, s)};
        const Eigen::VectorXd y1 = mapped(margs[0], expand(model, modes, 0, d1, s));
        return PathSet{y1, y1 + mapped(margs[1], expand(model, modes, 1, d2, s))};
    };
    Computation out = run_paired(src, c, n);
    out.model = model.truncated(largest_per_component(c));
    return out;
}

Computation compute_example2(const ExperimentConfig& c, std::size_t n) {
    const Grid grid = fine_grid(c);
    const SeededRng rng(c.seed);
    const Kernel kernel = build_kernel(c.kernels[0], c.grid);
    const PathEnsemble y = sample_ou(kernel.parameter(), grid, n, rng.with_stream(1));
    const PathEnsemble x = oscillator_response(c.oscillators, y);
    const std::size_t nc = c.oscillators.size();
    const std::size_t dmax = max_d(c);
    const double dt = grid.spacing();
    const double span = grid.hi(0) - grid.lo(0);

    PairedSource src;
    src.grid = grid;
    src.labels = x.labels();
    src.target = [&](std::size_t s) {
        PathSet p;
        for (std::size_t i = 0; i < nc; ++i) p.push_back(x.component(i).col(static_cast<Eigen::Index>(s)));
        return p;
    };

    if (c.kind == ExperimentKind::Example2Response) {
        std::vector<SpectralBasis> bases;
        std::vector<Eigen::VectorXd> means;
        for (std::size_t i = 0; i < nc; ++i) {
            const ResponseMoments mom = response_moments(c.oscillators[i], kernel, grid);
            bases.push_back(nystrom_from_covariance(mom.covariance, grid, grid.trapezoid_weights(), Quadrature::Trapezoid, dmax));
            means.push_back(mom.mean);
        }
        const FdModel model = project(std::make_shared<const PathEnsemble>(x), bases, std::vector<std::size_t>(nc, dmax), means);
        const auto modes = grid_modes(model);
        src.fd = [&](std::size_t l, std::size_t s) {
            PathSet p;
            for (std::size_t i = 0; i < nc; ++i) p.push_back(expand(model, modes, i, c.d_levels[l][i], s));
            return p;
        };
        Computation out = run_paired(src, c, n);
        out.model = model.truncated(largest_per_component(c));
        return out;
    }

    const SpectralBasis basis = nystrom_on_grid(kernel, coarse_grid(grid, c.stride), dmax);
    const FdModel model = project(std::make_shared<const PathEnsemble>(y), {basis}, {dmax});
    const auto modes = grid_modes(model);
    std::vector<double> factor;
    for (const auto& p : c.oscillators) factor.push_back(p.gain * span / p.psi());
    src.fd = [&](std::size_t l, std::size_t s) {
        const Eigen::VectorXd yd = expand(model, modes, 0, c.d_levels[l][0], s);
        const Eigen::VectorXd f = yd.array().square().matrix();
        PathSet p;
        for (std::size_t i = 0; i < nc; ++i) p.push_back(duhamel_response(c.oscillators[i], f, dt));
        return p;
    };
    src.bound = [&](std::size_t l, std::size_t s) {
        const Eigen::VectorXd yd = expand(model, modes, 0, c.d_levels[l][0], s);
        const Eigen::VectorXd y0 = y.component(0).col(static_cast<Eigen::Index>(s));
        const double sup = (yd.array().square() - y0.array().square()).abs().maxCoeff();
        std::vector<double> b;
        for (double k : factor) b.push_back(k * sup);
        return b;
    };
    Computation out = run_paired(src, c, n);
    out.model = model.truncated({max_d(c)});
    return out;
}

Computation compute_example3(const ExperimentConfig& c, std::size_t n) {
    const Grid grid = fine_grid(c);
    const SeededRng rng(c.seed);
    const Kernel kernel = build_kernel(c.kernels[0], c.grid);
    const Marginal marg = c.marginals[0].build();
    const std::size_t dmax = max_d(c);
    const bool literal = c.pde_statistic == "literal";
    const auto stat = [&](const ApparentConductivity& a) { return literal ? a.literal : a.normalized; };

    auto g = std::make_shared<const PathEnsemble>(sample_gaussian_field_2d(kernel, grid, n, rng.with_stream(1)));
    const SpectralBasis basis = nystrom_on_grid(kernel, grid, dmax);
    const FdModel model = project(g, {basis}, {dmax});
    const PathEnsemble x = translation_apply(marg, *g);

    Computation out;
    out.grid = grid;
    out.labels = {"Xapp"};
    out.xapp.push_back(apparent_conductivity_ensemble(x));
    ComponentStudy study;
    study.label = "Xapp";
    for (const auto& a : out.xapp[0]) study.target.push_back(stat(a));
    for (std::size_t l = 0; l < c.d_levels.size(); ++l) {
        const std::size_t d = c.d_levels[l][0];
        out.xapp.push_back(apparent_conductivity_fd(model, marg, d));
        ConvergenceInput in;
        in.d = d;
        for (std::size_t s = 0; s < n; ++s) {
            in.fd_sup.push_back(stat(out.xapp.back()[s]));
            in.discrepancy.push_back(std::abs(in.fd_sup[s] - study.target[s]));
        }
        study.levels.push_back(std::move(in));
    }
    out.studies.push_back(std::move(study));

    // one sample of G, X, U against its FD counterpart per level
    const auto modes = grid_modes(model);
    const Eigen::VectorXd g0 = g->component(0).col(0);
    const Eigen::VectorXd x0 = x.component(0).col(0);
    const Eigen::VectorXd u0 = solve_conductivity({grid, x0}).values;
    for (std::size_t l = 0; l < c.d_levels.size(); ++l) {
        FieldSnapshot snap;
        snap.level = l;
        snap.g = g0;
        snap.x = x0;
        snap.u = u0;
        snap.g_d = expand(model, modes, 0, c.d_levels[l][0], 0);
        snap.x_d = mapped(marg, snap.g_d);
        snap.u_d = solve_conductivity({grid, snap.x_d}).values;
        out.snapshots.push_back(std::move(snap));
    }

    const std::size_t head = std::min(c.stored_samples, n);
    if (head > 0) {
        out.target_head = x.head(head);
        const auto n_nodes = static_cast<Eigen::Index>(grid.size());
        for (std::size_t l = 0; l < c.d_levels.size(); ++l) {
            Eigen::MatrixXd m(n_nodes, static_cast<Eigen::Index>(head));
            for (std::size_t s = 0; s < head; ++s)
                m.col(static_cast<Eigen::Index>(s)) = mapped(marg, expand(model, modes, 0, c.d_levels[l][0], s));
            out.fd_head.emplace_back(grid, std::vector<Eigen::MatrixXd>{m}, std::vector<std::string>{"X"}, SeededRng(c.seed));
        }
    }
    out.model = model.truncated({dmax});
    return out;
}

Computation compute_custom(const ExperimentConfig& c, std::size_t n) {
    const Grid fine = fine_grid(c);
    const SeededRng rng(c.seed);
    const Kernel kernel = build_kernel(c.kernels[0], c.grid);
    const Marginal marg = c.marginals[0].build();
    const std::size_t dmax = max_d(c);
    auto g = std::make_shared<const PathEnsemble>(sample_gp(kernel, fine, c.stride, n, rng.with_stream(1)));
    const SpectralBasis basis = nystrom_on_grid(kernel, coarse_grid(fine, c.stride), dmax);
    const FdModel model = project(g, {basis}, {dmax});
    const auto modes = grid_modes(model);

    PairedSource src;
    src.grid = fine;
    src.labels = {"X"};
    src.target = [&](std::size_t s) { return PathSet{mapped(marg, g->component(0).col(static_cast<Eigen::Index>(s)))}; };
    src.fd = [&](std::size_t l, std::size_t s) { return PathSet{mapped(marg, expand(model, modes, 0, c.d_levels[l][0], s))}; };
    Computation out = run_paired(src, c, n);
    out.model = model.truncated({dmax});
    return out;
}

Computation compute(const ExperimentConfig& c) {
    const auto violations = validate(c);
    if (!violations.empty()) {
        std::string msg = "invalid config:";
        for (const auto& v : violations) msg += "\n  - " + v;
        throw ArgumentError(msg);
    }
    switch (c.kind) {
    case ExperimentKind::Example1Direct:
    case ExperimentKind::Example1Translation: return compute_example1(c, c.n_samples);
    case ExperimentKind::Example2Response:
    case ExperimentKind::Example2Input: return compute_example2(c, c.n_samples);
    case ExperimentKind::Example3Conductivity: return compute_example3(c, c.n_samples);
    case ExperimentKind::Custom: return compute_custom(c, c.n_samples);
    }
    throw ArgumentError("unknown experiment kind");
}

// ---------------------------------------------------------------- output

std::string level_file(const char* prefix, std::size_t l, const char* ext) { return prefix + std::string("_l") + std::to_string(l) + ext; }

void write_statistics(const std::vector<ComponentStudy>& studies, const fs::path& dir) {
    CsvWriter ex((dir / "exceedance.csv").string());
    ex.header({"component", "d", "threshold", "probability", "std_error"});
    CsvWriter rep((dir / "report.csv").string());
    rep.header({"component", "d", "median_discrepancy", "ks", "epsilon", "exceed_probability"});
    for (std::size_t i = 0; i < studies.size(); ++i) {
        const auto& st = studies[i];
        const double comp = static_cast<double>(i + 1);
        const auto thresholds = default_thresholds(st.target);
        const auto emit = [&](const ExceedanceCurve& curve) {
            for (std::size_t k = 0; k < curve.thresholds.size(); ++k)
                ex.row({comp, static_cast<double>(curve.d), curve.thresholds[k], curve.probabilities[k], curve.std_errors[k]});
        };
        emit(exceedance(st.target, thresholds, st.label, 0));
        for (const auto& lvl : st.levels) emit(exceedance(lvl.fd_sup, thresholds, st.label, lvl.d));
        const auto eps = default_epsilons(st.target);
        for (const auto& row : convergence_report(st.target, st.levels, eps))
            for (std::size_t k = 0; k < row.epsilons.size(); ++k)
                rep.row({comp, static_cast<double>(row.d), row.median_discrepancy, row.ks, row.epsilons[k], row.exceed_probability[k]});
    }
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_overlay(const Computation& comp, std::size_t l, const fs::path& path) {
    const PathEnsemble& t = *comp.target_head;
    const PathEnsemble& f = comp.fd_head[l];
    CsvWriter w(path.string());
    w.header({"sample_id", "component", "t", "target", "fd"});
    for (std::size_t s = 0; s < t.n_samples(); ++s)
        for (std::size_t i = 0; i < t.n_components(); ++i)
            for (std::size_t j = 0; j < t.n_nodes(); ++j) {
                const auto ji = static_cast<Eigen::Index>(j), si = static_cast<Eigen::Index>(s);
                w.row({static_cast<double>(s), static_cast<double>(i + 1), t.grid().point(j)[0], t.component(i)(ji, si),
                       f.component(i)(ji, si)});
            }
}

void write_snapshot(const Grid& grid, const FieldSnapshot& snap, const fs::path& path) {
    CsvWriter w(path.string());
    w.header({"t1", "t2", "G", "G_d", "X", "X_d", "U", "U_d"});
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const auto p = grid.point(j);
        const auto ji = static_cast<Eigen::Index>(j);
        w.row({p[0], p[1], snap.g(ji), snap.g_d(ji), snap.x(ji), snap.x_d(ji), snap.u(ji), snap.u_d(ji)});
    }
}

std::string versions_eigen() {
    return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION);
}

std::string versions_boost() {
    return std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
           std::to_string(BOOST_VERSION % 100);
}

} // namespace

std::vector<ComponentStudy> compute_studies(const ExperimentConfig& config) { return compute(config).studies; }

RunResult run_experiment(const ExperimentConfig& config) {
    const std::string started = utc_now();
    Computation comp = compute(config);
    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());

    json artifacts;
    const json cfg = config.to_json();
    write_text_file((dir / "config.json").string(), cfg.dump(2) + "\n");

    // scatter: one file per level, rows ordered by component then sample
    const bool has_bound = !comp.bounds.empty();
    const bool has_xapp = !comp.xapp.empty();
    artifacts["scatter"] = json::array();
    for (std::size_t l = 0; l < config.d_levels.size(); ++l) {
        const std::string name = level_file("scatter", l, ".csv");
        CsvWriter w((dir / name).string());
        std::vector<std::string> header{"sample_id", "component", "d", "target", "fd", "discrepancy"};
        if (has_bound) header.push_back("bound");
        if (has_xapp) {
            for (const char* h : {"target_literal", "fd_literal", "target_normalized", "fd_normalized"}) header.push_back(h);
        }
        w.header(header);
        for (std::size_t i = 0; i < comp.studies.size(); ++i) {
            const auto& st = comp.studies[i];
            const auto& lvl = st.levels[l];
            for (std::size_t s = 0; s < st.target.size(); ++s) {
                std::vector<double> row{static_cast<double>(s), static_cast<double>(i + 1), static_cast<double>(lvl.d), st.target[s],
                                        lvl.fd_sup[s], lvl.discrepancy[s]};
                if (has_bound) row.push_back(comp.bounds[l][i][s]);
                if (has_xapp) {
                    row.push_back(comp.xapp[0][s].literal);
                    row.push_back(comp.xapp[l + 1][s].literal);
                    row.push_back(comp.xapp[0][s].normalized);
                    row.push_back(comp.xapp[l + 1][s].normalized);
                }
                w.row(row);
            }
        }
        artifacts["scatter"].push_back({{"level", l}, {"d", config.d_levels[l]}, {"path", name}});
    }
    write_statistics(comp.studies, dir);
    artifacts["exceedance"] = "exceedance.csv";
    artifacts["report"] = "report.csv";

    if (comp.model) {
        write_coefficients_csv(*comp.model, (dir / "coefficients.csv").string());
        write_model_json(*comp.model, (dir / "model.json").string());
        artifacts["coefficients"] = "coefficients.csv";
        artifacts["model"] = "model.json";
    }
    if (comp.target_head) {
        write_ensemble(*comp.target_head, (dir / "target").string());
        artifacts["ensembles"] = json::array();
        artifacts["ensembles"].push_back({{"role", "target"}, {"stem", "target"}});
        for (std::size_t l = 0; l < comp.fd_head.size(); ++l) {
            const std::string stem = "fd_l" + std::to_string(l);
            write_ensemble(comp.fd_head[l], (dir / stem).string());
            artifacts["ensembles"].push_back({{"role", "fd"}, {"level", l}, {"stem", stem}});
        }
        if (comp.grid.dim() == 1) {
            artifacts["overlay"] = json::array();
            for (std::size_t l = 0; l < comp.fd_head.size(); ++l) {
                const std::string name = level_file("overlay", l, ".csv");
                write_overlay(comp, l, dir / name);
                artifacts["overlay"].push_back({{"level", l}, {"d", config.d_levels[l]}, {"path", name}});
            }
        }
    }
    if (!comp.snapshots.empty()) {
        artifacts["fields"] = json::array();
        for (const auto& snap : comp.snapshots) {
            const std::string name = level_file("field", snap.level, ".csv");
            write_snapshot(comp.grid, snap, dir / name);
            artifacts["fields"].push_back({{"level", snap.level}, {"d", config.d_levels[snap.level]}, {"path", name}});
        }
    }

    json files = json::array();
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().filename() != "manifest.json") names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    for (const auto& name : names) files.push_back({{"path", name}, {"sha256", sha256_file((dir / name).string())}});

    json manifest;
    manifest["format"] = "fdkl.manifest";
    manifest["schema_version"] = 1;
    manifest["experiment"] = config.name;
    manifest["kind"] = to_string(config.kind);
    manifest["seed"] = config.seed;
    manifest["rng"] = SeededRng::algorithm();
    manifest["n_samples"] = config.n_samples;
    manifest["components"] = comp.labels;
    manifest["d_levels"] = config.d_levels;
    manifest["config_hash"] = sha256_hex(cfg.dump());
    manifest["versions"] = {{"fdkl", kVersion}, {"eigen", versions_eigen()}, {"boost", versions_boost()}};
    manifest["artifacts"] = artifacts;
    manifest["files"] = files;
    manifest["timestamps"] = {{"started", started}, {"finished", utc_now()}};
    write_text_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");

    return {dir.string(), manifest, std::move(comp.studies)};
}

void recompute_report(const std::string& run_dir, const std::string& out_dir) {
    const fs::path dir(run_dir);
    json manifest;
    try {
        manifest = json::parse(read_text_file((dir / "manifest.json").string()));
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + (dir / "manifest.json").string() + ": " + e.what());
    }
    const auto labels = manifest.at("components").get<std::vector<std::string>>();
    std::map<std::string, std::string> hashes;
    for (const auto& f : manifest.at("files")) hashes[f.at("path").get<std::string>()] = f.at("sha256").get<std::string>();

    std::vector<ComponentStudy> studies(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) studies[i].label = labels[i];
    for (const auto& entry : manifest.at("artifacts").at("scatter")) {
        const std::string name = entry.at("path").get<std::string>();
        const std::string path = (dir / name).string();
        const auto it = hashes.find(name);
        if (it == hashes.end()) throw std::runtime_error(path + " is not listed in the manifest");
        const std::string actual = sha256_file(path);
        if (actual != it->second) throw std::runtime_error(path + ": sha256 " + actual + " does not match the manifest (" + it->second + ")");
        const CsvTable table = read_csv(path);
        const std::size_t cs = table.column("sample_id"), cc = table.column("component"), cd = table.column("d"),
                          ct = table.column("target"), cf = table.column("fd"), cx = table.column("discrepancy");
        std::vector<ConvergenceInput> level(labels.size());
        std::vector<std::vector<double>> target(labels.size());
        for (const auto& row : table.rows) {
            const auto i = static_cast<std::size_t>(row[cc]) - 1;
            if (i >= labels.size()) throw std::runtime_error(path + ": component index out of range");
            const auto s = static_cast<std::size_t>(row[cs]);
            if (s != level[i].fd_sup.size()) throw std::runtime_error(path + ": rows are not ordered by sample_id");
            level[i].d = static_cast<std::size_t>(row[cd]);
            level[i].fd_sup.push_back(row[cf]);
            level[i].discrepancy.push_back(row[cx]);
            target[i].push_back(row[ct]);
        }
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (studies[i].target.empty()) studies[i].target = target[i];
            studies[i].levels.push_back(std::move(level[i]));
        }
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out_dir + ": " + ec.message());
    write_statistics(studies, fs::path(out_dir));
}

std::vector<std::string> write_config_bases(const ExperimentConfig& config, const std::string& out_dir) {
    const auto violations = validate(config);
    if (!violations.empty()) {
        std::string msg = "invalid config:";
        for (const auto& v : violations) msg += "\n  - " + v;
        throw ArgumentError(msg);
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out_dir + ": " + ec.message());
    const Grid basis_grid = coarse_grid(fine_grid(config), config.stride);
    std::vector<std::string> stems;
    for (std::size_t i = 0; i < config.kernels.size(); ++i) {
        const Kernel kernel = build_kernel(config.kernels[i], config.grid);
        const std::string stem = (fs::path(out_dir) / ("basis_" + std::to_string(i + 1))).string();
        write_basis(nystrom_on_grid(kernel, basis_grid, max_d(config)), stem);
        stems.push_back(stem);
    }
    return stems;
}

} // namespace fdkl
