#pragma once

#include "fdkl/dynamics.hpp"
#include "fdkl/extremes.hpp"
#include "fdkl/marginals.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace fdkl {

/// Config file could not be parsed or has the wrong shape.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
    Example1Direct,      ///< Gumbel translation pair, FD model of the non-Gaussian paths
    Example1Translation, ///< same target, FD model of the underlying Gaussian paths
    Example2Response,    ///< oscillators driven by squared OU, FD model of the response
    Example2Input,       ///< same target, responses to the squared FD input
    Example3Conductivity,
    Custom, ///< one translation process, FD model of its Gaussian image
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct KernelSpec {
    std::string family;
    double parameter = 0.0;
};

struct MarginalSpec {
    std::string family;
    std::vector<double> params;

    Marginal build() const;
};

struct GridSpec {
    std::size_t dim = 1;
    double tau1 = 0.0; ///< interval length (or half-width for cosine_example kernels)
    double tau2 = 0.0;
    double dt1 = 0.0;
    double dt2 = 0.0;
};

struct ExperimentConfig {
    int schema_version = 1;
    std::string name;
    ExperimentKind kind = ExperimentKind::Custom;
    std::uint64_t seed = 0;
    std::size_t n_samples = 0;
    std::size_t paper_scale_samples = 0;
    GridSpec grid;
    /// Cholesky factors and Nystrom bases use every stride-th node of a 1D grid.
    std::size_t stride = 1;
    std::vector<KernelSpec> kernels;
    std::vector<MarginalSpec> marginals;
    std::vector<OscillatorParams> oscillators;
    double ou_rate = 0.0;
    /// d_levels[l][c]: truncation level of component c in study l
    std::vector<std::vector<std::size_t>> d_levels;
    /// Leading samples stored as binary ensembles and overlay CSVs.
    std::size_t stored_samples = 5;
    /// Apparent-conductivity value fed to the statistics: "normalized" or "literal".
    std::string pde_statistic = "normalized";
    std::string output_dir;

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
};

/// Parses config text; ConfigError carries the parser's line/column.
ExperimentConfig parse_config(const std::string& text);

/// Empty iff run_experiment would start.
std::vector<std::string> validate(const ExperimentConfig& config);

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

/// Number of FD components a kind produces and their labels.
std::vector<std::string> component_labels(const ExperimentConfig& config);

/// Paired target/FD functionals of one component at every level.
struct ComponentStudy {
    std::string label;
    std::vector<double> target;
    std::vector<ConvergenceInput> levels;
};

struct RunResult {
    std::string directory;
    nlohmann::json manifest;
    std::vector<ComponentStudy> studies;
};

/// Runs the experiment, writing artifacts to config.output_dir.
/// Throws ArgumentError listing all violations when the config is invalid.
RunResult run_experiment(const ExperimentConfig& config);

/// Computes the paired studies without writing files.
std::vector<ComponentStudy> compute_studies(const ExperimentConfig& config);

/// Recomputes exceedance.csv and report.csv of a finished run from its
/// per-sample scatter files, writing them to out_dir.
void recompute_report(const std::string& run_dir, const std::string& out_dir);

/// Writes Nystrom bases of the config's kernels (largest d of each component).
std::vector<std::string> write_config_bases(const ExperimentConfig& config, const std::string& out_dir);

} // namespace fdkl
