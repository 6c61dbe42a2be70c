#pragma once

#include "fdkl/grid.hpp"
#include "fdkl/rng.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace fdkl {

/// Sampled paths of a scalar or vector-valued process on a common grid.
///
/// Component c is stored as an n_nodes x n_samples matrix, one column per
/// sample path. All values are finite.
class PathEnsemble {
public:
    PathEnsemble(Grid grid, std::vector<Eigen::MatrixXd> components, std::vector<std::string> labels = {},
                 SeededRng seed = SeededRng());

    const Grid& grid() const { return grid_; }
    std::size_t n_samples() const { return static_cast<std::size_t>(components_.front().cols()); }
    std::size_t n_components() const { return components_.size(); }
    std::size_t n_nodes() const { return grid_.size(); }

    const Eigen::MatrixXd& component(std::size_t c) const { return components_.at(c); }
    Eigen::MatrixXd::ConstColXpr path(std::size_t c, std::size_t sample) const;

    const std::vector<std::string>& labels() const { return labels_; }
    const SeededRng& seed() const { return seed_; }

    /// Single-component ensemble holding component c.
    PathEnsemble select(std::size_t c) const;
    /// First n samples.
    PathEnsemble head(std::size_t n) const;

private:
    Grid grid_;
    std::vector<Eigen::MatrixXd> components_;
    std::vector<std::string> labels_;
    SeededRng seed_;
};

/// Component-wise concatenation (same grid and sample count).
PathEnsemble stack_components(const std::vector<PathEnsemble>& parts);

/// Linear interpolation of every path onto a finer 1D grid within the original range.
PathEnsemble resample_linear(const PathEnsemble& ensemble, const Grid& target);

/// Writes <stem>.bin and <stem>.json.
///
/// Binary layout (little-endian): "FDKLENS1", u64 dim, u64 axis sizes, f64 axis
/// nodes, u64 n_samples, u64 n_components, then f64 values ordered
/// [sample][component][node].
void write_ensemble(const PathEnsemble& ensemble, const std::string& stem);
PathEnsemble read_ensemble(const std::string& stem);

/// CSV slice: columns sample_id, component, t[, t2], value.
void write_ensemble_csv(const PathEnsemble& ensemble, const std::string& path, std::size_t max_samples);

} // namespace fdkl
