#pragma once

#include "fdkl/ensemble.hpp"
#include "fdkl/spectral_basis.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace fdkl {

/// Truncated expansion of one component: mean + sum_{k<d} Z_k phi_k.
struct ComponentExpansion {
    std::shared_ptr<const SpectralBasis> basis; ///< modes tabulated on the ensemble grid
    std::size_t d = 0;
    Eigen::MatrixXd coefficients; ///< d x n_samples
    Eigen::VectorXd mean;         ///< n_nodes; zero for zero-mean processes
};

/// Finite-dimensional model paired with the ensemble it was projected from.
class FdModel {
public:
    FdModel(std::shared_ptr<const PathEnsemble> source, std::vector<ComponentExpansion> components);

    std::size_t n_components() const { return components_.size(); }
    std::size_t n_samples() const { return source_->n_samples(); }
    std::size_t d(std::size_t c) const { return components_.at(c).d; }
    const ComponentExpansion& component(std::size_t c) const { return components_.at(c); }
    const Eigen::MatrixXd& coefficients(std::size_t c) const { return components_.at(c).coefficients; }
    const PathEnsemble& source() const { return *source_; }
    std::shared_ptr<const PathEnsemble> source_ptr() const { return source_; }

    /// Same coefficients, keeping only the first d_c modes of each component.
    FdModel truncated(const std::vector<std::size_t>& d) const;

private:
    std::shared_ptr<const PathEnsemble> source_;
    std::vector<ComponentExpansion> components_;
};

/// Z_{c,k}(s) = sum_j w_j (X_c(t_j, s) - mean_c(t_j)) phi_{c,k}(t_j).
///
/// The ensemble grid must equal the basis nodes or contain all of them. In the
/// latter case modes are interpolated linearly onto the ensemble grid and the
/// ensemble's trapezoid weights are used. `means` may be empty (zero mean).
FdModel project(std::shared_ptr<const PathEnsemble> ensemble, const std::vector<SpectralBasis>& bases,
                const std::vector<std::size_t>& d, const std::vector<Eigen::VectorXd>& means = {});

inline FdModel project(const PathEnsemble& ensemble, const std::vector<SpectralBasis>& bases, const std::vector<std::size_t>& d,
                       const std::vector<Eigen::VectorXd>& means = {}) {
    return project(std::make_shared<const PathEnsemble>(ensemble), bases, d, means);
}

/// Basis tabulated on the ensemble grid, as used by project().
SpectralBasis basis_on_grid(const SpectralBasis& basis, const Grid& grid);

Eigen::VectorXd reconstruct(const FdModel& model, std::size_t sample, std::size_t component);

/// Every sample of every component, labels and seed taken from the source.
PathEnsemble reconstruct_ensemble(const FdModel& model);

/// sum_{k>=d} lambda_k phi_k(t_node)^2 over the stored modes.
double truncation_mse(const SpectralBasis& basis, std::size_t d, std::size_t node);

/// Per sample: max over components and grid nodes of |X_d - X|.
std::vector<double> sup_discrepancy(const FdModel& model);

/// Per sample: max over grid nodes of |X_d - X| for one component.
std::vector<double> sup_discrepancy(const FdModel& model, std::size_t component);

/// CSV rows (sample_id, component, k, value); component and k are 1-based.
void write_coefficients_csv(const FdModel& model, const std::string& path);
/// Model metadata: d per component, eigenvalues, source shape and seed.
void write_model_json(const FdModel& model, const std::string& path);

} // namespace fdkl
