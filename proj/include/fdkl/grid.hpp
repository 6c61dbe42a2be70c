#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace fdkl {

using Point = std::array<double, 2>;

/// Node set of a 1D interval or a 2D tensor-product rectangle.
///
/// 2D nodes are ordered with the first axis fastest:
/// flat index = i1 + n1 * i2.
class Grid {
public:
    Grid() = default;

    static Grid uniform(double lo, double hi, std::size_t n);
    static Grid from_nodes(std::vector<double> nodes);
    static Grid tensor(const Grid& axis1, const Grid& axis2);

    std::size_t dim() const { return axes_.size(); }
    std::size_t size() const;
    std::size_t axis_size(std::size_t k) const { return axes_.at(k).size(); }
    const std::vector<double>& axis(std::size_t k) const { return axes_.at(k); }
    const std::vector<double>& nodes() const { return axes_.at(0); }

    Point point(std::size_t j) const;

    double lo(std::size_t k = 0) const { return axes_.at(k).front(); }
    double hi(std::size_t k = 0) const { return axes_.at(k).back(); }

    /// True when every axis has constant spacing to relative tolerance rtol.
    bool is_uniform(double rtol = 1e-9) const;
    double spacing(std::size_t k = 0) const;

    /// Composite trapezoid weights (tensor products in 2D).
    std::vector<double> trapezoid_weights() const;

    bool operator==(const Grid& other) const { return axes_ == other.axes_; }

private:
    explicit Grid(std::vector<std::vector<double>> axes) : axes_(std::move(axes)) {}
    std::vector<std::vector<double>> axes_;
};

/// Trapezoid weights for an arbitrary increasing 1D node list.
std::vector<double> trapezoid_weights(const std::vector<double>& nodes);

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [lo, hi].
QuadratureRule gauss_legendre(double lo, double hi, std::size_t n);

/// Linear interpolation of tabulated values (nodes increasing) at x.
/// Values outside [nodes.front(), nodes.back()] are clamped to the end values.
double interpolate_linear(const std::vector<double>& nodes, const double* values, double x);

} // namespace fdkl
