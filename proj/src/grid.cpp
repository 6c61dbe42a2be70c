#include "fdkl/grid.hpp"

#include "fdkl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace fdkl {

Grid Grid::uniform(double lo, double hi, std::size_t n) {
    if (n == 0) throw ArgumentError("grid needs at least one node");
    if (n > 1 && !(hi > lo)) throw ArgumentError("grid upper bound must exceed lower bound");
    std::vector<double> nodes(n);
    if (n == 1) {
        nodes[0] = lo;
    } else {
        const double h = (hi - lo) / static_cast<double>(n - 1);
        for (std::size_t j = 0; j < n; ++j) nodes[j] = lo + h * static_cast<double>(j);
        nodes.back() = hi;
    }
    return Grid({std::move(nodes)});
}

Grid Grid::from_nodes(std::vector<double> nodes) {
    if (nodes.empty()) throw ArgumentError("grid needs at least one node");
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        if (!std::isfinite(nodes[j])) throw ArgumentError("grid node is not finite");
        if (j > 0 && !(nodes[j] > nodes[j - 1]))
            throw ArgumentError("grid nodes must be strictly increasing (node " + std::to_string(j) + ")");
    }
    return Grid({std::move(nodes)});
}

Grid Grid::tensor(const Grid& axis1, const Grid& axis2) {
    if (axis1.dim() != 1 || axis2.dim() != 1) throw ArgumentError("tensor grid needs two 1D axes");
    return Grid({axis1.nodes(), axis2.nodes()});
}

std::size_t Grid::size() const {
    if (axes_.empty()) return 0;
    std::size_t n = 1;
    for (const auto& a : axes_) n *= a.size();
    return n;
}

Point Grid::point(std::size_t j) const {
    if (dim() == 1) return {axes_[0][j], 0.0};
    const std::size_t n1 = axes_[0].size();
    return {axes_[0][j % n1], axes_[1][j / n1]};
}

bool Grid::is_uniform(double rtol) const {
    for (const auto& a : axes_) {
        if (a.size() < 3) continue;
        const double h = (a.back() - a.front()) / static_cast<double>(a.size() - 1);
        for (std::size_t j = 1; j < a.size(); ++j)
            if (std::abs((a[j] - a[j - 1]) - h) > rtol * h) return false;
    }
    return true;
}

double Grid::spacing(std::size_t k) const {
    const auto& a = axes_.at(k);
    if (a.size() < 2) return 0.0;
    return (a.back() - a.front()) / static_cast<double>(a.size() - 1);
}

std::vector<double> trapezoid_weights(const std::vector<double>& nodes) {
    const std::size_t n = nodes.size();
    std::vector<double> w(n, 0.0);
    if (n == 1) {
        w[0] = 1.0;
        return w;
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double h = nodes[j + 1] - nodes[j];
        w[j] += 0.5 * h;
        w[j + 1] += 0.5 * h;
    }
    return w;
}

std::vector<double> Grid::trapezoid_weights() const {
    if (dim() == 1) return fdkl::trapezoid_weights(axes_[0]);
    const auto w1 = fdkl::trapezoid_weights(axes_[0]);
    const auto w2 = fdkl::trapezoid_weights(axes_[1]);
    std::vector<double> w(size());
    for (std::size_t i2 = 0; i2 < w2.size(); ++i2)
        for (std::size_t i1 = 0; i1 < w1.size(); ++i1) w[i1 + w1.size() * i2] = w1[i1] * w2[i2];
    return w;
}

QuadratureRule gauss_legendre(double lo, double hi, std::size_t n) {
    if (n == 0) throw ArgumentError("Gauss-Legendre rule needs n >= 1");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mid = 0.5 * (hi + lo);
    const double half = 0.5 * (hi - lo);
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        // Newton on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double dk = static_cast<double>(k);
                const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
                p0 = p1;
                p1 = p2;
            }
            dp = dn * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = mid - half * x;
        rule.nodes[n - 1 - i] = mid + half * x;
        rule.weights[i] = half * w;
        rule.weights[n - 1 - i] = half * w;
    }
    return rule;
}

double interpolate_linear(const std::vector<double>& nodes, const double* values, double x) {
    const std::size_t n = nodes.size();
    if (n == 1 || x <= nodes.front()) return values[0];
    if (x >= nodes.back()) return values[n - 1];
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - nodes.begin());
    const double t = (x - nodes[j - 1]) / (nodes[j] - nodes[j - 1]);
    return (1.0 - t) * values[j - 1] + t * values[j];
}

} // namespace fdkl
