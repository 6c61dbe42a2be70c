#include "fdkl/errors.hpp"
#include "fdkl/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace fdkl;

TEST_CASE("uniform grid nodes and trapezoid weights") {
    const Grid g = Grid::uniform(0.0, 2.0, 5);
    CHECK(g.size() == 5);
    CHECK(g.is_uniform());
    CHECK(g.spacing() == doctest::Approx(0.5));
    const auto w = g.trapezoid_weights();
    CHECK(w.front() == doctest::Approx(0.25));
    CHECK(w[2] == doctest::Approx(0.5));
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(2.0));
}

TEST_CASE("grid construction errors") {
    CHECK_THROWS_AS(Grid::uniform(1.0, 1.0, 4), ArgumentError);
    CHECK_THROWS_AS(Grid::uniform(0.0, 1.0, 0), ArgumentError);
    CHECK_THROWS_AS(Grid::from_nodes({0.0, 0.5, 0.5}), ArgumentError);
    CHECK_THROWS_AS(Grid::tensor(Grid::tensor(Grid::uniform(0, 1, 2), Grid::uniform(0, 1, 2)), Grid::uniform(0, 1, 2)),
                    ArgumentError);
}

TEST_CASE("tensor grid ordering puts the first axis fastest") {
    const Grid g = Grid::tensor(Grid::uniform(0.0, 1.0, 3), Grid::uniform(0.0, 2.0, 2));
    CHECK(g.size() == 6);
    CHECK(g.point(1)[0] == doctest::Approx(0.5));
    CHECK(g.point(1)[1] == 0.0);
    CHECK(g.point(3)[0] == 0.0);
    CHECK(g.point(3)[1] == doctest::Approx(2.0));
    const auto w = g.trapezoid_weights();
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(2.0));
}

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
    const auto rule = gauss_legendre(-1.0, 3.0, 5);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], 9);
    // integral of t^9 over [-1, 3] = (3^10 - 1) / 10
    CHECK(sum == doctest::Approx((std::pow(3.0, 10) - 1.0) / 10.0).epsilon(1e-13));
}

TEST_CASE("linear interpolation clamps outside the node range") {
    const std::vector<double> nodes{0.0, 1.0, 3.0};
    const double values[] = {1.0, 3.0, -1.0};
    CHECK(interpolate_linear(nodes, values, 0.5) == doctest::Approx(2.0));
    CHECK(interpolate_linear(nodes, values, 2.0) == doctest::Approx(1.0));
    CHECK(interpolate_linear(nodes, values, -5.0) == 1.0);
    CHECK(interpolate_linear(nodes, values, 9.0) == -1.0);
}
