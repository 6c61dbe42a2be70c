#include "fdkl/errors.hpp"
#include "fdkl/extremes.hpp"
#include "fdkl/io.hpp"
#include "fdkl/klmodel.hpp"
#include "fdkl/marginals.hpp"
#include "fdkl/samplers.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace fdkl;

namespace {

PathEnsemble single_path(const Grid& g, const Eigen::VectorXd& x) {
    return PathEnsemble(g, {Eigen::MatrixXd(x)});
}

} // namespace

TEST_CASE("projecting a basis function gives a unit coefficient") {
    const Grid g = Grid::uniform(0.0, 10.0, 201);
    const SpectralBasis b = nystrom_on_grid(Kernel::ou(1.0, 10.0), g, 8);
    const FdModel m = project(single_path(g, b.modes().col(0)), {b}, {8});
    Eigen::VectorXd expect = Eigen::VectorXd::Zero(8);
    expect(0) = 1.0;
    CHECK((m.coefficients(0).col(0) - expect).cwiseAbs().maxCoeff() < 1e-10);
    for (std::size_t d : {1u, 3u, 8u}) {
        const Eigen::VectorXd r = reconstruct(m.truncated({d}), 0, 0);
        CHECK((r - b.modes().col(0)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("zero path projects to zero and reconstruction is linear") {
    const Grid g = Grid::uniform(0.0, 10.0, 101);
    const SpectralBasis b = nystrom_on_grid(Kernel::ou(1.0, 10.0), g, 5);
    const FdModel zero = project(single_path(g, Eigen::VectorXd::Zero(101)), {b}, {5});
    CHECK(zero.coefficients(0).cwiseAbs().maxCoeff() == 0.0);

    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(101, -1.0, 2.0).array().sin();
    const FdModel m1 = project(single_path(g, x), {b}, {5});
    const FdModel m3 = project(single_path(g, 3.0 * x), {b}, {5});
    CHECK((reconstruct(m3, 0, 0) - 3.0 * reconstruct(m1, 0, 0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("full basis reconstructs the source path") {
    const Grid g = Grid::uniform(0.0, 5.0, 41);
    const SpectralBasis b = nystrom_on_grid(Kernel::matern_like(0.5, 5.0), g, 41);
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(41, 0.0, 5.0).array().cos();
    const FdModel m = project(single_path(g, x), {b}, {41});
    CHECK(sup_discrepancy(m)[0] < 1e-8);
}

TEST_CASE("projection onto a refining grid interpolates the modes") {
    const Grid coarse = Grid::uniform(0.0, 10.0, 11);
    const Grid fine = Grid::uniform(0.0, 10.0, 101);
    const SpectralBasis b = nystrom_on_grid(Kernel::ou(0.5, 10.0), coarse, 4);
    const FdModel m = project(single_path(fine, Eigen::VectorXd::Ones(101)), {b}, {4});
    CHECK(m.component(0).basis->n_nodes() == 101);

    const Grid shifted = Grid::uniform(0.05, 9.95, 100);
    try {
        project(single_path(shifted, Eigen::VectorXd::Ones(100)), {b}, {4});
        FAIL("expected a grid mismatch");
    } catch (const ArgumentError& e) {
        CHECK(std::string(e.what()).find("basis node") != std::string::npos);
        CHECK(std::string(e.what()).find(" 0 ") != std::string::npos);
    }
}

TEST_CASE("projection argument errors") {
    const Grid g = Grid::uniform(0.0, 10.0, 21);
    const SpectralBasis b = nystrom_on_grid(Kernel::ou(1.0, 10.0), g, 3);
    const auto e = single_path(g, Eigen::VectorXd::Ones(21));
    CHECK_THROWS_AS(project(e, {b}, {4}), ArgumentError);
    CHECK_THROWS_AS(project(e, {b}, {0}), ArgumentError);
    CHECK_THROWS_AS(project(e, {b, b}, {1, 1}), ArgumentError);
    const FdModel m = project(e, {b}, {3});
    CHECK_THROWS_AS(reconstruct(m, 1, 0), ArgumentError);
    CHECK_THROWS_AS(reconstruct(m, 0, 1), ArgumentError);
    CHECK_THROWS_AS(m.truncated({4}), ArgumentError);
}

TEST_CASE("truncation mse is monotone and vanishes at the full basis") {
    const Kernel k = Kernel::matern_like(0.1, 50.0);
    const Grid g = Grid::uniform(0.0, 50.0, 201);
    const SpectralBasis b = nystrom_on_grid(k, g, 201);
    for (std::size_t node : {0u, 50u, 100u, 200u}) {
        CHECK(truncation_mse(b, 201, node) == 0.0);
        CHECK(truncation_mse(b, 0, node) == doctest::Approx(1.0).epsilon(1e-6));
        double prev = 1e300;
        for (std::size_t d = 0; d <= 201; d += 5) {
            const double v = truncation_mse(b, d, node);
            CHECK(v <= prev);
            prev = v;
        }
    }
    CHECK_THROWS_AS(truncation_mse(b, 202, 0), ArgumentError);
}

TEST_CASE("coefficient law of gaussian paths") {
    const Kernel k = Kernel::matern_like(0.1, 50.0);
    const Grid g = Grid::uniform(0.0, 50.0, 201);
    const std::size_t n = 2000;
    const auto paths = std::make_shared<const PathEnsemble>(sample_gaussian_process(k, g, n, SeededRng(11)));
    const SpectralBasis b = nystrom_on_grid(k, g, 201);
    const FdModel m = project(paths, {b}, {201});
    const Eigen::MatrixXd& z = m.coefficients(0);

    const std::size_t d = 15;
    const Eigen::MatrixXd zd = z.topRows(d);
    const Eigen::VectorXd mean = zd.rowwise().mean();
    const Eigen::MatrixXd cov = zd * zd.transpose() / static_cast<double>(n);
    const double lmax = b.eigenvalue(0);
    for (std::size_t i = 0; i < d; ++i) {
        CHECK(std::abs(mean(i)) < 4.0 * std::sqrt(b.eigenvalue(i) / n));
        for (std::size_t j = 0; j < d; ++j) CHECK(std::abs(cov(i, j) - (i == j ? b.eigenvalue(i) : 0.0)) < 4.0 * lmax / std::sqrt(n));
    }
    for (std::size_t i : {0u, 4u, 14u}) {
        std::vector<double> u;
        for (std::size_t s = 0; s < n; ++s) u.push_back(z(i, s) / std::sqrt(b.eigenvalue(i)));
        CHECK(ks_pvalue(ks_statistic(u, normal_cdf), static_cast<double>(n)) > 0.01);
    }

    // empirical truncation error against the tail variance sum
    for (std::size_t dl : {5u, 10u, 15u}) {
        const FdModel t = m.truncated({dl});
        for (std::size_t node : {40u, 100u}) {
            std::vector<double> sq;
            for (std::size_t s = 0; s < n; ++s) {
                const double e = reconstruct(t, s, 0)(node) - paths->component(0)(node, s);
                sq.push_back(e * e);
            }
            double mu = 0.0;
            for (double v : sq) mu += v;
            mu /= static_cast<double>(n);
            const double se = sample_std(sq) / std::sqrt(static_cast<double>(n));
            CHECK(std::abs(mu - truncation_mse(b, dl, node)) < 3.0 * se);
        }
    }

    const auto q5 = median(sup_discrepancy(m.truncated({5})));
    const auto q10 = median(sup_discrepancy(m.truncated({10})));
    const auto q15 = median(sup_discrepancy(m.truncated({15})));
    CHECK(q5 >= q10);
    CHECK(q10 >= q15);
}

TEST_CASE("sup discrepancy takes the max over components") {
    const Grid g = Grid::uniform(0.0, 1.0, 11);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(11, 1), c = Eigen::MatrixXd::Zero(11, 1);
    a(3, 0) = 0.5;
    c(7, 0) = -2.0;
    const auto e = std::make_shared<const PathEnsemble>(PathEnsemble(g, {a, c}));
    const SpectralBasis b = nystrom_on_grid(Kernel::ou(1.0, 1.0), g, 1);
    const FdModel m = project(e, {b, b}, {1, 1});
    const auto both = sup_discrepancy(m);
    CHECK(both[0] == std::max(sup_discrepancy(m, 0)[0], sup_discrepancy(m, 1)[0]));
}

TEST_CASE("coefficient csv and model json") {
    const auto dir = std::filesystem::temp_directory_path() / "fdkl_klmodel";
    std::filesystem::create_directories(dir);
    const Grid g = Grid::uniform(0.0, 10.0, 51);
    const SpectralBasis b = nystrom_on_grid(Kernel::ou(1.0, 10.0), g, 4);
    const FdModel m = project(sample_gaussian_process(Kernel::ou(1.0, 10.0), g, 3, SeededRng(1)), {b}, {4});
    write_coefficients_csv(m, (dir / "z.csv").string());
    const CsvTable t = read_csv((dir / "z.csv").string());
    REQUIRE(t.rows.size() == 12);
    CHECK(t.header == std::vector<std::string>{"sample_id", "component", "k", "value"});
    CHECK(t.rows[5][0] == 1.0);
    CHECK(t.rows[5][1] == 1.0);
    CHECK(t.rows[5][2] == 2.0);
    CHECK(t.rows[5][3] == m.coefficients(0)(1, 1));
    write_model_json(m, (dir / "m.json").string());
    CHECK(read_text_file((dir / "m.json").string()).find("fdkl.model") != std::string::npos);
}
