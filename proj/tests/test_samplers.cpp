#include "fdkl/errors.hpp"
#include "fdkl/extremes.hpp"
#include "fdkl/marginals.hpp"
#include "fdkl/parallel.hpp"
#include "fdkl/samplers.hpp"

#include <doctest.h>

#include <cmath>

using namespace fdkl;

// reference values from scipy.stats (norm, beta, gumbel_r)
TEST_CASE("normal cdf and quantile against reference values") {
    CHECK(normal_quantile(0.025) == doctest::Approx(-1.9599639845400545).epsilon(1e-14));
    CHECK(normal_quantile(0.9) == doctest::Approx(1.2815515655446004).epsilon(1e-14));
    CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-13));
    CHECK(normal_cdf(-8.0) == doctest::Approx(6.22096057427174e-16).epsilon(1e-12));
    CHECK(normal_cdf(0.3) == doctest::Approx(0.6179114221889526).epsilon(1e-14));
    CHECK_THROWS_AS(normal_quantile(0.0), ArgumentError);
}

TEST_CASE("beta quantile with an unbounded density at zero") {
    CHECK(beta_quantile(0.5, 1.5, 1e-6) == doctest::Approx(6.168502750682119e-13).epsilon(1e-10));
    CHECK(beta_quantile(0.5, 1.5, 0.1) == doctest::Approx(0.0061812439384296685).epsilon(1e-11));
    CHECK(beta_quantile(0.5, 1.5, 0.5) == doctest::Approx(0.16319398540839275).epsilon(1e-11));
    CHECK(beta_quantile(0.5, 1.5, 0.9) == doctest::Approx(0.6486428019743724).epsilon(1e-11));
    CHECK(beta_quantile(0.5, 1.5, 0.999999) == doctest::Approx(0.9998229379953266).epsilon(1e-11));
    CHECK(beta_quantile(0.5, 1.5, 1e-12, true) == doctest::Approx(0.9999999822931726).epsilon(1e-12));
    CHECK(beta_quantile(0.5, 1.5, 0.0) == 0.0);
    CHECK(beta_quantile(0.5, 1.5, 1.0) == 1.0);
    CHECK_THROWS_AS(beta_quantile(0.0, 1.5, 0.5), ArgumentError);
}

TEST_CASE("gumbel marginal") {
    const Marginal g = Marginal::gumbel(1.0, 2.0);
    CHECK(g.quantile(0.01) == doctest::Approx(-2.0543592516158022).epsilon(1e-13));
    CHECK(g.quantile(0.99) == doctest::Approx(10.200298453553158).epsilon(1e-13));
    CHECK(g.mean() == doctest::Approx(2.1544313298030655).epsilon(1e-14));
    CHECK(g.cdf(g.quantile(0.3)) == doctest::Approx(0.3).epsilon(1e-13));
    CHECK(Marginal::gumbel(0.0, 1.0).from_gaussian(0.0) == doctest::Approx(-std::log(std::log(2.0))).epsilon(1e-15));
    CHECK_THROWS_AS(Marginal::gumbel(0.0, 0.0), ArgumentError);
    CHECK_THROWS_AS(Marginal::scaled_beta(0.5, 1.5, 2.0, 1.0), ArgumentError);
    CHECK_THROWS_AS(g.from_gaussian(std::nan("")), ArgumentError);
}

TEST_CASE("translation map is monotone and respects the beta support") {
    const Marginal b = Marginal::scaled_beta(0.5, 1.5, 1.0, 20.0);
    double prev = -1.0;
    for (double z = -9.0; z <= 9.0; z += 0.01) {
        const double x = b.from_gaussian(z);
        CHECK(x >= 1.0);
        CHECK(x <= 20.0);
        CHECK(x >= prev);
        prev = x;
    }
    const Marginal gm = Marginal::gumbel(0.0, 1.0);
    CHECK(gm.from_gaussian(-1.0) < gm.from_gaussian(-0.999));
    CHECK(gm.from_gaussian(7.0) < gm.from_gaussian(7.01));
}

TEST_CASE("translation covariance against direct quadrature") {
    // scipy dblquad of E[(Y(a) - m)(Y(b) - m)] for the Gumbel(0, 1) translation
    const TranslationCovariance c(Marginal::gumbel(0.0, 1.0));
    CHECK(c.mean() == doctest::Approx(0.5772156649015329).epsilon(1e-10));
    CHECK(c.variance() == doctest::Approx(1.6449340668482264).epsilon(1e-10));
    CHECK(std::abs(c(0.0)) < 1e-14);
    CHECK(c(0.5) == doctest::Approx(0.797085174040389).epsilon(1e-8));
    CHECK(c(0.9) == doctest::Approx(1.47111259271038).epsilon(1e-6));
    CHECK(c(1.0) == doctest::Approx(c.variance()).epsilon(1e-14));
    // the identity map keeps the correlation
    const TranslationCovariance id(Marginal::standard_normal());
    CHECK(id(0.37) == doctest::Approx(0.37).epsilon(1e-12));
    CHECK_THROWS_AS(c(1.5), ArgumentError);
}

TEST_CASE("gaussian process sample moments") {
    const Kernel k = Kernel::matern_like(0.1, 50.0);
    const Grid g = Grid::uniform(0.0, 50.0, 501);
    const std::size_t n = 5000;
    const PathEnsemble e = sample_gaussian_process(k, g, n, SeededRng(3));
    const auto& x = e.component(0);
    const double var0 = x.row(0).squaredNorm() / n;
    CHECK(std::abs(var0 - 1.0) < 0.06);
    // lag 10 between nodes 100 and 200
    const double corr = x.row(100).dot(x.row(200)) / n;
    CHECK(std::abs(corr - 2.0 * std::exp(-1.0)) < 0.03);
    // 20-node probe of the full correlation matrix
    double worst = 0.0;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            const double emp = x.row(25 * i).dot(x.row(25 * j)) / n;
            worst = std::max(worst, std::abs(emp - k(g.nodes()[25 * i], g.nodes()[25 * j])));
        }
    CHECK(worst < 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("single-node grid gives standard normals") {
    const PathEnsemble e = sample_gaussian_process(Kernel::ou(1.0, 1.0), Grid::from_nodes({0.5}), 4000, SeededRng(5));
    std::vector<double> v(e.component(0).data(), e.component(0).data() + 4000);
    CHECK(ks_pvalue(ks_statistic(v, normal_cdf), 4000.0) > 0.01);
}

TEST_CASE("2D gaussian field moments and node cap") {
    const Kernel k = Kernel::gauss2d(0.7, 20.0, 15.0);
    const Grid g = Grid::tensor(Grid::uniform(0.0, 20.0, 21), Grid::uniform(0.0, 15.0, 16));
    const std::size_t n = 1000;
    const PathEnsemble e = sample_gaussian_field_2d(k, g, n, SeededRng(8));
    const auto& x = e.component(0);
    // nodes (5, 5) and (6, 5) are one unit apart along t1
    const Eigen::Index a = 5 + 21 * 5, b = 6 + 21 * 5;
    // 4 standard errors of the sample second moments
    const double r = std::exp(-0.5);
    CHECK(std::abs(x.row(a).squaredNorm() / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(x.row(a).dot(x.row(b)) / n - r) < 4.0 * std::sqrt((1.0 + r * r) / n));
    const Grid big = Grid::tensor(Grid::uniform(0.0, 20.0, 70), Grid::uniform(0.0, 15.0, 70));
    try {
        sample_gaussian_field_2d(k, big, 2, SeededRng(1));
        FAIL("expected the node cap to trigger");
    } catch (const ArgumentError& err) {
        CHECK(std::string(err.what()).find("coarser") != std::string::npos);
    }
}

TEST_CASE("jitter escalation and failure") {
    Eigen::MatrixXd singular = Eigen::MatrixXd::Ones(4, 4);
    const auto f = factor_covariance(singular);
    CHECK(f.jitter > 0.0);
    CHECK((f.lower * f.lower.transpose() - singular).cwiseAbs().maxCoeff() < 1e-5);
    Eigen::MatrixXd indefinite = Eigen::MatrixXd::Identity(3, 3);
    indefinite(2, 2) = -1.0;
    try {
        factor_covariance(indefinite);
        FAIL("expected a numerical error");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("jitter") != std::string::npos);
    }
}

TEST_CASE("ou sampler matches the exact AR(1) law") {
    const Grid g = Grid::uniform(0.0, 10.0, 1001);
    const std::size_t n = 5000;
    const PathEnsemble y = sample_ou(1.0, g, n, SeededRng(9));
    const auto& x = y.component(0);
    for (Eigen::Index j : {0, 500, 1000}) CHECK(std::abs(x.row(j).squaredNorm() / n - 1.0) < 0.06);
    const double lag = x.row(300).dot(x.row(301)) / n;
    CHECK(std::abs(lag - std::exp(-0.01)) < 0.03);
    CHECK(std::exp(-0.01) == doctest::Approx(0.990050).epsilon(1e-6));
    CHECK_THROWS_AS(sample_ou(1.0, Grid::from_nodes({0.0, 0.1, 0.3}), 2, SeededRng(1)), ArgumentError);
    CHECK_THROWS_AS(sample_ou(0.0, g, 2, SeededRng(1)), ArgumentError);
}

TEST_CASE("translated ensemble follows the target marginal") {
    const Kernel k = Kernel::matern_like(0.2, 50.0);
    const Grid g = Grid::uniform(0.0, 50.0, 26);
    const Marginal m = Marginal::gumbel(1.0, 2.0);
    const PathEnsemble x = translation_apply(m, sample_gaussian_process(k, g, 5000, SeededRng(4)));
    // nodes 10 units apart are nearly independent; pool every 5th node
    std::vector<double> pooled;
    for (Eigen::Index j = 0; j < 26; j += 5)
        for (Eigen::Index s = 0; s < 5000; ++s) pooled.push_back(x.component(0)(j, s));
    CHECK(ks_statistic(pooled, [&](double v) { return m.cdf(v); }) < 0.02);
}

TEST_CASE("samplers are reproducible and thread-count independent") {
    const Kernel k = Kernel::matern_like(0.1, 50.0);
    const Grid g = Grid::uniform(0.0, 50.0, 101);
    set_thread_count(1);
    const PathEnsemble a = sample_gaussian_process(k, g, 40, SeededRng(77));
    const PathEnsemble o1 = sample_ou(1.0, g, 40, SeededRng(77));
    set_thread_count(4);
    const PathEnsemble b = sample_gaussian_process(k, g, 40, SeededRng(77));
    const PathEnsemble o2 = sample_ou(1.0, g, 40, SeededRng(77));
    set_thread_count(1);
    CHECK((a.component(0) - b.component(0)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((o1.component(0) - o2.component(0)).cwiseAbs().maxCoeff() == 0.0);
    const PathEnsemble c = sample_gaussian_process(k, g, 40, SeededRng(78));
    CHECK((a.component(0) - c.component(0)).cwiseAbs().maxCoeff() > 0.0);
    // sample s does not depend on how many samples are drawn
    const PathEnsemble d = sample_gaussian_process(k, g, 10, SeededRng(77));
    CHECK((d.component(0) - a.component(0).leftCols(10)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("piecewise-linear reference") {
    const Grid g = Grid::uniform(0.0, 1.0, 101);
    Eigen::MatrixXd lin(101, 1), wave(101, 1);
    for (int j = 0; j < 101; ++j) {
        lin(j, 0) = 2.0 * g.nodes()[j] - 0.5;
        wave(j, 0) = std::sin(7.0 * g.nodes()[j]);
    }
    const PathEnsemble e(g, {lin, wave});
    const PathEnsemble r = piecewise_linear_reference(e, 10);
    CHECK((r.component(0) - lin).cwiseAbs().maxCoeff() < 1e-14);
    for (int j = 0; j < 101; j += 10) CHECK(r.component(1)(j, 0) == wave(j, 0));
    // sup error bounded by twice the modulus of continuity at 1/N: |sin' | <= 7
    CHECK((r.component(1) - wave).cwiseAbs().maxCoeff() <= 2.0 * 7.0 * 0.1);
    CHECK((piecewise_linear_reference(e, 100).component(1) - wave).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(piecewise_linear_reference(e, 7), ArgumentError);
}
