#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "swing/basis.hpp"
#include "swing/error.hpp"
#include "swing/rng.hpp"

using namespace swing;

namespace {

// (-1)^k e^{x^2} d^k/dx^k e^{-x^2} by a central finite-difference stencil
// applied k times (Richardson-free, so the step stays moderate).
double hermite_by_derivative(unsigned k, double x) {
    const double h = 1e-2;
    std::function<double(unsigned, double)> d = [&](unsigned order, double t) -> double {
        if (order == 0) return std::exp(-t * t);
        // Fourth-order central difference of the (order-1)-th derivative.
        return (-d(order - 1, t + 2 * h) + 8 * d(order - 1, t + h) - 8 * d(order - 1, t - h) +
                d(order - 1, t - 2 * h)) /
               (12 * h);
    };
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign * std::exp(x * x) * d(k, x);
}

}  // namespace

TEST_CASE("physicists' Hermite recursion") {
    for (double x : {-2.0, 0.0, 0.3, 5.0}) CHECK(hermite_raw(0, x) == 1.0);
    CHECK(hermite_raw(1, 0.7) == doctest::Approx(1.4));
    CHECK(hermite_raw(2, 1.0) == 2.0);
    const double fd = hermite_by_derivative(5, 0.7);
    CHECK(std::abs(hermite_raw(5, 0.7) - fd) <= 1e-6 * std::abs(fd));
}

TEST_CASE("probabilists' Hermite relation to physicists'") {
    for (unsigned k = 0; k < 8; ++k) {
        for (double x : {-1.3, 0.2, 2.1}) {
            const double expected = std::pow(2.0, -0.5 * k) * hermite_raw(k, x / std::sqrt(2.0));
            CHECK(hermite_probabilists(k, x) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("normalized Hermite basis is orthonormal under N(0,1)") {
    const BasisSpec spec{BasisKind::normalized_hermite, 5, {}};
    CHECK(eval_basis(spec, 3.7)(0) == 1.0);
    const std::size_t n = 1000000;
    std::vector<double> xs(n);
    CounterRng rng(2024, 1);
    for (auto& x : xs) x = rng.normal();
    const Eigen::MatrixXd design = design_matrix(spec, xs);
    const auto gram = empirical_gram(design);
    CHECK(gram.samples == n);
    // Five standard errors per entry; the product h_i h_j has unit spread only
    // for low degrees (about 24 for h_4^2).
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            const Eigen::ArrayXd prod = design.col(i).array() * design.col(j).array();
            const double sd = std::sqrt((prod - prod.mean()).square().mean());
            const double tol = 5.0 * std::max(sd, 1.0) / std::sqrt(static_cast<double>(n));
            CHECK(std::abs(gram.values(i, j) - (i == j ? 1.0 : 0.0)) <= tol);
        }
    }
}

TEST_CASE("indicator basis is a partition of unity") {
    const BasisSpec spec{BasisKind::indicator_partition, 4, {-1.0, 0.0, 1.0}};
    for (double x : {-5.0, -1.0, -0.5, 0.0, 0.99, 1.0, 8.0}) {
        const auto e = eval_basis(spec, x);
        CHECK(e.sum() == 1.0);
        CHECK(e.maxCoeff() == 1.0);
    }
    CHECK(eval_basis(spec, -1.0)(1) == 1.0);
    CHECK_THROWS_AS((BasisSpec{BasisKind::indicator_partition, 3, {1.0, 0.0}}.validate()), ConfigError);
    CHECK_THROWS_AS((BasisSpec{BasisKind::indicator_partition, 3, {0.0}}.validate()), ConfigError);
    CHECK_THROWS_AS((BasisSpec{BasisKind::monomial, 0, {}}.validate()), ConfigError);
}

TEST_CASE("empirical Gram examples") {
    Eigen::MatrixXd f(1, 2);
    f << 1.0, 2.0;
    const auto g = empirical_gram(f);
    CHECK(g.values(0, 0) == 1.0);
    CHECK(g.values(0, 1) == 2.0);
    CHECK(g.values(1, 0) == 2.0);
    CHECK(g.values(1, 1) == 4.0);

    Eigen::MatrixXd dup(50, 3);
    CounterRng rng(1, 1);
    for (int r = 0; r < 50; ++r) {
        dup(r, 0) = rng.normal();
        dup(r, 1) = rng.normal();
        dup(r, 2) = dup(r, 0);
    }
    const auto gd = empirical_gram(dup);
    CHECK(std::abs(gd.min_eigenvalue()) <= 1e-10);
    CHECK(gd.singular());
    CHECK((gd.values - gd.values.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("coefficient solves") {
    GramMatrix id{Eigen::MatrixXd::Identity(3, 3), 10};
    Eigen::VectorXd m(3);
    m << 1.0, -2.0, 0.5;
    const auto direct = solve_coefficients(id, m);
    CHECK((direct.theta - m).norm() == 0.0);
    CHECK_FALSE(direct.pseudo_inverse);
    CHECK(direct.rank == 3);

    GramMatrix rank1{Eigen::MatrixXd::Zero(2, 2), 1};
    rank1.values(0, 0) = 2.0;
    Eigen::VectorXd m2(2);
    m2 << 4.0, 0.0;
    const auto pinv = solve_coefficients(rank1, m2);
    CHECK(pinv.pseudo_inverse);
    CHECK(pinv.rank == 1);
    CHECK(pinv.theta(0) == doctest::Approx(2.0));
    CHECK(pinv.theta(1) == doctest::Approx(0.0));

    for (std::uint64_t s = 0; s < 20; ++s) {
        CounterRng rng(8, s);
        Eigen::MatrixXd a(8, 8);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) a(i, j) = rng.normal();
        GramMatrix g{a * a.transpose() + Eigen::MatrixXd::Identity(8, 8), 8};
        Eigen::VectorXd rhs(8);
        for (int i = 0; i < 8; ++i) rhs(i) = rng.normal();
        const auto sol = solve_coefficients(g, rhs);
        CHECK((g.values * sol.theta - rhs).norm() <= 1e-10 * rhs.norm());
    }

    Eigen::VectorXd bad(3);
    bad << 1.0, NAN, 0.0;
    CHECK_THROWS_AS(solve_coefficients(id, bad), NumericalError);
}

TEST_CASE("projection properties on sample data") {
    const std::size_t n = 2000;
    CounterRng rng(10, 2);
    std::vector<double> xs(n);
    Eigen::VectorXd y(n), y2(n);
    for (std::size_t p = 0; p < n; ++p) {
        xs[p] = rng.normal();
        y(static_cast<Eigen::Index>(p)) = std::sin(2.0 * xs[p]) + 0.3 * rng.normal();
        y2(static_cast<Eigen::Index>(p)) = std::exp(0.5 * xs[p]) + 0.3 * rng.normal();
    }
    auto project = [&](std::size_t m, const Eigen::VectorXd& target) {
        const BasisSpec spec{BasisKind::normalized_hermite, m, {}};
        const auto f = design_matrix(spec, xs);
        const auto g = empirical_gram(f);
        const Eigen::VectorXd moment = f.transpose() * target / static_cast<double>(n);
        return Eigen::VectorXd(f * solve_coefficients(g, moment).theta);
    };
    double previous = INFINITY;
    for (std::size_t m = 1; m <= 6; ++m) {
        const Eigen::VectorXd fit = project(m, y);
        const double total = y.squaredNorm();
        const double parts = fit.squaredNorm() + (y - fit).squaredNorm();
        CHECK(std::abs(total - parts) <= 1e-9 * total);
        const double residual = (y - fit).squaredNorm();
        CHECK(residual <= previous + 1e-9);
        previous = residual;
        const Eigen::VectorXd fit2 = project(m, y2);
        CHECK((fit - fit2).norm() <= (y - y2).norm() + 1e-9);
    }
}

TEST_CASE("Gram determinant identity") {
    const std::size_t n = 10000;
    CounterRng rng(31, 0);
    std::vector<std::vector<double>> basis(3, std::vector<double>(n));
    std::vector<double> x(n), in_span(n), orth(n);
    for (std::size_t p = 0; p < n; ++p) {
        for (auto& b : basis) b[p] = rng.normal();
        x[p] = rng.normal();
        in_span[p] = 2.0 * basis[0][p] - basis[2][p];
    }
    const auto [lhs, rhs] = gram_determinant_residual(x, basis);
    CHECK(lhs / rhs == doctest::Approx(1.0).epsilon(1e-8));
    const auto [l0, r0] = gram_determinant_residual(in_span, basis);
    CHECK(std::abs(l0) <= 1e-9 * std::abs(rhs));
    CHECK(std::abs(r0) <= 1e-9 * std::abs(rhs));

    // Orthogonal case: single indicator-style basis on disjoint supports.
    std::vector<std::vector<double>> disjoint(1, std::vector<double>(4, 0.0));
    disjoint[0] = {1.0, 1.0, 0.0, 0.0};
    const std::vector<double> o{0.0, 0.0, 2.0, -1.0};
    const auto [lo, ro] = gram_determinant_residual(o, disjoint);
    const double norm2 = (4.0 + 1.0) / 4.0;
    const double g1 = 2.0 / 4.0;
    CHECK(lo == doctest::Approx(norm2 * g1));
    CHECK(ro == doctest::Approx(norm2 * g1));

    std::vector<std::vector<double>> degenerate{basis[0], basis[0]};
    CHECK_THROWS_AS(gram_determinant_residual(x, degenerate), DomainError);
}
