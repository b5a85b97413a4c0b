#include <doctest.h>

#include <cmath>

#include "support/brute_force.hpp"
#include "swing/contract.hpp"
#include "swing/error.hpp"
#include "swing/rng.hpp"

using namespace swing;

namespace {

SwingContract make(int n, double qmin, double qmax, double Qmin, double Qmax) {
    SwingContract c;
    c.n_dates = n;
    c.strike = 20.0;
    c.local_min = qmin;
    c.local_max = qmax;
    c.global_min = Qmin;
    c.global_max = Qmax;
    return c;
}

}  // namespace

TEST_CASE("ladder matches the closed form on the reference contract") {
    const auto c = make(4, 0, 1, 2, 3);
    const auto ladder = build_ladder(c, false);
    CHECK(ladder.down[2] == 0.0);
    CHECK(ladder.up[2] == 2.0);
    CHECK(ladder.down[0] == 0.0);
    CHECK(ladder.up[0] == 0.0);
    CHECK(ladder.down[4] == 2.0);
    CHECK(ladder.up[4] == 3.0);
}

TEST_CASE("zero global cap forces a zero ladder") {
    const auto ladder = build_ladder(make(3, 0, 2, 0, 0), true);
    for (int k = 0; k <= 3; ++k) {
        CHECK(ladder.down[static_cast<std::size_t>(k)] == 0.0);
        CHECK(ladder.up[static_cast<std::size_t>(k)] == 0.0);
    }
}

TEST_CASE("ladder equals brute-force enumeration of feasible plans") {
    const auto c = make(5, 1, 2, 5, 8);
    const auto ladder = build_ladder(c, true);
    const auto [lo, hi] = testing::enumerated_ladder(c, 1.0);
    for (std::size_t k = 0; k < lo.size(); ++k) {
        CAPTURE(k);
        CHECK(ladder.down[k] == doctest::Approx(lo[k]));
        CHECK(ladder.up[k] == doctest::Approx(hi[k]));
    }
    // Every integer of T_k is reached by some feasible plan.
    const auto plans = testing::feasible_plans(c, 1.0);
    for (int k = 0; k <= c.n_dates; ++k) {
        for (double level : ladder.integer_levels(k)) {
            bool hit = false;
            for (const auto& plan : plans) {
                double sum = 0.0;
                for (int i = 0; i < k; ++i) sum += plan[static_cast<std::size_t>(i)];
                hit = hit || sum == level;
            }
            CHECK(hit);
        }
    }
}

TEST_CASE("randomized ladders agree with enumeration") {
    for (std::uint64_t s = 0; s < 40; ++s) {
        CounterRng rng(17, s);
        const int n = 2 + static_cast<int>(rng.next_u64() % 4);
        const double qmin = static_cast<double>(rng.next_u64() % 2);
        const double qmax = qmin + static_cast<double>(rng.next_u64() % 3);
        const double Qmin = static_cast<double>(rng.next_u64() % static_cast<std::uint64_t>(n * qmax + 1));
        const double Qmax = std::max(Qmin, n * qmin) + static_cast<double>(rng.next_u64() % 3);
        const auto c = make(n, qmin, qmax, Qmin, Qmax);
        const auto ladder = build_ladder(c, true);
        const auto [lo, hi] = testing::enumerated_ladder(c, 1.0);
        for (std::size_t k = 0; k < lo.size(); ++k) {
            CAPTURE(s);
            CAPTURE(k);
            CHECK(ladder.down[k] == doctest::Approx(lo[k]));
            CHECK(ladder.up[k] == doctest::Approx(hi[k]));
        }
    }
}

TEST_CASE("ladder invariants hold") {
    for (std::uint64_t s = 0; s < 200; ++s) {
        CounterRng rng(3, s);
        const int n = 1 + static_cast<int>(rng.next_u64() % 12);
        const double qmin = rng.uniform();
        const double qmax = qmin + 2.0 * rng.uniform();
        const double Qmin = n * qmin + rng.uniform() * n * (qmax - qmin);
        const double Qmax = Qmin + rng.uniform() * 3.0;
        const auto ladder = build_ladder(make(n, qmin, qmax, Qmin, Qmax), false);
        CHECK(ladder.down.front() == 0.0);
        CHECK(ladder.up.front() == 0.0);
        for (std::size_t k = 0; k < ladder.down.size(); ++k) {
            CHECK(ladder.down[k] <= ladder.up[k] + 1e-12);
            if (k > 0) {
                CHECK(ladder.down[k] >= ladder.down[k - 1]);
                CHECK(ladder.up[k] >= ladder.up[k - 1]);
            }
        }
        CHECK(ladder.down.back() == doctest::Approx(Qmin));
        CHECK(ladder.up.back() == doctest::Approx(std::min(Qmax, n * qmax)));
    }
}

TEST_CASE("infeasible and malformed contracts are rejected") {
    CHECK_THROWS_AS(build_ladder(make(3, 0, 1, 4, 5), false), FeasibilityError);
    CHECK_THROWS_AS(build_ladder(make(3, 2, 3, 0, 5), false), FeasibilityError);
    CHECK_THROWS_AS(make(3, 2, 1, 0, 5).validate(), ConfigError);
    CHECK_THROWS_AS(make(0, 0, 1, 0, 1).validate(), ConfigError);
    CHECK_THROWS_AS(make(3, 0, 1, 2, 1).validate(), ConfigError);
    CHECK_THROWS_AS(build_ladder(make(3, 0, 1.5, 0, 3), true), ConfigError);
    try {
        make(3, 2, 1, 0, 5).validate();
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("q_min") != std::string::npos);
        CHECK(msg.find("q_max") != std::string::npos);
    }
    try {
        build_ladder(make(3, 0, 1, 4, 5), false);
    } catch (const FeasibilityError& e) {
        CHECK(std::string(e.what()).find("Q_min") != std::string::npos);
    }
}

TEST_CASE("admissible interval examples") {
    const auto c = make(4, 0, 1, 2, 3);
    const auto ladder = build_ladder(c, true);
    CHECK(admissible_interval(c, ladder, 0, 0.0) == AdmissibleInterval{0.0, 1.0});
    const auto forced = admissible_interval(c, ladder, 3, 1.0);
    CHECK(forced == AdmissibleInterval{1.0, 1.0});
    CHECK(forced.degenerate());
    CHECK_THROWS_AS(admissible_interval(c, ladder, 3, 0.0), DomainError);
    CHECK_THROWS_AS(admissible_interval(c, ladder, 4, 2.0), DomainError);
    CHECK_THROWS_AS(admissible_interval(c, ladder, 1, 1.5 + 1.0), DomainError);
}

TEST_CASE("admissible interval agrees with brute-force completion search") {
    // Quarter-unit contracts: every bound, Q and q lives on the 0.25 lattice,
    // so enumeration over that lattice decides feasibility exactly.
    const double step = 0.25;
    for (std::uint64_t s = 0; s < 30; ++s) {
        CounterRng rng(29, s);
        const int n = 2 + static_cast<int>(rng.next_u64() % 3);
        const double qmin = step * static_cast<double>(rng.next_u64() % 3);
        const double qmax = qmin + step * static_cast<double>(1 + rng.next_u64() % 4);
        const double Qmin = step * std::floor(rng.uniform() * n * qmax / step);
        const double Qmax = std::max(Qmin, n * qmin) + step * static_cast<double>(rng.next_u64() % 5);
        const auto c = make(n, qmin, qmax, Qmin, Qmax);
        const auto ladder = build_ladder(c, false);
        const auto plans = testing::feasible_plans(c, step);
        for (int k = 0; k < n; ++k) {
            // (Q, q) pairs realized by some feasible plan.
            std::vector<std::pair<double, double>> realized;
            for (const auto& plan : plans) {
                double sum = 0.0;
                for (int i = 0; i < k; ++i) sum += plan[static_cast<std::size_t>(i)];
                realized.emplace_back(sum, plan[static_cast<std::size_t>(k)]);
            }
            for (double Q = ladder.down[static_cast<std::size_t>(k)]; Q <= ladder.up[static_cast<std::size_t>(k)] + 1e-12;
                 Q += step) {
                const auto iv = admissible_interval(c, ladder, k, Q);
                for (double q = qmin; q <= qmax + 1e-12; q += step) {
                    bool feasible = false;
                    for (const auto& [rq, rv] : realized) {
                        feasible = feasible || (std::abs(rq - Q) < 1e-9 && std::abs(rv - q) < 1e-9);
                    }
                    const bool inside = q >= iv.lo - 1e-12 && q <= iv.hi + 1e-12;
                    CAPTURE(s);
                    CAPTURE(k);
                    CAPTURE(Q);
                    CAPTURE(q);
                    CHECK(feasible == inside);
                }
            }
        }
    }
}

TEST_CASE("ladder nesting and monotone shrink") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        CounterRng rng(41, s);
        const int n = 2 + static_cast<int>(rng.next_u64() % 8);
        const double qmin = rng.uniform();
        const double qmax = qmin + rng.uniform() * 2.0;
        const double Qmin = n * qmin + rng.uniform() * n * (qmax - qmin);
        const double Qmax = Qmin + rng.uniform() * 2.0;
        const auto c = make(n, qmin, qmax, Qmin, Qmax);
        const auto ladder = build_ladder(c, false);
        for (int k = 0; k < n; ++k) {
            const double lo = ladder.down[static_cast<std::size_t>(k)];
            const double hi = ladder.up[static_cast<std::size_t>(k)];
            AdmissibleInterval previous{INFINITY, INFINITY};
            for (int i = 0; i <= 20; ++i) {
                const double Q = lo + (hi - lo) * i / 20.0;
                const auto iv = admissible_interval(c, ladder, k, Q);
                CHECK(iv.lo <= iv.hi);
                CHECK(iv.lo >= qmin - 1e-12);
                CHECK(iv.hi <= qmax + 1e-12);
                CHECK(iv.lo <= previous.lo + 1e-12);
                CHECK(iv.hi <= previous.hi + 1e-12);
                previous = iv;
                for (double q : {iv.lo, 0.5 * (iv.lo + iv.hi), iv.hi}) CHECK(ladder.attainable(k + 1, Q + q));
            }
        }
    }
}

TEST_CASE("bang-bang candidates") {
    CHECK(bang_bang_candidates({0.0, 1.0}) == std::vector<double>{0.0, 1.0});
    CHECK(bang_bang_candidates({1.0, 1.0}) == std::vector<double>{1.0});
    CHECK(make(6, 0, 1, 2, 4).bang_bang_setting());
    CHECK_FALSE(make(6, 0, 2, 1, 4).bang_bang_setting());
    CHECK_FALSE(make(6, 0, 1.5, 0, 3).bang_bang_setting());
}

TEST_CASE("hausdorff distance matches the point-grid version") {
    CHECK(hausdorff_distance({0.0, 1.0}, {0.0, 1.0}) == 0.0);
    CHECK(hausdorff_distance({0.0, 1.0}, {0.5, 1.0}) == 0.5);
    for (std::uint64_t s = 0; s < 25; ++s) {
        CounterRng rng(5, s);
        double a = rng.uniform(), b = rng.uniform(), c = rng.uniform(), d = rng.uniform();
        if (a > b) std::swap(a, b);
        if (c > d) std::swap(c, d);
        const AdmissibleInterval x{a, b};
        const AdmissibleInterval y{c, d};
        // The grid spacing bounds the error of the sampled sup-inf.
        const double spacing = std::max(b - a, d - c) / 2000.0;
        CHECK(std::abs(hausdorff_distance(x, y) - testing::grid_hausdorff(x, y)) <= spacing + 1e-9);
    }
}
