#include "bmclab/criterion.hpp"
#include "bmclab/errors.hpp"
#include "bmclab/graph.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace bmclab;
using namespace testsupport;

namespace {

MeanVector line_mean(double plus, double minus) {
    return MeanVector{{{1}, {-1}}, {plus, minus}};
}

} // namespace

TEST_CASE("phi evaluates the exponential moment") {
    auto m = line_mean(0.3, 0.5);
    const std::vector<double> zero = {0.0};
    CHECK(phi(m, zero) == doctest::Approx(0.8).epsilon(1e-14));

    const std::vector<double> theta = {0.7};
    CHECK(phi(m, theta) ==
          doctest::Approx(0.3 * std::exp(0.7) + 0.5 * std::exp(-0.7)).epsilon(1e-14));

    MeanVector single{{{1}}, {2.0}};
    const std::vector<double> ln3 = {std::log(3.0)};
    CHECK(phi(single, ln3) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("inf_theta closed forms") {
    SUBCASE("symmetric laws minimize at zero") {
        auto res = inf_theta(line_mean(0.6, 0.6));
        CHECK(std::abs(res.theta[0]) <= 1e-7);
        CHECK(res.value == doctest::Approx(1.2).epsilon(1e-12));
    }
    SUBCASE("biased laws match 2 m sqrt(p q) at half log-odds") {
        const double m = 1.3, p = 0.7;
        auto res = inf_theta(line_mean(m * p, m * (1 - p)));
        CHECK(res.value == doctest::Approx(oracle_biased_criterion(m, p)).epsilon(1e-12));
        CHECK(res.theta[0] == doctest::Approx(0.5 * std::log((1 - p) / p)).epsilon(1e-8));
    }
    SUBCASE("d=2 uniform steps minimize at the origin") {
        MeanVector m{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}},
                     {0.3, 0.3, 0.3, 0.3}};
        auto res = inf_theta(m);
        CHECK(res.value == doctest::Approx(1.2).epsilon(1e-12));
        CHECK(std::abs(res.theta[0]) <= 1e-7);
        CHECK(std::abs(res.theta[1]) <= 1e-7);
    }
    SUBCASE("one-sided supports report a witness direction") {
        try {
            inf_theta(MeanVector{{{1}}, {1.1}});
            FAIL("expected DegeneracyError");
        } catch (const DegeneracyError& e) {
            REQUIRE(e.witness_direction.size() == 1);
            CHECK(e.witness_direction[0] == doctest::Approx(1.0));
        }
        MeanVector skew{{{1, 0}, {1, 1}, {0, 2}}, {0.4, 0.3, 0.3}};
        CHECK_THROWS_AS(inf_theta(skew), DegeneracyError);
    }
    SUBCASE("a pure self-loop is constant in theta") {
        MeanVector lazy{{{0}, {1}, {-1}}, {0.7, 0.0, 0.0}};
        auto res = inf_theta(lazy);
        CHECK(res.value == doctest::Approx(0.7).epsilon(1e-13));
    }
}

TEST_CASE("criterion_value on single laws") {
    SUBCASE("critical symmetric law sits on the boundary, transient side") {
        auto report = criterion_value({{1}, {-1}}, {{0.5, 0.5}});
        CHECK(report.c == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(report.verdict == Verdict::Transient);
        CHECK(report.boundary_flag);
    }
    SUBCASE("supercritical symmetric law is strongly recurrent") {
        auto report = criterion_value({{1}, {-1}}, {{0.6, 0.6}});
        CHECK(report.c == doctest::Approx(1.2).epsilon(1e-12));
        CHECK(report.verdict == Verdict::StronglyRecurrent);
        CHECK_FALSE(report.boundary_flag);
        CHECK(report.active_laws == std::vector<std::size_t>{0});
    }
}

TEST_CASE("opposing drift laws mix into a recurrent hull") {
    auto report = criterion_value({{1}, {-1}}, {{1.1, 0.0}, {0.0, 1.1}});
    CHECK(report.c == doctest::Approx(1.1).epsilon(1e-10));
    CHECK(report.verdict == Verdict::StronglyRecurrent);
    CHECK(report.active_laws.size() == 2);
    CHECK(std::abs(report.theta_star[0]) <= 1e-6);

    const double grid = oracle_sup_inf_two_law(1.1, 0.0, 0.0, 1.1);
    CHECK(std::abs(report.c - grid) <= 1e-3);
}

TEST_CASE("minimax swap agrees with the brute-force grid") {
    TestRand rand(606);
    for (int trial = 0; trial < 5; ++trial) {
        const double m1 = rand.uniform(0.5, 1.8), p1 = rand.uniform(0.15, 0.85);
        const double m2 = rand.uniform(0.5, 1.8), p2 = rand.uniform(0.15, 0.85);
        auto report = criterion_value(
            {{1}, {-1}},
            {{m1 * p1, m1 * (1 - p1)}, {m2 * p2, m2 * (1 - p2)}});
        const double grid = oracle_sup_inf_two_law(m1 * p1, m1 * (1 - p1), m2 * p2,
                                                   m2 * (1 - p2));
        CHECK(std::abs(report.c - grid) <= 1e-3);
    }
}

TEST_CASE("criterion properties") {
    SUBCASE("hull augmentation leaves the value unchanged") {
        const std::vector<std::vector<double>> base = {{0.9, 0.25}, {0.2, 1.4}};
        auto report = criterion_value({{1}, {-1}}, base);
        TestRand rand(707);
        auto augmented = base;
        for (int k = 0; k < 5; ++k) {
            const double lam = rand.uniform(0.0, 1.0);
            augmented.push_back({lam * base[0][0] + (1 - lam) * base[1][0],
                                 lam * base[0][1] + (1 - lam) * base[1][1]});
        }
        auto report2 = criterion_value({{1}, {-1}}, augmented);
        CHECK(std::abs(report2.c - report.c) < 1e-10);
    }
    SUBCASE("scaling the palette scales c linearly") {
        const std::vector<std::vector<double>> base = {{0.7, 0.4}, {0.3, 0.9}};
        auto r1 = criterion_value({{1}, {-1}}, base);
        const double gamma = 3.7;
        std::vector<std::vector<double>> scaled = base;
        for (auto& m : scaled)
            for (auto& v : m) v *= gamma;
        auto r2 = criterion_value({{1}, {-1}}, scaled);
        CHECK(std::abs(r2.c - gamma * r1.c) <= 1e-12 * gamma * r1.c * 10);
    }
    SUBCASE("theta = 0 bounds c by the largest total mean") {
        auto report = criterion_value({{1}, {-1}}, {{0.8, 0.5}, {0.1, 1.0}});
        CHECK(report.c <= 1.3 + 1e-12);
    }
    SUBCASE("sign-symmetric palettes attain c at theta 0") {
        auto report = criterion_value({{1}, {-1}}, {{0.55, 0.55}, {0.3, 0.3}});
        CHECK(report.c == doctest::Approx(1.1).epsilon(1e-10));
        CHECK(std::abs(report.theta_star[0]) <= 1e-6);
    }
    SUBCASE("one-sided palette unions are rejected with exit-worthy errors") {
        CHECK_THROWS_AS(criterion_value({{1}, {-1}}, {{1.1, 0.0}}), DegeneracyError);
        CHECK_THROWS_AS(criterion_value({{1}, {-1}}, {{0.4, 0.0}, {0.7, 0.0}}),
                        DegeneracyError);
    }
}

TEST_CASE("criterion_value accepts environment specs") {
    EnvironmentSpec spec;
    spec.generator = line_generator();
    spec.palette = {biased_law(1.2, 0.5)};
    spec.weights = {1.0};
    spec.epsilon = 0.01;
    auto report = criterion_value(spec);
    CHECK(report.c == doctest::Approx(1.2).epsilon(1e-10));

    // a drift-only law can form a valid environment when the generating
    // subset is one-sided, but the criterion degenerates
    EnvironmentSpec drift;
    drift.generator.dimension = 1;
    drift.generator.steps = {{1}};
    drift.generator.gen_subset = {0};
    drift.palette = {SiteLaw::from_means(std::vector<double>{1.0})};
    drift.weights = {1.0};
    drift.epsilon = 0.01;
    CHECK_NOTHROW(drift.validate());
    CHECK_THROWS_AS(criterion_value(drift), DegeneracyError);
}

TEST_CASE("cross-check ties the criterion to windowed spectra") {
    EnvironmentSpec spec;
    spec.generator = line_generator();
    spec.palette = {branching_symmetric_law(1.2)};
    spec.weights = {1.0};
    spec.epsilon = 0.01;
    std::vector<std::int64_t> schedule = {10, 50, 200};
    auto report = classify_cross_check(spec, schedule, 1e-8, 0);
    CHECK(report.criterion.c == doctest::Approx(1.2).epsilon(1e-10));
    CHECK(report.monotone);
    CHECK(report.bounded_by_c);
    CHECK(report.rows.back().gap <= 2e-2);

    EnvironmentSpec two;
    two.generator = line_generator();
    two.palette = {biased_law(1.3, 0.75), biased_law(1.3, 0.25)};
    two.weights = {0.5, 0.5};
    two.epsilon = 0.01;
    std::vector<std::int64_t> short_schedule = {10, 40};
    auto mixed = classify_cross_check(two, short_schedule, 1e-8, 42);
    CHECK(mixed.bounded_by_c);
    CHECK(mixed.monotone);
}

TEST_CASE("continuous-time BRW critical rates") {
    std::istringstream cycle6("0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n");
    auto c6 = ct_brw_critical_lambda(load_edge_list(cycle6));
    CHECK(c6.rho == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(c6.critical_lambda == doctest::Approx(0.5).epsilon(1e-12));

    std::istringstream k4("0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    auto r4 = ct_brw_critical_lambda(load_edge_list(k4));
    CHECK(r4.rho == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r4.critical_lambda == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    std::istringstream k2("0 1\n");
    CHECK(ct_brw_critical_lambda(load_edge_list(k2)).critical_lambda ==
          doctest::Approx(1.0).epsilon(1e-12));

    std::istringstream disconnected("0 1\n2 3\n");
    CHECK_THROWS_AS(ct_brw_critical_lambda(load_edge_list(disconnected)),
                    DegeneracyError);

    std::istringstream empty("");
    CHECK_THROWS_AS(load_edge_list(empty), ConfigError);
}

TEST_CASE("independent branching critical mean") {
    SUBCASE("simple random walk: critical mean 1") {
        std::vector<std::int64_t> schedule = {50, 200};
        auto res = independent_branching_critical_m(
            line_generator(), SiteLaw::from_means(std::vector<double>{0.5, 0.5}),
            schedule, 1e-9);
        CHECK(std::abs(res.critical_m - 1.0) <= 2e-2);
        CHECK(std::abs(res.rho - oracle_tridiagonal_rho(0.5, 0.5, 401)) <= 1e-6);
    }
    SUBCASE("biased walk: 1 / (2 sqrt(pq))") {
        std::vector<std::int64_t> schedule = {50, 200};
        auto res = independent_branching_critical_m(
            line_generator(), SiteLaw::from_means(std::vector<double>{0.8, 0.2}),
            schedule, 1e-9);
        CHECK(std::abs(res.critical_m - 1.25) <= 2e-2);
        CHECK(res.estimates.front().value <= res.estimates.back().value + 1e-9);
    }
    SUBCASE("lazy walk on a single site has critical mean 1") {
        std::vector<std::int64_t> schedule = {0};
        auto res = independent_branching_critical_m(
            lazy_line_generator(),
            SiteLaw::from_means(std::vector<double>{1.0, 0.0, 0.0}), schedule);
        CHECK(res.rho == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(res.critical_m == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("non-stochastic walks are rejected") {
        std::vector<std::int64_t> schedule = {10};
        CHECK_THROWS_AS(independent_branching_critical_m(
                            line_generator(),
                            SiteLaw::from_means(std::vector<double>{0.8, 0.3}),
                            schedule),
                        ConfigError);
    }
}
