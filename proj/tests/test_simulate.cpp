#include "bmclab/criterion.hpp"
#include "bmclab/errors.hpp"
#include "bmclab/simulate.hpp"
#include "bmclab/spectral.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace bmclab;
using namespace testsupport;

namespace {

SiteLaw deterministic_law(std::vector<std::uint32_t> counts) {
    SiteLaw::Atom atom;
    atom.offspring.counts = std::move(counts);
    atom.prob = 1.0;
    return SiteLaw::from_atoms({atom}, atom.offspring.counts.size());
}

} // namespace

TEST_CASE("deterministic substitution rules") {
    SUBCASE("a single right shift") {
        auto env = homogeneous_line(deterministic_law({1, 0}), 5);
        RngStream rng(1, 1);
        auto out = step_front(ParticleFront::single(env.window().rank(Site{0})), env, rng);
        CHECK_FALSE(out.exhausted);
        REQUIRE(out.front.positions.size() == 1);
        CHECK(out.front.positions[0].first == env.window().rank(Site{1}));
        CHECK(out.front.positions[0].second == 1);
        CHECK(out.front.generation == 1);
    }
    SUBCASE("pure doubling on a self-loop") {
        auto spec = std::make_shared<EnvironmentSpec>(EnvironmentSpec::homogeneous(
            lazy_line_generator(), deterministic_law({2, 0, 0})));
        auto env = homogeneous_realization(spec, Box::centered(1, 2));
        RngStream rng(1, 1);
        ParticleFront front = ParticleFront::single(env.window().rank(Site{0}));
        for (int i = 0; i < 3; ++i) front = step_front(front, env, rng).front;
        CHECK(front.total() == 8);
        CHECK(front.positions.size() == 1);
    }
    SUBCASE("leaving the window raises the exhausted flag") {
        auto env = homogeneous_line(deterministic_law({1, 0}), 1);
        RngStream rng(1, 1);
        auto first = step_front(ParticleFront::single(env.window().rank(Site{0})), env, rng);
        CHECK_FALSE(first.exhausted);
        auto second = step_front(first.front, env, rng);
        CHECK(second.exhausted);
        CHECK(second.front.total() == 0);
    }
}

TEST_CASE("population mean follows the first-moment recursion") {
    const double m = 1.2;
    auto env = homogeneous_line(branching_symmetric_law(m), 40);
    const std::uint64_t replicas = 10000, horizon = 10;

    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t r = 0; r < replicas; ++r) {
        RngStream rng(9001, kReplicaStreamBase + r);
        ParticleFront front = ParticleFront::single(env.window().rank(Site{0}));
        for (std::uint64_t n = 0; n < horizon; ++n)
            front = step_front(front, env, rng).front;
        const double total = static_cast<double>(front.total());
        sum += total;
        sumsq += total * total;
    }
    const double mean = sum / replicas;
    const double sd = std::sqrt((sumsq / replicas - mean * mean) / replicas);
    CHECK(std::abs(mean - std::pow(m, 10)) <= 3.0 * sd);
}

TEST_CASE("site occupation matches the kernel power") {
    const double m = 1.2;
    auto env = homogeneous_line(branching_symmetric_law(m), 8);
    auto kernel = build_moment_kernel(env, env.window(), BoundaryMode::Truncated);
    const std::uint64_t horizon = 6, replicas = 20000;
    const auto origin = env.window().rank(Site{0});

    // expected occupation: row `origin` of M^horizon
    const auto n = static_cast<std::size_t>(kernel.state_count());
    std::vector<double> row(n, 0.0), next(n, 0.0);
    row[static_cast<std::size_t>(origin)] = 1.0;
    for (std::uint64_t k = 0; k < horizon; ++k) {
        kernel.apply_transpose(row, next);
        std::swap(row, next);
    }

    std::vector<double> sum(n, 0.0), sumsq(n, 0.0);
    for (std::uint64_t r = 0; r < replicas; ++r) {
        RngStream rng(4242, kReplicaStreamBase + r);
        ParticleFront front = ParticleFront::single(origin);
        for (std::uint64_t k = 0; k < horizon; ++k)
            front = step_front(front, env, rng).front;
        std::vector<double> occ(n, 0.0);
        for (const auto& [rank, count] : front.positions)
            occ[static_cast<std::size_t>(rank)] = static_cast<double>(count);
        for (std::size_t i = 0; i < n; ++i) {
            sum[i] += occ[i];
            sumsq[i] += occ[i] * occ[i];
        }
    }
    for (auto site : {Site{0}, Site{2}, Site{-2}, Site{4}}) {
        const auto i = static_cast<std::size_t>(env.window().rank(site));
        const double mean = sum[i] / replicas;
        const double sd = std::sqrt(
            std::max(0.0, sumsq[i] / replicas - mean * mean) / replicas);
        CHECK(std::abs(mean - row[i]) <= 3.0 * sd + 1e-12);
    }
}

TEST_CASE("frozen runs") {
    SUBCASE("self-loop law freezes its single particle") {
        auto spec = std::make_shared<EnvironmentSpec>(EnvironmentSpec::homogeneous(
            lazy_line_generator(), deterministic_law({1, 0, 0})));
        auto env = homogeneous_realization(spec, Box::centered(1, 2));
        RngStream rng(3, 1);
        auto run = run_frozen(env, Site{0}, 50, 1000, rng);
        CHECK(run.nu == 1);
        CHECK_FALSE(run.capped);
        CHECK_FALSE(run.exhausted);
    }
    SUBCASE("pure right drift never returns") {
        auto env = homogeneous_line(deterministic_law({1, 0}), 60);
        RngStream rng(3, 1);
        auto run = run_frozen(env, Site{0}, 50, 1000, rng);
        CHECK(run.nu == 0);
    }
    SUBCASE("frozen counts are monotone along the trajectory") {
        auto env = homogeneous_line(branching_symmetric_law(1.4), 50);
        for (std::uint64_t r = 0; r < 20; ++r) {
            RngStream rng(88, kReplicaStreamBase + r);
            auto run = run_frozen(env, Site{0}, 200, 5000, rng);
            for (std::size_t i = 1; i < run.frozen_trajectory.size(); ++i)
                CHECK(run.frozen_trajectory[i] >= run.frozen_trajectory[i - 1]);
        }
    }
    SUBCASE("identical seeds reproduce identical trajectories") {
        auto env = homogeneous_line(branching_symmetric_law(1.4), 100);
        RngStream a(777, kReplicaStreamBase), b(777, kReplicaStreamBase);
        auto ra = run_frozen(env, Site{0}, 60, 100000, a);
        auto rb = run_frozen(env, Site{0}, 60, 100000, b);
        CHECK(ra.frozen_trajectory == rb.frozen_trajectory);
        CHECK(ra.nu == rb.nu);
        RngStream c(777, kReplicaStreamBase + 1);
        auto rc = run_frozen(env, Site{0}, 60, 100000, c);
        CHECK(ra.frozen_trajectory != rc.frozen_trajectory);
    }
    SUBCASE("drift against a tiny box exhausts the window") {
        auto env = homogeneous_line(deterministic_law({1, 0}), 2);
        RngStream rng(5, 1);
        auto run = run_frozen(env, Site{0}, 50, 1000, rng);
        CHECK(run.exhausted);
    }
}

TEST_CASE("embedded Galton-Watson statistics") {
    SUBCASE("drift means zero with zero width") {
        auto env = homogeneous_line(deterministic_law({1, 0}), 120);
        auto est = estimate_gw_mean(env, Site{0}, 200, 100, 1000, 1, 2);
        CHECK(est.mean == 0.0);
        CHECK(est.half_width == 0.0);
        CHECK(est.capped_fraction == 0.0);
    }
    SUBCASE("subcritical environments give mean below one") {
        auto env = homogeneous_line(symmetric_law(0.8), 200);
        auto est = estimate_gw_mean(env, Site{0}, 10000, 400, 10000, 7, 2);
        CHECK(est.mean + est.half_width < 1.0);
    }
    SUBCASE("supercritical runs hit the cap") {
        auto env = homogeneous_line(branching_symmetric_law(1.5), 300);
        auto est = estimate_gw_mean(env, Site{0}, 100, 400, 1000, 11, 2);
        CHECK(est.capped_fraction > 0.0);
    }
    SUBCASE("replica counts must be positive") {
        auto env = homogeneous_line(symmetric_law(1.0), 10);
        CHECK_THROWS_AS(estimate_gw_mean(env, Site{0}, 0, 10, 10, 1), ConfigError);
    }
    SUBCASE("results do not depend on the worker count") {
        auto env = homogeneous_line(branching_symmetric_law(1.3), 120);
        auto one = estimate_gw_mean(env, Site{0}, 500, 150, 5000, 19, 1);
        auto three = estimate_gw_mean(env, Site{0}, 500, 150, 5000, 19, 3);
        CHECK(one.samples == three.samples);
        CHECK(one.mean == three.mean);
        auto p1 = recurrence_probe(env, Site{0}, 300, 150, 5000, 19, 1);
        auto p3 = recurrence_probe(env, Site{0}, 300, 150, 5000, 19, 3);
        CHECK(p1.return_counts == p3.return_counts);
    }
}

TEST_CASE("recurrence probes split the regimes") {
    SUBCASE("drift never returns") {
        auto env = homogeneous_line(deterministic_law({1, 0}), 120);
        auto probe = recurrence_probe(env, Site{0}, 300, 100, 10000, 3, 2);
        CHECK(probe.fraction_ge_1 == 0.0);
        CHECK(probe.fraction_ge_10 == 0.0);
        CHECK(probe.fraction_ge_100 == 0.0);
    }
    SUBCASE("strongly recurrent environments accumulate returns") {
        auto env = homogeneous_line(branching_symmetric_law(1.5), 150);
        auto probe = recurrence_probe(env, Site{0}, 300, 300, 20000, 13, 2);
        CHECK(probe.fraction_ge_100 > 0.9);
    }
    SUBCASE("subcritical environments rarely return often") {
        auto env = homogeneous_line(symmetric_law(0.8), 150);
        auto probe = recurrence_probe(env, Site{0}, 1000, 300, 20000, 17, 2);
        CHECK(probe.fraction_ge_100 <= 0.01);
        CHECK(probe.fraction_ge_1 < 0.5);
    }
}

TEST_CASE("criterion at or below one keeps the embedded process subcritical") {
    for (double m : {0.8, 1.0}) {
        auto report = criterion_value({{1}, {-1}}, {{m / 2, m / 2}});
        REQUIRE(report.c <= 1.0 + 1e-9);
        auto env = homogeneous_line(symmetric_law(m), 300);
        auto est = estimate_gw_mean(env, Site{0}, 4000, 500, 10000, 23, 2);
        CHECK(est.mean <= 1.0 + 3.0 * est.half_width);
    }
}

TEST_CASE("supermartingale diagnostic under an exponential weight") {
    // transient biased environment: f(x) = exp(theta* x) is superharmonic
    const double m = 1.0, p = 0.8;
    auto report = inf_theta(MeanVector{{{1}, {-1}}, {m * p, m * (1 - p)}});
    REQUIRE(report.value < 1.0);

    const std::int64_t radius = 60;
    auto env = homogeneous_line(biased_law(m, p), radius);
    std::vector<double> f(static_cast<std::size_t>(env.window().size()));
    for (std::int64_t r = 0; r < env.window().size(); ++r)
        f[static_cast<std::size_t>(r)] =
            std::exp(report.theta[0] * static_cast<double>(env.window().site(r)[0]));

    const std::uint64_t replicas = 3000, horizon = 5;
    double sum_q0 = 0.0, sum_qend = 0.0, sumsq_qend = 0.0;
    for (std::uint64_t r = 0; r < replicas; ++r) {
        RngStream rng(31337, kReplicaStreamBase + r);
        auto run = run_frozen(env, Site{0}, horizon, 100000, rng, f);
        REQUIRE(!run.q_trajectory.empty());
        sum_q0 += run.q_trajectory.front();
        sum_qend += run.q_trajectory.back();
        sumsq_qend += run.q_trajectory.back() * run.q_trajectory.back();
    }
    const double q0 = sum_q0 / replicas;
    const double qend = sum_qend / replicas;
    const double sd =
        std::sqrt(std::max(0.0, sumsq_qend / replicas - qend * qend) / replicas);
    CHECK(qend <= q0 + 3.0 * sd);
}
