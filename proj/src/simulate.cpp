#include "bmclab/simulate.hpp"

#include "bmclab/detail/parallel.hpp"
#include "bmclab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace bmclab {

std::uint64_t ParticleFront::total() const {
    std::uint64_t t = 0;
    for (const auto& [rank, count] : positions) t += count;
    return t;
}

std::uint64_t ParticleFront::count_at(std::int64_t rank) const {
    for (const auto& [r, count] : positions)
        if (r == rank) return count;
    return 0;
}

ParticleFront ParticleFront::single(std::int64_t rank) {
    ParticleFront front;
    front.positions.emplace_back(rank, 1);
    return front;
}

namespace {

// Precomputed rank offsets per (site, step) are not worth it for the small
// dimensions we run; recomputing target coordinates keeps this simple.
struct Stepper {
    const EnvironmentRealization& env;
    const Box& window;
    const std::vector<Site>& steps;

    explicit Stepper(const EnvironmentRealization& e)
        : env(e), window(e.window()), steps(e.spec().generator.steps) {}

    // Substitutes all particles of `front`; deposits accumulate per rank.
    // Returns false when some offspring left the window.
    bool substitute(const ParticleFront& front, RngStream& rng,
                    std::map<std::int64_t, std::uint64_t>& deposits) const {
        Site target(static_cast<std::size_t>(window.dimension()));
        bool inside = true;
        for (const auto& [rank, count] : front.positions) {
            const Site x = window.site(rank);
            const SiteLaw& law = env.law_at_rank(rank);
            const auto& cdf = law.atom_cdf();
            for (std::uint64_t p = 0; p < count; ++p) {
                const auto& atom = law.atoms()[rng.pick(cdf)];
                for (std::size_t s = 0; s < steps.size(); ++s) {
                    const auto n_off = atom.offspring.counts[s];
                    if (n_off == 0) continue;
                    for (std::size_t i = 0; i < target.size(); ++i)
                        target[i] = x[i] + steps[s][i];
                    if (!window.contains(target)) {
                        inside = false;
                        continue;
                    }
                    deposits[window.rank(target)] += n_off;
                }
            }
        }
        return inside;
    }
};

double front_weight(const ParticleFront& front, std::span<const double> f) {
    double q = 0.0;
    for (const auto& [rank, count] : front.positions)
        q += static_cast<double>(count) * f[static_cast<std::size_t>(rank)];
    return q;
}

} // namespace

StepOutcome step_front(const ParticleFront& front, const EnvironmentRealization& env,
                       RngStream& rng) {
    Stepper stepper(env);
    std::map<std::int64_t, std::uint64_t> deposits;
    StepOutcome out;
    out.exhausted = !stepper.substitute(front, rng, deposits);
    out.front.generation = front.generation + 1;
    out.front.positions.assign(deposits.begin(), deposits.end());
    return out;
}

FrozenRun run_frozen(const EnvironmentRealization& env, std::span<const std::int64_t> origin,
                     std::uint64_t horizon, std::uint64_t cap, RngStream& rng,
                     std::span<const double> weight_fn) {
    if (!env.window().contains(origin))
        throw ConfigError("origin " + format_site(origin) + " outside the window");
    const bool track_q = !weight_fn.empty();
    if (track_q &&
        weight_fn.size() != static_cast<std::size_t>(env.window().size()))
        throw ConfigError("weight function does not cover the window");

    Stepper stepper(env);
    const std::int64_t origin_rank = env.window().rank(origin);

    FrozenRun run;
    run.origin_rank = origin_rank;
    ParticleFront active = ParticleFront::single(origin_rank);
    std::uint64_t frozen = 0;
    run.frozen_trajectory.push_back(frozen);
    if (track_q) run.q_trajectory.push_back(front_weight(active, weight_fn));

    for (std::uint64_t n = 1; n <= horizon; ++n) {
        if (active.total() == 0) break;
        std::map<std::int64_t, std::uint64_t> deposits;
        if (!stepper.substitute(active, rng, deposits)) run.exhausted = true;

        // arrivals at the origin freeze from generation 1 on
        if (auto it = deposits.find(origin_rank); it != deposits.end()) {
            frozen += it->second;
            run.returns += it->second;
            deposits.erase(it);
        }

        active.generation = n;
        active.positions.assign(deposits.begin(), deposits.end());
        run.frozen_trajectory.push_back(frozen);
        if (track_q)
            run.q_trajectory.push_back(
                front_weight(active, weight_fn) +
                static_cast<double>(frozen) *
                    weight_fn[static_cast<std::size_t>(origin_rank)]);

        if (run.exhausted) break;
        if (active.total() + frozen > cap) {
            run.capped = true;
            break;
        }
    }
    run.nu = std::min<std::uint64_t>(frozen, cap);
    return run;
}

ProbeRun run_probe(const EnvironmentRealization& env, std::span<const std::int64_t> origin,
                   std::uint64_t horizon, std::uint64_t cap, RngStream& rng) {
    if (!env.window().contains(origin))
        throw ConfigError("origin " + format_site(origin) + " outside the window");
    Stepper stepper(env);
    const std::int64_t origin_rank = env.window().rank(origin);

    ProbeRun run;
    ParticleFront front = ParticleFront::single(origin_rank);
    for (std::uint64_t n = 1; n <= horizon; ++n) {
        if (front.total() == 0) break;
        std::map<std::int64_t, std::uint64_t> deposits;
        if (!stepper.substitute(front, rng, deposits)) run.exhausted = true;
        front.generation = n;
        front.positions.assign(deposits.begin(), deposits.end());
        run.returns += front.count_at(origin_rank);
        if (run.exhausted) break;
        if (front.total() > cap) {
            run.capped = true;
            break;
        }
    }
    return run;
}

GwEstimate estimate_gw_mean(const EnvironmentRealization& env,
                            std::span<const std::int64_t> origin, std::uint64_t replicas,
                            std::uint64_t horizon, std::uint64_t cap, std::uint64_t seed,
                            unsigned threads) {
    if (replicas == 0) throw ConfigError("estimate_gw_mean needs replicas >= 1");
    GwEstimate est;
    est.samples.assign(replicas, 0.0);
    std::vector<std::uint8_t> capped(replicas, 0), exhausted(replicas, 0);

    detail::parallel_for(replicas, threads, [&](std::uint64_t r) {
        RngStream rng(seed, kReplicaStreamBase + r);
        auto run = run_frozen(env, origin, horizon, cap, rng);
        est.samples[r] =
            run.capped ? static_cast<double>(cap) : static_cast<double>(run.nu);
        capped[r] = run.capped ? 1 : 0;
        exhausted[r] = run.exhausted ? 1 : 0;
    });

    double sum = 0.0;
    for (double v : est.samples) sum += v;
    est.mean = sum / static_cast<double>(replicas);
    double ss = 0.0;
    for (double v : est.samples) ss += (v - est.mean) * (v - est.mean);
    if (replicas > 1) {
        const double sd = std::sqrt(ss / static_cast<double>(replicas - 1));
        est.half_width = 1.959963984540054 * sd / std::sqrt(static_cast<double>(replicas));
    }
    est.capped_fraction =
        static_cast<double>(std::count(capped.begin(), capped.end(), 1)) / replicas;
    est.exhausted_fraction =
        static_cast<double>(std::count(exhausted.begin(), exhausted.end(), 1)) / replicas;
    return est;
}

ProbeReport recurrence_probe(const EnvironmentRealization& env,
                             std::span<const std::int64_t> origin, std::uint64_t replicas,
                             std::uint64_t horizon, std::uint64_t cap, std::uint64_t seed,
                             unsigned threads) {
    if (replicas == 0) throw ConfigError("recurrence_probe needs replicas >= 1");
    ProbeReport report;
    report.return_counts.assign(replicas, 0);
    std::vector<std::uint8_t> capped(replicas, 0), exhausted(replicas, 0);

    detail::parallel_for(replicas, threads, [&](std::uint64_t r) {
        RngStream rng(seed, kProbeStreamBase + r);
        auto run = run_probe(env, origin, horizon, cap, rng);
        report.return_counts[r] = run.returns;
        capped[r] = run.capped ? 1 : 0;
        exhausted[r] = run.exhausted ? 1 : 0;
    });

    const double n = static_cast<double>(replicas);
    for (auto c : report.return_counts) {
        if (c >= 1) report.fraction_ge_1 += 1.0;
        if (c >= 10) report.fraction_ge_10 += 1.0;
        if (c >= 100) report.fraction_ge_100 += 1.0;
    }
    report.fraction_ge_1 /= n;
    report.fraction_ge_10 /= n;
    report.fraction_ge_100 /= n;
    report.capped_fraction =
        static_cast<double>(std::count(capped.begin(), capped.end(), 1)) / n;
    report.exhausted_fraction =
        static_cast<double>(std::count(exhausted.begin(), exhausted.end(), 1)) / n;
    return report;
}

} // namespace bmclab
