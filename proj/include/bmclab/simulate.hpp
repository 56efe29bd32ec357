#pragma once

#include "bmclab/environment.hpp"
#include "bmclab/lattice.hpp"
#include "bmclab/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bmclab {

/// Particle positions at one generation, as (site rank, count) pairs sorted
/// by rank. Ranks refer to the environment window.
struct ParticleFront {
    std::uint64_t generation = 0;
    std::vector<std::pair<std::int64_t, std::uint64_t>> positions;

    std::uint64_t total() const;
    std::uint64_t count_at(std::int64_t rank) const;

    static ParticleFront single(std::int64_t rank);
};

struct StepOutcome {
    ParticleFront front;
    bool exhausted = false; // some offspring left the environment window
};

/// One substitution step: every particle at x independently draws an
/// offspring vector from the law at x and deposits offspring at x + s.
/// Sites are processed in rank order so that draws are reproducible.
StepOutcome step_front(const ParticleFront& front, const EnvironmentRealization& env,
                       RngStream& rng);

/// Trajectory of the frozen-origin process: particles arriving at the
/// origin from generation 1 on are parked there and never substituted
/// again (the starting particle itself branches normally).
struct FrozenRun {
    std::int64_t origin_rank = 0;
    std::vector<std::uint64_t> frozen_trajectory; // eta(n, o), n = 0..end
    std::uint64_t nu = 0;                         // terminal frozen count (capped)
    std::uint64_t returns = 0;                    // total arrivals at the origin
    bool capped = false;
    bool exhausted = false;
    std::vector<double> q_trajectory; // supermartingale diagnostic, when requested
};

/// Runs the frozen-origin process from one particle at `origin` for at most
/// `horizon` generations. Runs whose live population (active + frozen)
/// exceeds `cap` stop early with the capped flag; nu is clamped to cap.
/// When `weight_fn` (positive, one value per window rank) is supplied, the
/// trajectory of Q(n) = sum_i f(x_i(n)) is recorded.
FrozenRun run_frozen(const EnvironmentRealization& env, std::span<const std::int64_t> origin,
                     std::uint64_t horizon, std::uint64_t cap, RngStream& rng,
                     std::span<const double> weight_fn = {});

struct ProbeRun {
    std::uint64_t returns = 0;
    bool capped = false;
    bool exhausted = false;
};

/// Plain (non-freezing) trajectory counting every arrival at the origin.
ProbeRun run_probe(const EnvironmentRealization& env, std::span<const std::int64_t> origin,
                   std::uint64_t horizon, std::uint64_t cap, RngStream& rng);

/// Sample statistics of nu over independent replicas. Capped runs are
/// counted at the cap value and reported separately.
struct GwEstimate {
    std::vector<double> samples;
    double mean = 0.0;
    double half_width = 0.0; // 95% normal-approximation confidence half-width
    double capped_fraction = 0.0;
    double exhausted_fraction = 0.0;
};

GwEstimate estimate_gw_mean(const EnvironmentRealization& env,
                            std::span<const std::int64_t> origin, std::uint64_t replicas,
                            std::uint64_t horizon, std::uint64_t cap, std::uint64_t seed,
                            unsigned threads = 1);

/// Empirical proxy for the recurrence probability: fraction of runs whose
/// total return count reaches 1, 10 and 100.
struct ProbeReport {
    std::vector<std::uint64_t> return_counts;
    double fraction_ge_1 = 0.0;
    double fraction_ge_10 = 0.0;
    double fraction_ge_100 = 0.0;
    double capped_fraction = 0.0;
    double exhausted_fraction = 0.0;
};

ProbeReport recurrence_probe(const EnvironmentRealization& env,
                             std::span<const std::int64_t> origin, std::uint64_t replicas,
                             std::uint64_t horizon, std::uint64_t cap, std::uint64_t seed,
                             unsigned threads = 1);

} // namespace bmclab
