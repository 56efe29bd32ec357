#pragma once

#include "bmclab/law.hpp"
#include "bmclab/lattice.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace bmclab {

/// The random-environment description: a finite palette of site laws with
/// sampling weights, over a common generator set. `epsilon` is the uniform
/// ellipticity bound of the irreducibility condition: every palette law
/// must produce at least one offspring along each generating step with
/// probability exceeding epsilon.
struct EnvironmentSpec {
    GeneratorSet generator;
    std::vector<SiteLaw> palette;
    std::vector<double> weights;
    double epsilon = 0.0;

    void validate() const;

    /// Single-law environment (the homogeneous case).
    static EnvironmentSpec homogeneous(GeneratorSet generator, SiteLaw law,
                                       double epsilon = 1e-9);
};

/// One drawn assignment of palette laws to the sites of a window.
/// Immutable after construction; regenerating with the same seed is
/// guaranteed to reproduce the identical assignment.
class EnvironmentRealization {
public:
    EnvironmentRealization(std::shared_ptr<const EnvironmentSpec> spec,
                           Box window, std::vector<std::uint32_t> assignment,
                           std::uint64_t seed);

    const EnvironmentSpec& spec() const { return *spec_; }
    std::shared_ptr<const EnvironmentSpec> spec_ptr() const { return spec_; }
    const Box& window() const { return window_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<std::uint32_t>& assignment() const { return assignment_; }

    std::uint32_t law_index_at(std::span<const std::int64_t> site) const;
    const SiteLaw& law_at(std::span<const std::int64_t> site) const;
    const SiteLaw& law_at_rank(std::int64_t rank) const;

    bool covers(const Box& box) const { return window_.contains_box(box); }

private:
    std::shared_ptr<const EnvironmentSpec> spec_;
    Box window_;
    std::vector<std::uint32_t> assignment_;
    std::uint64_t seed_ = 0;
};

/// Draws i.i.d. palette indices per site. The draw for a site is keyed by
/// its lexicographic rank, so the realization does not depend on traversal
/// order. Deterministic given (spec, window, seed).
EnvironmentRealization sample_environment(std::shared_ptr<const EnvironmentSpec> spec,
                                          const Box& window, std::uint64_t seed);

/// Constant assignment of a single law over the window.
EnvironmentRealization homogeneous_realization(std::shared_ptr<const EnvironmentSpec> spec,
                                               const Box& window);

} // namespace bmclab
