#include "bmclab/environment.hpp"

#include "bmclab/errors.hpp"
#include "bmclab/rng.hpp"

#include <cmath>
#include <string>

namespace bmclab {

void EnvironmentSpec::validate() const {
    generator.validate();
    if (palette.empty()) throw ConfigError("palette is empty");
    if (weights.size() != palette.size())
        throw ConfigError("weights and palette sizes differ");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw ConfigError("weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("weights must sum to 1");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");

    const std::size_t nsteps = generator.step_count();
    for (std::size_t i = 0; i < palette.size(); ++i) {
        if (palette[i].mean().size() != nsteps)
            throw ConfigError("palette law " + std::to_string(i) +
                              " does not match the generator step count");
        palette[i].validate();
        for (auto s : generator.gen_subset) {
            if (!(palette[i].offspring_probability(s) > epsilon))
                throw ConfigError(
                    "palette law " + std::to_string(i) +
                    " violates the irreducibility condition at step " +
                    format_site(generator.steps[s]));
        }
    }
}

EnvironmentSpec EnvironmentSpec::homogeneous(GeneratorSet generator, SiteLaw law,
                                             double epsilon) {
    EnvironmentSpec spec;
    spec.generator = std::move(generator);
    spec.palette.push_back(std::move(law));
    spec.weights = {1.0};
    spec.epsilon = epsilon;
    return spec;
}

EnvironmentRealization::EnvironmentRealization(
    std::shared_ptr<const EnvironmentSpec> spec, Box window,
    std::vector<std::uint32_t> assignment, std::uint64_t seed)
    : spec_(std::move(spec)), window_(std::move(window)),
      assignment_(std::move(assignment)), seed_(seed) {
    if (!spec_) throw ConfigError("realization needs an environment spec");
    if (static_cast<std::int64_t>(assignment_.size()) != window_.size())
        throw ConfigError("assignment does not cover the window");
    for (auto idx : assignment_)
        if (idx >= spec_->palette.size())
            throw ConfigError("assignment references a law outside the palette");
}

std::uint32_t EnvironmentRealization::law_index_at(std::span<const std::int64_t> site) const {
    if (!window_.contains(site))
        throw ConfigError("site " + format_site(site) + " not covered by the realization");
    return assignment_[static_cast<std::size_t>(window_.rank(site))];
}

const SiteLaw& EnvironmentRealization::law_at(std::span<const std::int64_t> site) const {
    return spec_->palette[law_index_at(site)];
}

const SiteLaw& EnvironmentRealization::law_at_rank(std::int64_t rank) const {
    return spec_->palette[assignment_[static_cast<std::size_t>(rank)]];
}

EnvironmentRealization sample_environment(std::shared_ptr<const EnvironmentSpec> spec,
                                          const Box& window, std::uint64_t seed) {
    if (!spec) throw ConfigError("sample_environment needs a spec");
    spec->validate();
    const auto n = static_cast<std::size_t>(window.size());
    std::vector<std::uint32_t> assignment(n);
    auto cdf = cumulative(spec->weights);
    for (std::size_t r = 0; r < n; ++r) {
        double u = u64_to_unit_double(philox2x64(r, kEnvironmentStream, seed)[0]);
        std::size_t lo = 0, hi = cdf.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (u < cdf[mid]) hi = mid; else lo = mid + 1;
        }
        assignment[r] = static_cast<std::uint32_t>(lo);
    }
    return EnvironmentRealization(std::move(spec), window, std::move(assignment), seed);
}

EnvironmentRealization homogeneous_realization(std::shared_ptr<const EnvironmentSpec> spec,
                                               const Box& window) {
    if (!spec) throw ConfigError("homogeneous_realization needs a spec");
    if (spec->palette.size() != 1)
        throw ConfigError("homogeneous realization requires a single-law palette");
    std::vector<std::uint32_t> assignment(static_cast<std::size_t>(window.size()), 0);
    return EnvironmentRealization(std::move(spec), window, std::move(assignment), 0);
}

} // namespace bmclab
