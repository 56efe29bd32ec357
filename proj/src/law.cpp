#include "bmclab/law.hpp"

#include "bmclab/errors.hpp"
#include "bmclab/rng.hpp"

#include <cmath>
#include <numeric>

namespace bmclab {

SiteLaw SiteLaw::from_atoms(std::vector<Atom> atoms, std::size_t step_count) {
    if (atoms.empty()) throw ConfigError("site law needs at least one atom");
    double total_prob = 0.0;
    for (const auto& a : atoms) {
        if (a.offspring.counts.size() != step_count)
            throw ConfigError("offspring vector length does not match step count");
        if (!(a.prob > 0.0))
            throw ConfigError("atom probabilities must be strictly positive");
        total_prob += a.prob;
    }
    if (std::abs(total_prob - 1.0) > 1e-12)
        throw ConfigError("atom probabilities must sum to 1");

    SiteLaw law;
    law.atoms_ = std::move(atoms);
    law.mean_.assign(step_count, 0.0);
    for (const auto& a : law.atoms_)
        for (std::size_t s = 0; s < step_count; ++s)
            law.mean_[s] += a.prob * a.offspring.counts[s];
    std::vector<double> probs;
    probs.reserve(law.atoms_.size());
    for (const auto& a : law.atoms_) probs.push_back(a.prob);
    law.cdf_ = cumulative(probs);
    return law;
}

SiteLaw SiteLaw::from_means(std::span<const double> means) {
    double total = 0.0;
    for (double m : means) {
        if (m < 0.0) throw ConfigError("mean offspring counts must be nonnegative");
        total += m;
    }
    if (total <= 0.0) throw ConfigError("mean vector must have positive total mass");
    const auto k = static_cast<std::uint32_t>(std::max(1.0, std::ceil(total)));

    std::vector<Atom> atoms;
    double mass = 0.0;
    for (std::size_t s = 0; s < means.size(); ++s) {
        if (means[s] == 0.0) continue;
        Atom a;
        a.offspring.counts.assign(means.size(), 0);
        a.offspring.counts[s] = k;
        a.prob = means[s] / k;
        mass += a.prob;
        atoms.push_back(std::move(a));
    }
    if (mass < 1.0 - 1e-12) {
        Atom death;
        death.offspring.counts.assign(means.size(), 0);
        death.prob = 1.0 - mass;
        atoms.push_back(std::move(death));
    } else if (!atoms.empty()) {
        // absorb rounding residue into the last atom
        atoms.back().prob += 1.0 - mass;
    }
    return from_atoms(std::move(atoms), means.size());
}

double SiteLaw::total_mean() const {
    return std::accumulate(mean_.begin(), mean_.end(), 0.0);
}

double SiteLaw::offspring_probability(std::size_t step_index) const {
    double p = 0.0;
    for (const auto& a : atoms_)
        if (a.offspring.counts[step_index] >= 1) p += a.prob;
    return p;
}

bool SiteLaw::survives() const {
    for (const auto& a : atoms_)
        if (a.offspring.total() == 0) return false;
    return true;
}

void SiteLaw::validate(double tol) const {
    if (atoms_.empty()) throw ConfigError("site law has no atoms");
    double total_prob = 0.0;
    std::vector<double> recomputed(mean_.size(), 0.0);
    for (const auto& a : atoms_) {
        if (!(a.prob > 0.0))
            throw ConfigError("atom probabilities must be strictly positive");
        total_prob += a.prob;
        for (std::size_t s = 0; s < mean_.size(); ++s)
            recomputed[s] += a.prob * a.offspring.counts[s];
    }
    if (std::abs(total_prob - 1.0) > tol)
        throw ConfigError("atom probabilities must sum to 1");
    for (std::size_t s = 0; s < mean_.size(); ++s)
        if (std::abs(recomputed[s] - mean_[s]) > tol)
            throw ConfigError("stored mean disagrees with atoms");
}

} // namespace bmclab
