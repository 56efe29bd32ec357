#pragma once

#include "bmclab/lattice.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace bmclab {

/// One branching outcome: offspring counts per generator step. Index i
/// counts offspring displaced by steps[i]. An all-zero vector means the
/// particle dies without offspring; sub-survival laws are admitted so that
/// subcritical regimes can be simulated.
struct OffspringVector {
    std::vector<std::uint32_t> counts;

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }
};

/// Finite-support offspring distribution at one site, with its mean vector
/// (expected offspring per step) kept alongside the atoms.
class SiteLaw {
public:
    struct Atom {
        OffspringVector offspring;
        double prob = 0.0;
    };

    SiteLaw() = default;

    /// Builds a law from explicit atoms; computes the mean vector.
    /// Throws ConfigError on invalid probabilities or ragged counts.
    static SiteLaw from_atoms(std::vector<Atom> atoms, std::size_t step_count);

    /// Builds a law realizing an arbitrary nonnegative mean vector: one
    /// atom per step carrying K offspring with probability mean/K, where
    /// K = max(1, ceil(total mean)), plus a death atom absorbing the rest.
    static SiteLaw from_means(std::span<const double> means);

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<double>& mean() const { return mean_; }
    double mean(std::size_t step_index) const { return mean_[step_index]; }
    double total_mean() const;

    /// Cumulative atom probabilities for inverse-CDF sampling.
    const std::vector<double>& atom_cdf() const { return cdf_; }

    /// P(at least one offspring at the given step).
    double offspring_probability(std::size_t step_index) const;

    /// True when every atom has at least one offspring (the process can
    /// never die under this law).
    bool survives() const;

    /// Recomputes the mean from atoms and checks it against the stored
    /// value; throws ConfigError beyond `tol`.
    void validate(double tol = 1e-12) const;

private:
    std::vector<Atom> atoms_;
    std::vector<double> mean_;
    std::vector<double> cdf_;
};

} // namespace bmclab
