#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bmclab {

/// A lattice point or step offset in Z^d.
using Site = std::vector<std::int64_t>;

/// Axis-aligned box [lo_i, hi_i]^d with inclusive bounds. Sites are indexed
/// by lexicographic rank (first coordinate most significant), so every state
/// indexing derived from a box is bit-stable across runs.
class Box {
public:
    Box() = default;
    Box(Site lo, Site hi);

    /// The centered box [-L, L]^d.
    static Box centered(int dimension, std::int64_t radius);

    int dimension() const { return static_cast<int>(lo_.size()); }
    std::int64_t size() const { return size_; }
    const Site& lo() const { return lo_; }
    const Site& hi() const { return hi_; }

    bool contains(std::span<const std::int64_t> x) const;
    bool contains_box(const Box& inner) const;

    /// Lexicographic rank of a site; precondition: contains(x).
    std::int64_t rank(std::span<const std::int64_t> x) const;

    /// Inverse of rank().
    Site site(std::int64_t rank) const;

private:
    Site lo_, hi_;
    std::vector<std::int64_t> stride_;
    std::int64_t size_ = 0;
};

/// The finite step set of the model together with a declared generating
/// subset of Z^d used by the irreducibility condition.
struct GeneratorSet {
    int dimension = 0;
    std::vector<Site> steps;
    std::vector<std::size_t> gen_subset; // indices into steps

    /// Validates: distinct non-empty steps, gen_subset in range, and the
    /// generating subset spans Z^d as a group. Throws ConfigError.
    void validate() const;

    std::size_t step_count() const { return steps.size(); }
    /// Index of a step vector, or npos when absent.
    std::size_t find_step(std::span<const std::int64_t> s) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// True iff the integer span of the given vectors is all of Z^d
/// (Smith-normal-form reduction; inputs are expected to be small).
bool spans_lattice(const std::vector<Site>& vectors, int dimension);

std::string format_site(std::span<const std::int64_t> x);

} // namespace bmclab
