#pragma once

#include "bmclab/environment.hpp"
#include "bmclab/lattice.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace bmclab {

enum class BoundaryMode {
    Absorbing, // outflow collected into a dead state
    Truncated, // outflow dropped
};

/// Sparse nonnegative first-moment kernel m(x, y) over an indexed finite
/// state set. Entries within a row are kept sorted by column. Immutable in
/// spirit: operations return new kernels.
class MomentKernel {
public:
    struct Entry {
        std::int32_t col;
        double value;
    };

    MomentKernel() = default;
    MomentKernel(std::int64_t state_count, std::int64_t origin);

    static MomentKernel identity(std::int64_t state_count, std::int64_t origin = 0);
    /// Dense constructor for tests and small oracles; zero entries dropped.
    static MomentKernel from_dense(const std::vector<std::vector<double>>& m,
                                   std::int64_t origin = 0);

    std::int64_t state_count() const { return static_cast<std::int64_t>(rows_.size()); }
    std::int64_t origin() const { return origin_; }
    std::optional<std::int64_t> absorbing_state() const { return absorbing_; }

    const std::vector<Entry>& row(std::int64_t x) const { return rows_[static_cast<std::size_t>(x)]; }
    double entry(std::int64_t x, std::int64_t y) const;
    void add_entry(std::int64_t x, std::int64_t y, double value);
    void set_absorbing(std::int64_t state) { absorbing_ = state; }
    void sort_rows();

    std::size_t nonzero_count() const;
    std::vector<double> row_sums() const;
    double max_row_sum() const;

    /// w = M v (right application).
    void apply(std::span<const double> v, std::span<double> w) const;
    /// w = vᵀ M (left application).
    void apply_transpose(std::span<const double> v, std::span<double> w) const;

    /// Strong connectivity of the support graph.
    bool is_irreducible() const;

    /// Sub-kernel on the states with keep[x] true; origin remapped when kept.
    MomentKernel restrict_to(const std::vector<bool>& keep) const;
    /// The kernel without its absorbing state, plus the column of entries
    /// that pointed at it. Precondition: absorbing_state() is set.
    std::pair<MomentKernel, std::vector<double>> split_absorbing() const;

    /// Coordinate-triplet CSV (x_index, y_index, value), rows sorted.
    void write_csv(std::ostream& os) const;

private:
    std::vector<std::vector<Entry>> rows_;
    std::int64_t origin_ = 0;
    std::optional<std::int64_t> absorbing_;
};

/// Sparse product a · b.
MomentKernel multiply(const MomentKernel& a, const MomentKernel& b);

/// n-fold convolution M^n; M^0 is the identity.
MomentKernel convolve_n(const MomentKernel& m, std::uint64_t n);

/// Builds the first-moment kernel of the environment restricted to `window`.
/// States are window sites in lexicographic rank order; with absorbing
/// boundary a trailing dead state receives all outflow. The origin state is
/// the site 0 when the window contains it, else the window's first site.
MomentKernel build_moment_kernel(const EnvironmentRealization& env, const Box& window,
                                 BoundaryMode boundary);

} // namespace bmclab
