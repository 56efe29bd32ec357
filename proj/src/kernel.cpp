#include "bmclab/kernel.hpp"

#include "bmclab/errors.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>
#include <string>

namespace bmclab {

MomentKernel::MomentKernel(std::int64_t state_count, std::int64_t origin)
    : rows_(static_cast<std::size_t>(state_count)), origin_(origin) {
    if (state_count <= 0) throw ConfigError("kernel needs at least one state");
    if (origin < 0 || origin >= state_count)
        throw ConfigError("kernel origin out of range");
}

MomentKernel MomentKernel::identity(std::int64_t state_count, std::int64_t origin) {
    MomentKernel k(state_count, origin);
    for (std::int64_t i = 0; i < state_count; ++i) k.add_entry(i, i, 1.0);
    return k;
}

MomentKernel MomentKernel::from_dense(const std::vector<std::vector<double>>& m,
                                      std::int64_t origin) {
    if (m.empty()) throw ConfigError("dense kernel must be non-empty");
    MomentKernel k(static_cast<std::int64_t>(m.size()), origin);
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i].size() != m.size())
            throw ConfigError("dense kernel must be square");
        for (std::size_t j = 0; j < m[i].size(); ++j)
            if (m[i][j] != 0.0)
                k.add_entry(static_cast<std::int64_t>(i),
                            static_cast<std::int64_t>(j), m[i][j]);
    }
    return k;
}

double MomentKernel::entry(std::int64_t x, std::int64_t y) const {
    for (const auto& e : rows_[static_cast<std::size_t>(x)])
        if (e.col == y) return e.value;
    return 0.0;
}

void MomentKernel::add_entry(std::int64_t x, std::int64_t y, double value) {
    if (value < 0.0) throw ConfigError("kernel entries must be nonnegative");
    if (value == 0.0) return;
    auto& row = rows_[static_cast<std::size_t>(x)];
    for (auto& e : row) {
        if (e.col == y) {
            e.value += value;
            return;
        }
    }
    row.push_back({static_cast<std::int32_t>(y), value});
}

void MomentKernel::sort_rows() {
    for (auto& row : rows_)
        std::sort(row.begin(), row.end(),
                  [](const Entry& a, const Entry& b) { return a.col < b.col; });
}

std::size_t MomentKernel::nonzero_count() const {
    std::size_t n = 0;
    for (const auto& row : rows_) n += row.size();
    return n;
}

std::vector<double> MomentKernel::row_sums() const {
    std::vector<double> sums(rows_.size(), 0.0);
    for (std::size_t i = 0; i < rows_.size(); ++i)
        for (const auto& e : rows_[i]) sums[i] += e.value;
    return sums;
}

double MomentKernel::max_row_sum() const {
    double best = 0.0;
    for (const auto& row : rows_) {
        double s = 0.0;
        for (const auto& e : row) s += e.value;
        best = std::max(best, s);
    }
    return best;
}

void MomentKernel::apply(std::span<const double> v, std::span<double> w) const {
    assert(v.size() == rows_.size() && w.size() == rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        double acc = 0.0;
        for (const auto& e : rows_[i]) acc += e.value * v[static_cast<std::size_t>(e.col)];
        w[i] = acc;
    }
}

void MomentKernel::apply_transpose(std::span<const double> v, std::span<double> w) const {
    assert(v.size() == rows_.size() && w.size() == rows_.size());
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t i = 0; i < rows_.size(); ++i)
        for (const auto& e : rows_[i])
            w[static_cast<std::size_t>(e.col)] += e.value * v[i];
}

namespace {

// reachability of every state from `start` along the given adjacency
bool reaches_all(const std::vector<std::vector<std::int32_t>>& adj, std::size_t start) {
    std::vector<bool> seen(adj.size(), false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        auto u = stack.back();
        stack.pop_back();
        for (auto v : adj[u]) {
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = true;
                ++count;
                stack.push_back(static_cast<std::size_t>(v));
            }
        }
    }
    return count == adj.size();
}

} // namespace

bool MomentKernel::is_irreducible() const {
    const auto n = rows_.size();
    if (n == 1) return true;
    std::vector<std::vector<std::int32_t>> fwd(n), bwd(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& e : rows_[i]) {
            fwd[i].push_back(e.col);
            bwd[static_cast<std::size_t>(e.col)].push_back(static_cast<std::int32_t>(i));
        }
    }
    return reaches_all(fwd, 0) && reaches_all(bwd, 0);
}

MomentKernel MomentKernel::restrict_to(const std::vector<bool>& keep) const {
    if (keep.size() != rows_.size())
        throw ConfigError("restriction mask does not match the state count");
    std::vector<std::int64_t> remap(rows_.size(), -1);
    std::int64_t next = 0;
    for (std::size_t i = 0; i < keep.size(); ++i)
        if (keep[i]) remap[i] = next++;
    if (next == 0) throw ConfigError("restriction keeps no states");

    std::int64_t origin = 0;
    if (remap[static_cast<std::size_t>(origin_)] >= 0)
        origin = remap[static_cast<std::size_t>(origin_)];
    MomentKernel out(next, origin);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (remap[i] < 0) continue;
        for (const auto& e : rows_[i]) {
            auto j = remap[static_cast<std::size_t>(e.col)];
            if (j >= 0) out.add_entry(remap[i], j, e.value);
        }
    }
    out.sort_rows();
    return out;
}

std::pair<MomentKernel, std::vector<double>> MomentKernel::split_absorbing() const {
    if (!absorbing_) throw ConfigError("kernel has no absorbing state");
    const auto dead = *absorbing_;
    std::vector<bool> keep(rows_.size(), true);
    keep[static_cast<std::size_t>(dead)] = false;
    auto interior = restrict_to(keep);

    std::vector<double> to_dead;
    to_dead.reserve(rows_.size() - 1);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (static_cast<std::int64_t>(i) == dead) continue;
        double v = 0.0;
        for (const auto& e : rows_[i])
            if (e.col == dead) v += e.value;
        to_dead.push_back(v);
    }
    return {std::move(interior), std::move(to_dead)};
}

void MomentKernel::write_csv(std::ostream& os) const {
    os << "x_index,y_index,value\n";
    char buf[64];
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        auto row = rows_[i];
        std::sort(row.begin(), row.end(),
                  [](const Entry& a, const Entry& b) { return a.col < b.col; });
        for (const auto& e : row) {
            std::snprintf(buf, sizeof buf, "%.17g", e.value);
            os << i << ',' << e.col << ',' << buf << '\n';
        }
    }
}

MomentKernel multiply(const MomentKernel& a, const MomentKernel& b) {
    if (a.state_count() != b.state_count())
        throw ConfigError("kernel product needs matching state counts");
    const auto n = a.state_count();
    MomentKernel out(n, a.origin());
    std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
    std::vector<std::int32_t> touched;
    for (std::int64_t i = 0; i < n; ++i) {
        touched.clear();
        for (const auto& ea : a.row(i)) {
            for (const auto& eb : b.row(ea.col)) {
                auto j = static_cast<std::size_t>(eb.col);
                if (acc[j] == 0.0) touched.push_back(eb.col);
                acc[j] += ea.value * eb.value;
            }
        }
        std::sort(touched.begin(), touched.end());
        for (auto j : touched) {
            out.add_entry(i, j, acc[static_cast<std::size_t>(j)]);
            acc[static_cast<std::size_t>(j)] = 0.0;
        }
    }
    return out;
}

MomentKernel convolve_n(const MomentKernel& m, std::uint64_t n) {
    MomentKernel result = MomentKernel::identity(m.state_count(), m.origin());
    MomentKernel base = m;
    while (n > 0) {
        if (n & 1) result = multiply(result, base);
        n >>= 1;
        if (n > 0) base = multiply(base, base);
    }
    return result;
}

MomentKernel build_moment_kernel(const EnvironmentRealization& env, const Box& window,
                                 BoundaryMode boundary) {
    if (window.size() <= 0) throw ConfigError("window is empty");
    if (!env.covers(window))
        throw ConfigError("realization does not cover the requested window");

    const auto& gen = env.spec().generator;
    if (window.dimension() != gen.dimension)
        throw ConfigError("window dimension does not match the generator");

    const std::int64_t interior = window.size();
    const bool absorbing = boundary == BoundaryMode::Absorbing;
    const std::int64_t nstates = interior + (absorbing ? 1 : 0);

    Site zero(static_cast<std::size_t>(window.dimension()), 0);
    std::int64_t origin = window.contains(zero) ? window.rank(zero) : 0;

    MomentKernel kernel(nstates, origin);
    Site target(static_cast<std::size_t>(window.dimension()));
    for (std::int64_t r = 0; r < interior; ++r) {
        const Site x = window.site(r);
        const SiteLaw& law = env.law_at(x);
        double outflow = 0.0;
        for (std::size_t s = 0; s < gen.steps.size(); ++s) {
            const double mean = law.mean(s);
            if (mean == 0.0) continue;
            for (std::size_t i = 0; i < target.size(); ++i)
                target[i] = x[i] + gen.steps[s][i];
            if (window.contains(target))
                kernel.add_entry(r, window.rank(target), mean);
            else
                outflow += mean;
        }
        if (absorbing && outflow > 0.0) kernel.add_entry(r, interior, outflow);
    }
    if (absorbing) kernel.set_absorbing(interior);
    kernel.sort_rows();
    return kernel;
}

} // namespace bmclab
