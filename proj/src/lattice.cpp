#include "bmclab/lattice.hpp"

#include "bmclab/errors.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace bmclab {

Box::Box(Site lo, Site hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.empty() || lo_.size() != hi_.size())
        throw ConfigError("box bounds must be non-empty and of equal dimension");
    stride_.assign(lo_.size(), 1);
    size_ = 1;
    for (std::size_t i = 0; i < lo_.size(); ++i) {
        if (hi_[i] < lo_[i]) throw ConfigError("box has hi < lo");
    }
    for (std::size_t i = lo_.size(); i-- > 0;) {
        stride_[i] = size_;
        size_ *= hi_[i] - lo_[i] + 1;
    }
}

Box Box::centered(int dimension, std::int64_t radius) {
    if (dimension <= 0) throw ConfigError("box dimension must be positive");
    if (radius < 0) throw ConfigError("box radius must be nonnegative");
    return Box(Site(dimension, -radius), Site(dimension, radius));
}

bool Box::contains(std::span<const std::int64_t> x) const {
    if (x.size() != lo_.size()) return false;
    for (std::size_t i = 0; i < lo_.size(); ++i)
        if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
    return true;
}

bool Box::contains_box(const Box& inner) const {
    return contains(inner.lo()) && contains(inner.hi());
}

std::int64_t Box::rank(std::span<const std::int64_t> x) const {
    std::int64_t r = 0;
    for (std::size_t i = 0; i < lo_.size(); ++i)
        r += (x[i] - lo_[i]) * stride_[i];
    return r;
}

Site Box::site(std::int64_t rank) const {
    Site x(lo_.size());
    for (std::size_t i = 0; i < lo_.size(); ++i) {
        x[i] = lo_[i] + rank / stride_[i];
        rank %= stride_[i];
    }
    return x;
}

std::string format_site(std::span<const std::int64_t> x) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
    os << ")";
    return os.str();
}

namespace {

// Smith normal form of an integer matrix via gcd pivoting. Only the
// invariant factors are needed; entries stay small for the step sets
// this project handles.
std::vector<std::int64_t> smith_invariants(std::vector<std::vector<std::int64_t>> a) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    std::vector<std::int64_t> diag;

    std::size_t r = 0, c = 0;
    while (r < rows && c < cols) {
        // find a nonzero pivot in the remaining submatrix
        std::size_t pr = r, pc = c;
        bool found = false;
        for (std::size_t i = r; i < rows && !found; ++i)
            for (std::size_t j = c; j < cols && !found; ++j)
                if (a[i][j] != 0) { pr = i; pc = j; found = true; }
        if (!found) break;
        std::swap(a[r], a[pr]);
        for (auto& row : a) std::swap(row[c], row[pc]);

        // eliminate the pivot row and column; swap in smaller remainders
        // until everything below/right of the pivot in its line is zero
        bool dirty = true;
        while (dirty) {
            dirty = false;
            for (std::size_t i = r + 1; i < rows; ++i) {
                if (a[i][c] == 0) continue;
                std::int64_t q = a[i][c] / a[r][c];
                for (std::size_t j = c; j < cols; ++j) a[i][j] -= q * a[r][j];
                if (a[i][c] != 0) { std::swap(a[r], a[i]); dirty = true; }
            }
            for (std::size_t j = c + 1; j < cols; ++j) {
                if (a[r][j] == 0) continue;
                std::int64_t q = a[r][j] / a[r][c];
                for (std::size_t i = r; i < rows; ++i) a[i][j] -= q * a[i][c];
                if (a[r][j] != 0) {
                    for (std::size_t i = r; i < rows; ++i) std::swap(a[i][c], a[i][j]);
                    dirty = true;
                }
            }
        }
        diag.push_back(std::abs(a[r][c]));
        ++r;
        ++c;
    }
    return diag;
}

} // namespace

bool spans_lattice(const std::vector<Site>& vectors, int dimension) {
    if (dimension <= 0) return false;
    std::vector<std::vector<std::int64_t>> m;
    m.reserve(vectors.size());
    for (const auto& v : vectors) {
        if (static_cast<int>(v.size()) != dimension) return false;
        m.push_back(v);
    }
    if (m.empty()) return false;
    auto diag = smith_invariants(std::move(m));
    if (static_cast<int>(diag.size()) < dimension) return false;
    return std::all_of(diag.begin(), diag.end(),
                       [](std::int64_t d) { return d == 1; });
}

std::size_t GeneratorSet::find_step(std::span<const std::int64_t> s) const {
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i].size() == s.size() &&
            std::equal(steps[i].begin(), steps[i].end(), s.begin()))
            return i;
    }
    return npos;
}

void GeneratorSet::validate() const {
    if (dimension <= 0) throw ConfigError("generator dimension must be positive");
    if (steps.empty()) throw ConfigError("generator step set is empty");
    std::set<Site> seen;
    for (const auto& s : steps) {
        if (static_cast<int>(s.size()) != dimension)
            throw ConfigError("step " + format_site(s) + " has wrong dimension");
        if (!seen.insert(s).second)
            throw ConfigError("duplicate step " + format_site(s));
    }
    if (gen_subset.empty()) throw ConfigError("generating subset is empty");
    std::vector<Site> gens;
    for (auto idx : gen_subset) {
        if (idx >= steps.size())
            throw ConfigError("generating subset index out of range");
        gens.push_back(steps[idx]);
    }
    if (!spans_lattice(gens, dimension))
        throw ConfigError("generating subset does not span the lattice");
}

} // namespace bmclab
