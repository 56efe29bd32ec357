#include "bmclab/detail/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace bmclab::detail {

std::optional<std::vector<double>> lu_solve(std::vector<double> a, std::size_t n,
                                            std::vector<double> b) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a[perm[col] * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double v = std::abs(a[perm[r] * n + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best < 1e-300) return std::nullopt;
        std::swap(perm[col], perm[pivot]);
        const double* prow = &a[perm[col] * n];
        for (std::size_t r = col + 1; r < n; ++r) {
            double* row = &a[perm[r] * n];
            double factor = row[col] / prow[col];
            if (factor == 0.0) continue;
            row[col] = factor;
            for (std::size_t c = col + 1; c < n; ++c) row[c] -= factor * prow[c];
            b[perm[r]] -= factor * b[perm[col]];
        }
    }

    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[perm[i]];
        const double* row = &a[perm[i] * n];
        for (std::size_t c = i + 1; c < n; ++c) acc -= row[c] * x[c];
        if (std::abs(row[i]) < 1e-300) return std::nullopt;
        x[i] = acc / row[i];
    }
    return x;
}

namespace {

// y = (tI - M) x
void apply_shifted(const MomentKernel& m, double t, std::span<const double> x,
                   std::span<double> y) {
    m.apply(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = t * x[i] - y[i];
}

// y = (tI - M)^T x
void apply_shifted_transpose(const MomentKernel& m, double t, std::span<const double> x,
                             std::span<double> y) {
    m.apply_transpose(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = t * x[i] - y[i];
}

std::optional<std::vector<double>> cgnr_solve(const MomentKernel& m, double t,
                                              std::span<const double> b) {
    const std::size_t n = b.size();
    std::vector<double> x(n, 0.0), r(b.begin(), b.end()), z(n), p(n), ap(n), atap(n);

    apply_shifted_transpose(m, t, r, z); // z = A^T r
    p = z;
    double znorm2 = 0.0;
    for (double v : z) znorm2 += v * v;
    double bnorm = 0.0;
    for (double v : b) bnorm = std::max(bnorm, std::abs(v));
    if (bnorm == 0.0) return x;

    const std::size_t max_iter = 40 * n + 1000;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        apply_shifted(m, t, p, ap);
        double ap2 = 0.0;
        for (double v : ap) ap2 += v * v;
        if (ap2 == 0.0) return std::nullopt;
        double alpha = znorm2 / ap2;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        double rmax = 0.0;
        for (double v : r) rmax = std::max(rmax, std::abs(v));
        if (rmax <= 1e-13 * std::max(1.0, bnorm)) return x;

        apply_shifted_transpose(m, t, r, z);
        double znew = 0.0;
        for (double v : z) znew += v * v;
        double beta = znew / znorm2;
        znorm2 = znew;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return std::nullopt;
}

} // namespace

std::optional<std::vector<double>> solve_shifted(const MomentKernel& m, double t,
                                                 std::span<const double> b,
                                                 std::size_t dense_threshold) {
    const auto n = static_cast<std::size_t>(m.state_count());
    if (n != b.size()) return std::nullopt;
    if (n < dense_threshold) {
        std::vector<double> a(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            a[i * n + i] = t;
            for (const auto& e : m.row(static_cast<std::int64_t>(i)))
                a[i * n + static_cast<std::size_t>(e.col)] -= e.value;
        }
        return lu_solve(std::move(a), n, std::vector<double>(b.begin(), b.end()));
    }
    return cgnr_solve(m, t, b);
}

double shifted_residual(const MomentKernel& m, double t, std::span<const double> f,
                        std::span<const double> b) {
    std::vector<double> y(f.size());
    apply_shifted(m, t, f, y);
    double r = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        r = std::max(r, std::abs(y[i] - b[i]));
    return r;
}

} // namespace bmclab::detail
