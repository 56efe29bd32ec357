#include "bmclab/spectral.hpp"

#include "bmclab/detail/linalg.hpp"
#include "bmclab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bmclab {

double GreenSeries::eval(double z) const {
    if (z < 0.0) throw ConfigError("green series argument must be nonnegative");
    // Horner on the partial sum
    double acc = 0.0;
    for (std::size_t i = coefficients.size(); i-- > 0;)
        acc = acc * z + coefficients[i];
    return acc;
}

GreenSeries green_series(const MomentKernel& m, std::int64_t x, std::int64_t y,
                         std::uint64_t max_order) {
    const auto n = static_cast<std::size_t>(m.state_count());
    if (x < 0 || x >= m.state_count() || y < 0 || y >= m.state_count())
        throw ConfigError("green series states out of range");
    GreenSeries series;
    series.x = x;
    series.y = y;
    series.coefficients.reserve(max_order + 1);

    std::vector<double> row(n, 0.0), next(n, 0.0);
    row[static_cast<std::size_t>(x)] = 1.0;
    series.coefficients.push_back(row[static_cast<std::size_t>(y)]);
    for (std::uint64_t k = 1; k <= max_order; ++k) {
        m.apply_transpose(row, next); // next = row^T M
        std::swap(row, next);
        series.coefficients.push_back(row[static_cast<std::size_t>(y)]);
    }
    return series;
}

double green_partial(const MomentKernel& m, std::int64_t x, std::int64_t y, double z,
                     std::uint64_t max_order) {
    if (z < 0.0) throw ConfigError("green_partial requires z >= 0");
    return green_series(m, x, y, max_order).eval(z);
}

SpectralEstimate spectral_radius_window(const MomentKernel& m, double tol,
                                        std::uint64_t max_iter,
                                        std::vector<double>& eigenvector_out) {
    if (!m.is_irreducible())
        throw DegeneracyError("spectral_radius_window requires an irreducible kernel");
    const auto n = static_cast<std::size_t>(m.state_count());

    SpectralEstimate est;
    est.method = SpectralMethod::PowerIteration;

    // iterate keeps ||v||_inf == 1, so the residual below is already the
    // relative residual of the contract
    std::vector<double> v(n, 1.0), w(n);
    double lambda = 0.0, wmax = 0.0;
    for (std::uint64_t iter = 1; iter <= max_iter; ++iter) {
        if (iter > 1)
            for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wmax;

        m.apply(v, w);
        for (std::size_t i = 0; i < n; ++i) w[i] += v[i]; // (M + I) v

        double vw = 0.0, vv = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            vw += v[i] * w[i];
            vv += v[i] * v[i];
        }
        lambda = vw / vv;

        double resid = 0.0;
        wmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            resid = std::max(resid, std::abs(w[i] - lambda * v[i]));
            wmax = std::max(wmax, std::abs(w[i]));
        }
        est.iterations = iter;
        est.residual = resid;
        if (resid <= tol) {
            est.converged = true;
            break;
        }
    }
    est.value = lambda - 1.0;
    eigenvector_out = std::move(v);
    return est;
}

SpectralEstimate spectral_radius_window(const MomentKernel& m, double tol,
                                        std::uint64_t max_iter) {
    std::vector<double> scratch;
    return spectral_radius_window(m, tol, max_iter, scratch);
}

SpectralEstimate spectral_radius_growth(const MomentKernel& m, std::uint64_t order) {
    if (order == 0) throw ConfigError("growth estimate needs a positive order");
    auto series = green_series(m, m.origin(), m.origin(), order);
    SpectralEstimate est;
    est.method = SpectralMethod::GrowthRate;
    double coeff = series.coefficients[order];
    if (coeff <= 0.0 && order >= 1) {
        // periodic kernels vanish on odd diagonals; fall back one order
        coeff = series.coefficients[order - 1];
        if (coeff > 0.0) est.value = std::pow(coeff, 1.0 / static_cast<double>(order - 1));
    } else if (coeff > 0.0) {
        est.value = std::pow(coeff, 1.0 / static_cast<double>(order));
    }
    est.converged = est.value > 0.0;
    return est;
}

std::vector<SpectralEstimate> spectral_radius_sup(const EnvironmentRealization& env,
                                                  std::span<const std::int64_t> schedule,
                                                  double tol, std::uint64_t max_iter) {
    if (schedule.empty()) throw ConfigError("window schedule is empty");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i] <= schedule[i - 1])
            throw ConfigError("window schedule must be strictly increasing");

    std::vector<SpectralEstimate> out;
    out.reserve(schedule.size());
    const int d = env.spec().generator.dimension;
    for (auto radius : schedule) {
        auto box = Box::centered(d, radius);
        auto kernel = build_moment_kernel(env, box, BoundaryMode::Truncated);
        auto est = spectral_radius_window(kernel, tol, max_iter);
        est.window_radius = radius;
        out.push_back(est);
    }
    return out;
}

std::vector<SpectralEstimate> spectral_radius_sup(const GeneratorSet& generator,
                                                  const SiteLaw& law,
                                                  std::span<const std::int64_t> schedule,
                                                  double tol, std::uint64_t max_iter) {
    auto spec = std::make_shared<EnvironmentSpec>(
        EnvironmentSpec::homogeneous(generator, law));
    const std::int64_t max_radius = *std::max_element(schedule.begin(), schedule.end());
    auto env = homogeneous_realization(spec, Box::centered(generator.dimension, max_radius));
    return spectral_radius_sup(env, schedule, tol, max_iter);
}

SuperharmonicCheck check_superharmonic(const MomentKernel& m, std::span<const double> f,
                                       double t, double tol) {
    if (f.size() != static_cast<std::size_t>(m.state_count()))
        throw ConfigError("function length does not match the state count");
    for (double v : f)
        if (!(v > 0.0))
            throw ConfigError("superharmonic check requires a strictly positive function");

    std::vector<double> mf(f.size());
    m.apply(f, mf);
    SuperharmonicCheck check;
    check.holds = true;
    bool first = true;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double slack = mf[i] - t * f[i];
        if (slack > tol) check.holds = false;
        const double rel = slack / f[i];
        if (first || rel > check.max_violation) {
            check.max_violation = rel;
            first = false;
        }
    }
    return check;
}

namespace {

// Feasibility probe for the bisection: t admits a positive superharmonic
// function iff (tI - M) f = 1 has a strictly positive solution.
bool superharmonic_feasible(const MomentKernel& m, double t) {
    const auto n = static_cast<std::size_t>(m.state_count());
    std::vector<double> ones(n, 1.0);
    auto f = detail::solve_shifted(m, t, ones);
    if (!f) return false;
    for (double v : *f)
        if (!(v > 0.0)) return false;
    return true;
}

} // namespace

double min_superharmonic_t(const MomentKernel& m, double tol) {
    if (!m.is_irreducible())
        throw DegeneracyError("min_superharmonic_t requires an irreducible kernel");
    double hi = m.max_row_sum() + 1.0;
    double lo = 0.0;
    if (!superharmonic_feasible(m, hi))
        throw ConvergenceError("no superharmonic function below the row-sum bound");
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (superharmonic_feasible(m, mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

FrozenSolution solve_frozen(const MomentKernel& m_absorbing, double t) {
    if (!(t > 0.0)) throw ConfigError("solve_frozen requires t > 0");
    if (!m_absorbing.absorbing_state())
        throw ConfigError("solve_frozen needs a kernel with an absorbing state");
    const auto dead = *m_absorbing.absorbing_state();
    if (!m_absorbing.row(dead).empty())
        throw ConfigError("absorbing state must have an all-zero row");

    auto [interior, boundary_mass] = m_absorbing.split_absorbing();

    FrozenSolution sol;
    sol.t = t;
    auto f = detail::solve_shifted(interior, t, boundary_mass);
    if (!f) {
        sol.finite = false;
        return sol;
    }
    sol.values = std::move(*f);
    sol.residual = detail::shifted_residual(interior, t, sol.values, boundary_mass);
    sol.finite = sol.residual <= 1e-10;
    for (double v : sol.values)
        if (!(v > 0.0)) sol.finite = false;
    return sol;
}

} // namespace bmclab
