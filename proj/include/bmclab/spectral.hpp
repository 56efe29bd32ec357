#pragma once

#include "bmclab/environment.hpp"
#include "bmclab/kernel.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace bmclab {

/// Leading coefficients m^(n)(x, y), n = 0..N, of the Green function
/// G(x, y | z) of a kernel.
struct GreenSeries {
    std::int64_t x = 0;
    std::int64_t y = 0;
    std::vector<double> coefficients;

    /// Partial sum of the series at z over the stored coefficients.
    double eval(double z) const;
};

GreenSeries green_series(const MomentKernel& m, std::int64_t x, std::int64_t y,
                         std::uint64_t max_order);

/// Partial sum sum_{n<=N} m^(n)(x,y) z^n, a monotone-in-N lower bound of
/// the Green function. z must be nonnegative.
double green_partial(const MomentKernel& m, std::int64_t x, std::int64_t y, double z,
                     std::uint64_t max_order);

enum class SpectralMethod {
    PowerIteration,
    GrowthRate, // diagnostic only
};

struct SpectralEstimate {
    double value = 0.0;
    std::int64_t window_radius = -1;
    SpectralMethod method = SpectralMethod::PowerIteration;
    double residual = 0.0;
    std::uint64_t iterations = 0;
    bool converged = false;
};

inline constexpr double kDefaultSpectralTol = 1e-10;
inline constexpr std::uint64_t kDefaultSpectralMaxIter = 100000;

/// Perron-Frobenius eigenvalue of a finite irreducible kernel by power
/// iteration on M + I (the shift makes periodic supports primitive without
/// moving the eigenvector). Throws DegeneracyError on reducible input.
SpectralEstimate spectral_radius_window(const MomentKernel& m,
                                        double tol = kDefaultSpectralTol,
                                        std::uint64_t max_iter = kDefaultSpectralMaxIter);

/// Final iterate vector alongside the estimate, for superharmonic checks.
SpectralEstimate spectral_radius_window(const MomentKernel& m, double tol,
                                        std::uint64_t max_iter,
                                        std::vector<double>& eigenvector_out);

/// Diagnostic growth-rate estimate (n-step diagonal root); never used for
/// classification.
SpectralEstimate spectral_radius_growth(const MomentKernel& m, std::uint64_t order = 64);

/// Windowed estimates rho(M_{B_L}) for the nested centered boxes of the
/// schedule, computed on truncated kernels. The sequence is non-decreasing
/// and every value is a lower bound for rho(M). The realization must cover
/// the largest box.
std::vector<SpectralEstimate> spectral_radius_sup(const EnvironmentRealization& env,
                                                  std::span<const std::int64_t> schedule,
                                                  double tol = kDefaultSpectralTol,
                                                  std::uint64_t max_iter = kDefaultSpectralMaxIter);

/// Homogeneous convenience overload: single law everywhere.
std::vector<SpectralEstimate> spectral_radius_sup(const GeneratorSet& generator,
                                                  const SiteLaw& law,
                                                  std::span<const std::int64_t> schedule,
                                                  double tol = kDefaultSpectralTol,
                                                  std::uint64_t max_iter = kDefaultSpectralMaxIter);

struct SuperharmonicCheck {
    bool holds = false;
    /// max over states of (Mf(x) - t f(x)) / f(x); negative when strictly
    /// subinvariant everywhere.
    double max_violation = 0.0;
};

/// Checks Mf <= t f pointwise for strictly positive f, within `tol`.
SuperharmonicCheck check_superharmonic(const MomentKernel& m, std::span<const double> f,
                                       double t, double tol = 1e-12);

/// Minimal t > 0 admitting a positive t-superharmonic function, found by
/// bisection; the feasibility probe solves (tI - M) f = 1 and tests
/// positivity. Agrees with the Perron-Frobenius eigenvalue on finite
/// irreducible kernels and is independent of the power iteration path.
double min_superharmonic_t(const MomentKernel& m, double tol = 1e-10);

/// Solution of the frozen-boundary equation on a kernel with absorbing
/// state: sum_y m(x,y) f(y) = t f(x) on interior states, f(dead) = 1.
struct FrozenSolution {
    double t = 0.0;
    std::vector<double> values; // interior states, kernel order
    bool finite = false;
    double residual = 0.0;
};

/// Expected first-passage mass to the absorbing state under mean kernel
/// M/t; finite and strictly positive exactly when t exceeds the interior
/// spectral radius (and every interior state reaches the boundary).
FrozenSolution solve_frozen(const MomentKernel& m_absorbing, double t);

} // namespace bmclab
