#pragma once

#include "bmclab/environment.hpp"
#include "bmclab/kernel.hpp"
#include "bmclab/lattice.hpp"
#include "bmclab/spectral.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bmclab {

/// A point of the convex hull of palette means: expected offspring per
/// step. Total mass below 1 is admissible (interior hull points of
/// sub-survival mixtures stay meaningful).
struct MeanVector {
    std::vector<Site> steps;
    std::vector<double> values;

    double total() const;
};

/// Exponential moment sum_s e^<theta,s> m(s); convex in theta, linear in
/// the mean vector. Large exponents are shifted before exponentiation.
double phi(const MeanVector& m, std::span<const double> theta);

struct InfThetaResult {
    std::vector<double> theta;
    double value = 0.0;
    double gradient_norm = 0.0;
    std::uint64_t iterations = 0;
};

/// Minimizes phi(m, .) over theta. Throws DegeneracyError with a witness
/// direction when the support lies in a closed half-space and the infimum
/// is only approached at infinity.
InfThetaResult inf_theta(const MeanVector& m, double tol = 1e-10);

enum class Verdict {
    Transient,
    StronglyRecurrent,
};

std::string to_string(Verdict v);

struct CriterionReport {
    double c = 0.0;
    std::vector<double> theta_star;
    std::vector<std::size_t> active_laws;
    Verdict verdict = Verdict::Transient;
    bool boundary_flag = false;
};

inline constexpr double kDefaultBoundaryTol = 1e-6;

/// The explicit transience criterion: c = inf over theta of the largest
/// palette exponential moment. The supremum over the convex hull reduces
/// to this finite max because phi is linear in the mean and the minimax
/// swap holds. Verdict is Transient iff c <= 1; boundary_flag warns when
/// |c - 1| < boundary_tol.
CriterionReport criterion_value(const std::vector<Site>& steps,
                                const std::vector<std::vector<double>>& palette_means,
                                double tol = 1e-10,
                                double boundary_tol = kDefaultBoundaryTol);

/// EnvironmentSpec entry point; validates the environment first.
CriterionReport criterion_value(const EnvironmentSpec& spec, double tol = 1e-10,
                                double boundary_tol = kDefaultBoundaryTol);

struct CrossCheckRow {
    std::int64_t window_radius = 0;
    double estimate = 0.0;
    double gap = 0.0; // c - estimate
};

struct CrossCheckReport {
    CriterionReport criterion;
    std::vector<CrossCheckRow> rows;
    double max_gap = 0.0;
    bool monotone = true;
    bool bounded_by_c = true;
};

/// Verifies that windowed spectral estimates on a sampled realization
/// increase toward the criterion value and never exceed it.
CrossCheckReport classify_cross_check(const EnvironmentSpec& spec,
                                      std::span<const std::int64_t> schedule,
                                      double tol = 1e-8, std::uint64_t seed = 0);

struct CtBrwResult {
    double rho = 0.0;            // adjacency Perron-Frobenius eigenvalue
    double critical_lambda = 0.0; // 1 / rho
};

/// Critical birth rate of the continuous-time branching random walk on a
/// connected graph: local survival iff lambda > 1/rho(A).
CtBrwResult ct_brw_critical_lambda(const MomentKernel& adjacency, double tol = 1e-12);

struct CriticalBranchingResult {
    std::vector<SpectralEstimate> estimates;
    double rho = 0.0;       // windowed limit of rho(P)
    double critical_m = 0.0; // 1 / rho
};

/// Critical constant offspring mean for a BMC with independent branching
/// and movement along the given random-walk law: transient iff
/// m <= 1/rho(P). The walk law must be row-stochastic (means sum to 1).
CriticalBranchingResult independent_branching_critical_m(
    const GeneratorSet& generator, const SiteLaw& walk_law,
    std::span<const std::int64_t> schedule, double tol = 1e-10);

} // namespace bmclab
