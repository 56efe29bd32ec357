#pragma once

#include "bmclab/kernel.hpp"

#include <optional>
#include <span>
#include <vector>

namespace bmclab::detail {

/// Solves A f = b for dense A (row-major) by LU with partial pivoting.
/// Returns nullopt when the matrix is numerically singular.
std::optional<std::vector<double>> lu_solve(std::vector<double> a, std::size_t n,
                                            std::vector<double> b);

/// Solves (t I - M) f = b. Uses a dense factorization below
/// `dense_threshold` states and conjugate gradient on the normal equations
/// above it. Returns nullopt on singular or non-convergent systems.
std::optional<std::vector<double>> solve_shifted(const MomentKernel& m, double t,
                                                 std::span<const double> b,
                                                 std::size_t dense_threshold = 2000);

/// Max-norm residual ||(t I - M) f - b||_inf.
double shifted_residual(const MomentKernel& m, double t, std::span<const double> f,
                        std::span<const double> b);

} // namespace bmclab::detail
