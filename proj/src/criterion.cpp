#include "bmclab/criterion.hpp"

#include "bmclab/detail/linalg.hpp"
#include "bmclab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace bmclab {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// value / gradient / Hessian of phi at theta; Hessian row-major d x d
struct PhiEval {
    double value = 0.0;
    std::vector<double> grad;
    std::vector<double> hess;
};

PhiEval phi_eval(const MeanVector& m, std::span<const double> theta, bool want_hess) {
    const std::size_t d = theta.size();
    PhiEval out;
    out.grad.assign(d, 0.0);
    if (want_hess) out.hess.assign(d * d, 0.0);

    double shift = -std::numeric_limits<double>::infinity();
    std::vector<double> expo(m.steps.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < m.steps.size(); ++k) {
        if (m.values[k] <= 0.0) continue;
        double a = std::log(m.values[k]);
        for (std::size_t i = 0; i < d; ++i) a += theta[i] * static_cast<double>(m.steps[k][i]);
        expo[k] = a;
        shift = std::max(shift, a);
    }
    if (!std::isfinite(shift)) return out; // empty support: phi == 0

    double s0 = 0.0;
    std::vector<double> s1(d, 0.0);
    std::vector<double> s2(want_hess ? d * d : 0, 0.0);
    for (std::size_t k = 0; k < m.steps.size(); ++k) {
        if (!(expo[k] > -std::numeric_limits<double>::infinity())) continue;
        const double w = std::exp(expo[k] - shift);
        s0 += w;
        for (std::size_t i = 0; i < d; ++i) {
            const double si = static_cast<double>(m.steps[k][i]);
            s1[i] += w * si;
            if (want_hess)
                for (std::size_t j = 0; j < d; ++j)
                    s2[i * d + j] += w * si * static_cast<double>(m.steps[k][j]);
        }
    }
    const double scale = std::exp(shift);
    out.value = scale * s0;
    for (std::size_t i = 0; i < d; ++i) out.grad[i] = scale * s1[i];
    if (want_hess)
        for (std::size_t i = 0; i < d * d; ++i) out.hess[i] = scale * s2[i];
    return out;
}

// One-sided support detection along coordinate axes (exact for d = 1).
// Returns a witness direction u with <u, s> >= 0 on the whole support.
std::optional<std::vector<double>> axis_witness(const std::vector<Site>& support, int d) {
    if (support.empty()) return std::nullopt;
    for (int axis = 0; axis < d; ++axis) {
        for (double sign : {1.0, -1.0}) {
            bool nonneg = true, some_positive = false;
            for (const auto& s : support) {
                const double v = sign * static_cast<double>(s[axis]);
                if (v < 0.0) { nonneg = false; break; }
                if (v > 0.0) some_positive = true;
            }
            if (nonneg && some_positive) {
                std::vector<double> u(d, 0.0);
                u[axis] = sign;
                return u;
            }
        }
    }
    return std::nullopt;
}

std::vector<Site> support_of(const MeanVector& m) {
    std::vector<Site> support;
    for (std::size_t k = 0; k < m.steps.size(); ++k)
        if (m.values[k] > 0.0) support.push_back(m.steps[k]);
    return support;
}

constexpr double kEscapeNorm = 1e3;

[[noreturn]] void throw_escape(std::span<const double> theta) {
    std::vector<double> u(theta.size(), 0.0);
    const double n = norm2(theta);
    if (n > 0.0)
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = -theta[i] / n;
    throw DegeneracyError(
        "infimum over theta is approached at infinity (one-sided support)",
        std::move(u));
}

// Damped Newton step on a d x d system; falls back to steepest descent
// when the (regularized) solve fails.
std::vector<double> newton_direction(std::vector<double> hess,
                                     std::span<const double> grad) {
    const std::size_t d = grad.size();
    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) trace += hess[i * d + i];
    const double mu = std::max(1e-14, 1e-12 * trace);
    for (std::size_t i = 0; i < d; ++i) hess[i * d + i] += mu;
    std::vector<double> rhs(d);
    for (std::size_t i = 0; i < d; ++i) rhs[i] = -grad[i];
    auto delta = detail::lu_solve(std::move(hess), d, std::move(rhs));
    if (delta) return *delta;
    std::vector<double> down(d);
    for (std::size_t i = 0; i < d; ++i) down[i] = -grad[i];
    return down;
}

} // namespace

double MeanVector::total() const {
    return std::accumulate(values.begin(), values.end(), 0.0);
}

double phi(const MeanVector& m, std::span<const double> theta) {
    if (m.values.size() != m.steps.size())
        throw ConfigError("mean vector and step list sizes differ");
    if (theta.size() != (m.steps.empty() ? theta.size() : m.steps[0].size()))
        throw ConfigError("theta dimension does not match the steps");
    return phi_eval(m, theta, false).value;
}

InfThetaResult inf_theta(const MeanVector& m, double tol) {
    if (m.steps.empty() || m.values.size() != m.steps.size())
        throw ConfigError("mean vector and step list sizes differ");
    for (double v : m.values)
        if (v < 0.0) throw ConfigError("mean entries must be nonnegative");
    const int d = static_cast<int>(m.steps[0].size());

    auto support = support_of(m);
    if (support.empty()) throw ConfigError("mean vector has empty support");
    if (auto witness = axis_witness(support, d))
        throw DegeneracyError(
            "support lies in a closed half-space; infimum not attained",
            std::move(*witness));

    InfThetaResult res;
    res.theta.assign(static_cast<std::size_t>(d), 0.0);

    // Newton on log(phi): scale-free gradient and a covariance Hessian
    auto eval = phi_eval(m, res.theta, true);
    for (std::uint64_t iter = 1; iter <= 200; ++iter) {
        res.iterations = iter;
        const double value = eval.value;
        std::vector<double> grad_log(static_cast<std::size_t>(d));
        std::vector<double> hess_log(static_cast<std::size_t>(d) * d);
        for (int i = 0; i < d; ++i) grad_log[i] = eval.grad[i] / value;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                hess_log[i * d + j] =
                    eval.hess[i * d + j] / value - grad_log[i] * grad_log[j];

        res.gradient_norm = norm2(eval.grad);
        if (res.gradient_norm <= tol) break;

        auto delta = newton_direction(hess_log, grad_log);
        const double slope = dot(grad_log, delta);
        double alpha = 1.0;
        std::vector<double> candidate(res.theta);
        PhiEval cand_eval;
        bool moved = false;
        while (alpha >= 1e-14) {
            for (int i = 0; i < d; ++i) candidate[i] = res.theta[i] + alpha * delta[i];
            cand_eval = phi_eval(m, candidate, true);
            if (std::isfinite(cand_eval.value) &&
                std::log(cand_eval.value) <=
                    std::log(value) + 1e-4 * alpha * slope) {
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!moved) break; // no descent; stationary to machine precision
        res.theta = candidate;
        eval = cand_eval;
        if (norm2(res.theta) > kEscapeNorm) throw_escape(res.theta);
    }
    res.value = eval.value;
    res.gradient_norm = norm2(eval.grad);
    if (res.gradient_norm > tol * std::max(1.0, res.value) * 10.0 &&
        res.gradient_norm > tol)
        throw ConvergenceError("inf_theta did not reach the gradient tolerance");
    return res;
}

std::string to_string(Verdict v) {
    return v == Verdict::Transient ? "Transient" : "StronglyRecurrent";
}

namespace {

// ----- inner minimax machinery: c = inf_theta max_i phi_i(theta) -----

struct MaxEval {
    double value = 0.0;
    std::size_t argmax = 0;
};

MaxEval true_max(const std::vector<MeanVector>& palette, std::span<const double> theta) {
    MaxEval best;
    best.value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < palette.size(); ++i) {
        const double v = phi_eval(palette[i], theta, false).value;
        if (v > best.value) {
            best.value = v;
            best.argmax = i;
        }
    }
    return best;
}

// Smoothed max F_tau = tau * log sum exp(phi_i / tau) minimized by damped
// Newton; decreasing tau homes in on the nonsmooth minimax point.
std::vector<double> minimize_smoothed(const std::vector<MeanVector>& palette,
                                      std::vector<double> theta, double scale) {
    const std::size_t d = theta.size();
    for (double tau = scale; tau >= 1e-7 * scale; tau *= 0.1) {
        for (int iter = 0; iter < 100; ++iter) {
            std::vector<PhiEval> evals(palette.size());
            double fmax = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < palette.size(); ++i) {
                evals[i] = phi_eval(palette[i], theta, true);
                fmax = std::max(fmax, evals[i].value);
            }
            double z = 0.0;
            std::vector<double> p(palette.size());
            for (std::size_t i = 0; i < palette.size(); ++i) {
                p[i] = std::exp((evals[i].value - fmax) / tau);
                z += p[i];
            }
            const double fval = fmax + tau * std::log(z);
            for (auto& w : p) w /= z;

            std::vector<double> grad(d, 0.0);
            std::vector<double> hess(d * d, 0.0);
            for (std::size_t i = 0; i < palette.size(); ++i)
                for (std::size_t a = 0; a < d; ++a) grad[a] += p[i] * evals[i].grad[a];
            for (std::size_t i = 0; i < palette.size(); ++i) {
                for (std::size_t a = 0; a < d; ++a)
                    for (std::size_t b = 0; b < d; ++b) {
                        hess[a * d + b] += p[i] * evals[i].hess[a * d + b];
                        hess[a * d + b] +=
                            p[i] * evals[i].grad[a] * evals[i].grad[b] / tau;
                    }
            }
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b)
                    hess[a * d + b] -= grad[a] * grad[b] / tau;

            if (norm2(grad) <= std::max(1e-12 * scale, 1e-5 * tau)) break;

            auto delta = newton_direction(hess, grad);
            const double slope = dot(grad, delta);
            double alpha = 1.0;
            bool moved = false;
            std::vector<double> cand(d);
            while (alpha >= 1e-14) {
                for (std::size_t a = 0; a < d; ++a) cand[a] = theta[a] + alpha * delta[a];
                double cmax = -std::numeric_limits<double>::infinity();
                std::vector<double> cvals(palette.size());
                for (std::size_t i = 0; i < palette.size(); ++i) {
                    cvals[i] = phi_eval(palette[i], cand, false).value;
                    if (!std::isfinite(cvals[i])) { cvals[i] = std::numeric_limits<double>::infinity(); }
                    cmax = std::max(cmax, cvals[i]);
                }
                double cz = 0.0;
                for (std::size_t i = 0; i < palette.size(); ++i)
                    cz += std::exp((cvals[i] - cmax) / tau);
                const double cf = cmax + tau * std::log(cz);
                if (std::isfinite(cf) && cf <= fval + 1e-4 * alpha * slope) {
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) break;
            theta = cand;
            if (norm2(theta) > kEscapeNorm) throw_escape(theta);
        }
    }
    return theta;
}

// Equalization polish: Newton on the stationarity system of
// min_theta max_{i in active} phi_i. Returns false when it cannot improve.
bool polish_active_set(const std::vector<MeanVector>& palette,
                       std::vector<std::size_t> active, std::vector<double>& theta,
                       double scale) {
    const std::size_t d = theta.size();
    for (int attempt = 0; attempt < 8; ++attempt) {
        const std::size_t a = active.size();
        if (a == 0) return false;
        std::vector<double> w(a, 1.0 / static_cast<double>(a));
        std::vector<double> th = theta;

        bool converged = false;
        int negative_w = -1;
        for (int iter = 0; iter < 120 && !converged; ++iter) {
            std::vector<PhiEval> evals(a);
            for (std::size_t i = 0; i < a; ++i)
                evals[i] = phi_eval(palette[active[i]], th, true);

            const std::size_t neq = (a - 1) + d + 1;
            std::vector<double> F(neq, 0.0);
            std::vector<double> J(neq * (d + a), 0.0);
            const std::size_t cols = d + a;

            for (std::size_t j = 1; j < a; ++j) {
                F[j - 1] = evals[j].value - evals[0].value;
                for (std::size_t t = 0; t < d; ++t)
                    J[(j - 1) * cols + t] = evals[j].grad[t] - evals[0].grad[t];
            }
            for (std::size_t t = 0; t < d; ++t) {
                double acc = 0.0;
                for (std::size_t j = 0; j < a; ++j) acc += w[j] * evals[j].grad[t];
                F[(a - 1) + t] = acc;
                for (std::size_t u = 0; u < d; ++u) {
                    double h = 0.0;
                    for (std::size_t j = 0; j < a; ++j) h += w[j] * evals[j].hess[t * d + u];
                    J[((a - 1) + t) * cols + u] = h;
                }
                for (std::size_t j = 0; j < a; ++j)
                    J[((a - 1) + t) * cols + d + j] = evals[j].grad[t];
            }
            F[neq - 1] = std::accumulate(w.begin(), w.end(), 0.0) - 1.0;
            for (std::size_t j = 0; j < a; ++j) J[(neq - 1) * cols + d + j] = 1.0;

            double fnorm = 0.0;
            for (double v : F) fnorm = std::max(fnorm, std::abs(v));
            if (fnorm <= 1e-13 * std::max(1.0, scale)) {
                converged = true;
                break;
            }

            // Gauss-Newton step via damped normal equations (kept solvable
            // when redundant laws make J rank-deficient)
            std::vector<double> jtj(cols * cols, 0.0);
            std::vector<double> jtf(cols, 0.0);
            for (std::size_t r = 0; r < neq; ++r) {
                for (std::size_t c1 = 0; c1 < cols; ++c1) {
                    const double jr = J[r * cols + c1];
                    if (jr == 0.0) continue;
                    jtf[c1] -= jr * F[r];
                    for (std::size_t c2 = 0; c2 < cols; ++c2)
                        jtj[c1 * cols + c2] += jr * J[r * cols + c2];
                }
            }
            double trace = 0.0;
            for (std::size_t c1 = 0; c1 < cols; ++c1) trace += jtj[c1 * cols + c1];
            const double mu = std::max(1e-16, 1e-12 * trace);
            for (std::size_t c1 = 0; c1 < cols; ++c1) jtj[c1 * cols + c1] += mu;
            auto delta = detail::lu_solve(std::move(jtj), cols, std::move(jtf));
            if (!delta) return false;

            double step = 1.0;
            for (std::size_t t = 0; t < d; ++t) th[t] += step * (*delta)[t];
            for (std::size_t j = 0; j < a; ++j) w[j] += step * (*delta)[d + j];
            // a runaway candidate is discarded, not an error: coercivity of
            // the palette max was already certified by the smoothed stage
            if (norm2(th) > kEscapeNorm) return false;
        }

        if (!converged) return false;
        for (std::size_t j = 0; j < a; ++j)
            if (w[j] < -1e-8) negative_w = static_cast<int>(j);
        if (negative_w < 0) {
            theta = th;
            return true;
        }
        active.erase(active.begin() + negative_w);
    }
    return false;
}

} // namespace

CriterionReport criterion_value(const std::vector<Site>& steps,
                                const std::vector<std::vector<double>>& palette_means,
                                double tol, double boundary_tol) {
    if (steps.empty()) throw ConfigError("criterion needs a non-empty step set");
    if (palette_means.empty()) throw ConfigError("criterion needs a non-empty palette");
    const int d = static_cast<int>(steps[0].size());

    std::vector<MeanVector> palette;
    palette.reserve(palette_means.size());
    for (const auto& m : palette_means) {
        if (m.size() != steps.size())
            throw ConfigError("palette mean length does not match the step set");
        for (double v : m)
            if (v < 0.0) throw ConfigError("palette means must be nonnegative");
        palette.push_back(MeanVector{steps, m});
    }

    // coercivity of the pointwise max is coercivity of the union support
    std::vector<Site> union_support;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        double mass = 0.0;
        for (const auto& m : palette_means) mass += m[k];
        if (mass > 0.0) union_support.push_back(steps[k]);
    }
    if (union_support.empty()) throw ConfigError("palette has empty support");
    if (auto witness = axis_witness(union_support, d))
        throw DegeneracyError(
            "palette support lies in a closed half-space; the criterion "
            "infimum is only approached at infinity",
            std::move(*witness));

    std::vector<double> theta(static_cast<std::size_t>(d), 0.0);
    const double scale = std::max(1.0, true_max(palette, theta).value);

    theta = minimize_smoothed(palette, std::move(theta), scale);
    double best_value = true_max(palette, theta).value;
    std::vector<double> best_theta = theta;

    // Polish by Newton on candidate active sets, tightest first: every
    // verified improvement of the true max is kept, so a wrong candidate
    // can never worsen the answer.
    std::vector<std::size_t> loose;
    for (std::size_t i = 0; i < palette.size(); ++i)
        if (phi_eval(palette[i], theta, false).value >= best_value - 1e-6 * scale)
            loose.push_back(i);
    std::sort(loose.begin(), loose.end(), [&](std::size_t a, std::size_t b) {
        return phi_eval(palette[a], theta, false).value >
               phi_eval(palette[b], theta, false).value;
    });

    for (std::size_t k = 1; k <= loose.size(); ++k) {
        std::vector<std::size_t> active(loose.begin(), loose.begin() + k);
        std::vector<double> polished = theta;
        bool ok = false;
        if (k == 1) {
            try {
                auto res = inf_theta(palette[active[0]], std::min(tol, 1e-10) * scale);
                polished = res.theta;
                ok = true;
            } catch (const DegeneracyError&) {
                ok = false; // a one-sided extreme law; the max is still coercive
            } catch (const ConvergenceError&) {
                ok = false;
            }
        } else {
            ok = polish_active_set(palette, active, polished, scale);
        }
        if (!ok) continue;
        const double polished_value = true_max(palette, polished).value;
        if (polished_value <= best_value) {
            best_value = polished_value;
            best_theta = polished;
        }
    }

    CriterionReport report;
    report.c = best_value;
    report.theta_star = best_theta;
    for (std::size_t i = 0; i < palette.size(); ++i)
        if (phi_eval(palette[i], best_theta, false).value >= best_value - 1e-9 * scale)
            report.active_laws.push_back(i);
    report.verdict = best_value <= 1.0 ? Verdict::Transient : Verdict::StronglyRecurrent;
    report.boundary_flag = std::abs(best_value - 1.0) < boundary_tol;
    return report;
}

CriterionReport criterion_value(const EnvironmentSpec& spec, double tol,
                                double boundary_tol) {
    spec.validate();
    std::vector<std::vector<double>> means;
    means.reserve(spec.palette.size());
    for (const auto& law : spec.palette) means.push_back(law.mean());
    return criterion_value(spec.generator.steps, means, tol, boundary_tol);
}

CrossCheckReport classify_cross_check(const EnvironmentSpec& spec,
                                      std::span<const std::int64_t> schedule,
                                      double tol, std::uint64_t seed) {
    CrossCheckReport report;
    report.criterion = criterion_value(spec);
    if (schedule.empty()) throw ConfigError("cross-check needs a window schedule");

    auto spec_ptr = std::make_shared<EnvironmentSpec>(spec);
    const std::int64_t max_radius = *std::max_element(schedule.begin(), schedule.end());
    const auto window = Box::centered(spec.generator.dimension, max_radius);
    auto env = spec.palette.size() == 1
                   ? homogeneous_realization(spec_ptr, window)
                   : sample_environment(spec_ptr, window, seed);

    auto estimates = spectral_radius_sup(env, schedule, tol, 2000000);
    const double slack = std::max(1e-6, 10.0 * tol);
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& est : estimates) {
        CrossCheckRow row;
        row.window_radius = est.window_radius;
        row.estimate = est.value;
        row.gap = report.criterion.c - est.value;
        report.max_gap = std::max(report.max_gap, row.gap);
        if (est.value < prev - slack) report.monotone = false;
        if (est.value > report.criterion.c + slack) report.bounded_by_c = false;
        prev = est.value;
        report.rows.push_back(row);
    }
    return report;
}

CtBrwResult ct_brw_critical_lambda(const MomentKernel& adjacency, double tol) {
    if (!adjacency.is_irreducible())
        throw DegeneracyError("graph must be connected");
    auto est = spectral_radius_window(adjacency, tol, 1000000);
    if (!est.converged)
        throw ConvergenceError("adjacency power iteration did not converge");
    if (!(est.value > 0.0))
        throw DegeneracyError("adjacency spectral radius must be positive");
    return {est.value, 1.0 / est.value};
}

CriticalBranchingResult independent_branching_critical_m(
    const GeneratorSet& generator, const SiteLaw& walk_law,
    std::span<const std::int64_t> schedule, double tol) {
    const double total = walk_law.total_mean();
    if (std::abs(total - 1.0) > 1e-9)
        throw ConfigError("walk law must be row-stochastic (means summing to 1)");

    CriticalBranchingResult res;
    res.estimates = spectral_radius_sup(generator, walk_law, schedule, tol, 2000000);
    res.rho = res.estimates.back().value;
    if (!(res.rho > 0.0))
        throw DegeneracyError("walk spectral radius must be positive");
    res.critical_m = 1.0 / res.rho;
    return res;
}

} // namespace bmclab
