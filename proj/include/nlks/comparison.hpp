#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "nlks/error.hpp"
#include "nlks/grid.hpp"
#include "nlks/params.hpp"

namespace nlks {

struct Equilibrium {
    double xi = 1.0;
};

inline Equilibrium equilibrium(double sigma, double beta) {
    if (!(sigma > 0.0)) throw InvalidArgument("equilibrium needs sigma > 0");
    if (!(beta > 1.0)) throw InvalidArgument("equilibrium needs beta > 1");
    return {std::pow(sigma, -1.0 / beta)};
}

/**
 * Spatially homogeneous super/sub-solution pair.
 *
 * Stored as log ratios, upper = xi exp(upper_log) and lower = xi exp(-lower_log).
 * The gaps keep full relative precision as the pair closes in on xi, and the
 * lower value keeps it as it decays towards 0. Ordering 0 < lower < xi < upper
 * is equivalent to upper_log > 0 and lower_log > 0.
 */
struct ComparisonState {
    double xi = 1.0;
    double upper_log = 0.0;
    double lower_log = 0.0;
    double t = 0.0;

    static ComparisonState from_values(double upper, double lower, double xi, double t = 0.0) {
        return {xi, std::log1p((upper - xi) / xi), -std::log1p((lower - xi) / xi), t};
    }
    static ComparisonState from_gaps(double xi, double upper_gap, double lower_gap, double t = 0.0) {
        return {xi, std::log1p(upper_gap / xi), -std::log1p(-lower_gap / xi), t};
    }

    double upper() const noexcept { return xi * std::exp(upper_log); }
    double lower() const noexcept { return xi * std::exp(-lower_log); }
    double upper_gap() const noexcept { return xi * std::expm1(upper_log); }
    double lower_gap() const noexcept { return -xi * std::expm1(-lower_log); }
    double gap() const noexcept { return upper_gap() + lower_gap(); }

    bool strictly_ordered() const noexcept {
        return std::isfinite(upper_log) && std::isfinite(lower_log) && upper_log > 0.0 && lower_log > 0.0;
    }
    bool at_equilibrium() const noexcept { return upper_log == 0.0 && lower_log == 0.0; }
};

/// Bookkeeping for the ODE convergence conditions.
struct ConvergenceConditions {
    double delta_low = 0.0;    // max(alpha - 1, gamma + m - 1)
    double delta_high = 0.0;   // alpha + beta - 1
    double rate_margin = 0.0;  // lambda - 2 chi
    bool exponents_ok = false; // alpha + beta >= gamma + m
    bool holds = false;
};

inline ConvergenceConditions convergence_conditions(const Params& p) {
    const auto& r = p.reaction;
    ConvergenceConditions c;
    c.delta_low = std::max(r.alpha - 1.0, p.gamma + p.m - 1.0);
    c.delta_high = r.alpha + r.beta - 1.0;
    c.rate_margin = r.lambda - 2.0 * p.chi;
    c.exponents_ok = r.alpha + r.beta >= p.gamma + p.m;
    c.holds = c.exponents_ok && c.rate_margin > 0.0;
    return c;
}

/// Right-hand side (upper', lower') of the comparison ODE by direct substitution.
inline std::pair<double, double> comparison_rhs(double upper, double lower, const Params& p) {
    if (!(upper > 0.0) || !(lower > 0.0)) {
        throw InvalidArgument("comparison state must be positive");
    }
    const auto& r = p.reaction;
    const double xi_b = 1.0 / r.sigma;  // xi^beta
    const double ug = std::pow(upper, p.gamma);
    const double lg = std::pow(lower, p.gamma);
    const double du = p.chi * std::pow(upper, p.m) * (ug - lg) +
                      r.lambda * r.sigma * std::pow(upper, r.alpha) * (xi_b - std::pow(upper, r.beta));
    const double dl = p.chi * std::pow(lower, p.m) * (lg - ug) +
                      r.lambda * r.sigma * std::pow(lower, r.alpha) * (xi_b - std::pow(lower, r.beta));
    return {du, dl};
}

inline std::pair<double, double> comparison_rhs(const ComparisonState& s, const Params& p) {
    return comparison_rhs(s.upper(), s.lower(), p);
}

namespace detail {

// The same system for the log ratios: upper_log' = upper'/upper, lower_log' = -lower'/lower.
inline std::pair<double, double> log_rhs(double wu, double wl, double xi, const Params& p) {
    const auto& r = p.reaction;
    // (upper^gamma - lower^gamma) / xi^gamma
    const double gdiff = std::expm1(p.gamma * wu) - std::expm1(-p.gamma * wl);
    const double chem = p.chi * std::pow(xi, p.m + p.gamma - 1.0) * gdiff;
    const double react = r.lambda * std::pow(xi, r.alpha - 1.0);
    // sigma (xi^beta - v^beta) = -expm1(beta log(v / xi)), since sigma xi^beta = 1
    const double du = chem * std::exp((p.m - 1.0) * wu) - react * std::exp((r.alpha - 1.0) * wu) * std::expm1(r.beta * wu);
    const double dl = chem * std::exp(-(p.m - 1.0) * wl) +
                      react * std::exp(-(r.alpha - 1.0) * wl) * std::expm1(-r.beta * wl);
    return {du, dl};
}

inline ComparisonState rk4_step(const ComparisonState& s, const Params& p, double dt) {
    const double xi = s.xi;
    const auto [k1u, k1l] = log_rhs(s.upper_log, s.lower_log, xi, p);
    const auto [k2u, k2l] = log_rhs(s.upper_log + 0.5 * dt * k1u, s.lower_log + 0.5 * dt * k1l, xi, p);
    const auto [k3u, k3l] = log_rhs(s.upper_log + 0.5 * dt * k2u, s.lower_log + 0.5 * dt * k2l, xi, p);
    const auto [k4u, k4l] = log_rhs(s.upper_log + dt * k3u, s.lower_log + dt * k3l, xi, p);
    ComparisonState next = s;
    next.upper_log += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    next.lower_log += dt / 6.0 * (k1l + 2.0 * k2l + 2.0 * k3l + k4l);
    next.t += dt;
    return next;
}

// Rough Lipschitz bound of the comparison system at the current upper value.
inline double comparison_stiffness(const ComparisonState& s, const Params& p) {
    const auto& r = p.reaction;
    const double u = std::max(s.upper(), s.xi);
    if (!std::isfinite(u)) return std::numeric_limits<double>::infinity();
    const double chem = p.chi * (p.m + p.gamma) * std::pow(u, p.m + p.gamma - 1.0);
    const double react = r.lambda * (r.alpha * std::pow(u, r.alpha - 1.0) *
                                         std::abs(1.0 - r.sigma * std::pow(u, r.beta)) +
                                     r.beta * std::pow(u, r.alpha + r.beta - 1.0) * r.sigma);
    return chem + react;
}

}  // namespace detail

/**
 * Initial super/sub values bracketing u0 and xi with a relative margin:
 * upper = max(max u0, xi)(1 + margin), lower = min(min u0, xi)(1 - margin).
 */
inline ComparisonState make_initial(const Field& u0, double xi, double margin = 0.01) {
    require_finite(u0, "initial datum");
    if (!(margin > 0.0 && margin < 1.0)) throw InvalidArgument("margin must lie in (0, 1)");
    if (!(xi > 0.0)) throw InvalidArgument("equilibrium must be positive");
    const double lo = u0.min();
    if (!(lo > 0.0)) {
        throw InvalidArgument("comparison needs min u0 > 0 (a positive lower bound on the initial datum)");
    }
    const double upper = std::max(u0.max(), xi) * (1.0 + margin);
    const double lower = std::min(lo, xi) * (1.0 - margin);
    return ComparisonState::from_values(upper, lower, xi);
}

/**
 * Advances the pair by dt with as many RK4 substeps as its stiffness
 * demands. Retries with twice the substeps (up to 6 times) if the ordering
 * breaks; throws IntegratorFailure if it never holds.
 */
inline ComparisonState advance_comparison(const ComparisonState& s, const Params& p, double dt) {
    if (s.at_equilibrium()) {
        ComparisonState out = s;
        out.t += dt;
        return out;
    }
    const double stiff = detail::comparison_stiffness(s, p);
    std::size_t substeps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(dt * stiff / 0.1)));
    for (int attempt = 0; attempt <= 6; ++attempt, substeps *= 2) {
        ComparisonState cur = s;
        const double h = dt / static_cast<double>(substeps);
        bool ok = true;
        for (std::size_t i = 0; i < substeps && ok; ++i) {
            cur = detail::rk4_step(cur, p, h);
            ok = cur.strictly_ordered();
        }
        if (ok) {
            cur.t = s.t + dt;
            return cur;
        }
    }
    throw IntegratorFailure("comparison ODE lost its ordering at t = " + std::to_string(s.t));
}

struct ComparisonTrajectory {
    std::vector<ComparisonState> points;
    double dt = 0.0;        // step actually used
    int halvings = 0;
};

/**
 * Fixed-step classical RK4 for the comparison system on [0, t_final].
 *
 * If 0 < lower < xi < upper fails at any step the whole run is repeated with
 * half the step, at most 6 times. Every stride-th state (and the final one) is
 * stored.
 */
inline ComparisonTrajectory integrate_comparison(const ComparisonState& s0, const Params& p,
                                                 double t_final, double dt,
                                                 std::size_t stride = 1) {
    if (!(t_final > 0.0) || !(dt > 0.0)) throw InvalidArgument("t_final and dt must be positive");
    if (stride == 0) throw InvalidArgument("stride must be positive");
    ComparisonTrajectory traj;
    if (s0.at_equilibrium()) {
        traj.dt = dt;
        traj.points = {s0, ComparisonState{s0.xi, 0.0, 0.0, s0.t + t_final}};
        return traj;
    }
    if (!s0.strictly_ordered()) {
        throw InvalidArgument("comparison ODE needs 0 < lower(0) < xi < upper(0)");
    }
    constexpr int kMaxHalvings = 6;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
        const double h = dt / std::ldexp(1.0, halving);
        const auto steps = static_cast<std::size_t>(std::ceil(t_final / h - 1e-9));
        const double step = t_final / static_cast<double>(steps);
        traj.points.clear();
        traj.points.push_back(s0);
        ComparisonState cur = s0;
        bool ok = true;
        for (std::size_t i = 1; i <= steps; ++i) {
            cur = detail::rk4_step(cur, p, step);
            cur.t = s0.t + static_cast<double>(i) * step;
            if (!cur.strictly_ordered()) {
                ok = false;
                break;
            }
            if (i % stride == 0 || i == steps) traj.points.push_back(cur);
        }
        if (ok) {
            traj.dt = step;
            traj.halvings = halving;
            return traj;
        }
    }
    throw IntegratorFailure("comparison ODE ordering violated after 6 step halvings");
}

/**
 * Exponential decay rate of the gap upper - lower: least-squares slope of
 * log(gap) against t over the second half of the trajectory. Returns nullopt
 * when the gap does not decrease there or is not positive.
 */
inline std::optional<double> estimate_rate(const ComparisonTrajectory& traj) {
    const auto& pts = traj.points;
    if (pts.size() < 4) return std::nullopt;
    const std::size_t first = pts.size() / 2;
    const std::size_t count = pts.size() - first;
    if (!(pts.back().gap() < pts[first].gap())) return std::nullopt;
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = first; i < pts.size(); ++i) {
        const double g = pts[i].gap();
        if (!(g > 0.0) || !std::isfinite(g)) return std::nullopt;
        const double t = pts[i].t;
        const double y = std::log(g);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double n = static_cast<double>(count);
    const double denom = n * stt - st * st;
    if (!(denom > 0.0)) return std::nullopt;
    return (n * sty - st * sy) / denom;
}

}  // namespace nlks
