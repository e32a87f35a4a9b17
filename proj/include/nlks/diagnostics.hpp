#pragma once

#include <cmath>
#include <optional>
#include <span>

#include "nlks/comparison.hpp"
#include "nlks/grid.hpp"
#include "nlks/params.hpp"
#include "nlks/reaction.hpp"
#include "nlks/state.hpp"

namespace nlks {

/// One recorded time level. Column order matches the CSV header.
struct DiagnosticsRow {
    double t = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double lk = 0.0;
    double linf = 0.0;
    double min_u = 0.0;
    double dist_u = 0.0;  // max |u - xi|
    double dist_c = 0.0;  // max |c - xi^gamma|
    double nonlocal_factor = 0.0;
    std::optional<double> ubar;
    std::optional<double> ulow;
    double clamped_mass = 0.0;

    friend bool operator==(const DiagnosticsRow&, const DiagnosticsRow&) = default;
};

inline DiagnosticsRow record(const SimState& state, const std::optional<ComparisonState>& comp,
                             const Params& params) {
    require_finite(state.u, "cell density");
    require_finite(state.c, "chemoattractant");
    const double xi = params.xi();
    const double xi_c = std::pow(xi, params.gamma);
    DiagnosticsRow row;
    row.t = state.t;
    row.l1 = lk_norm(state.u, 1.0);
    row.l2 = lk_norm(state.u, 2.0);
    row.lk = lk_norm(state.u, params.numerical.lk_order);
    row.linf = lk_norm(state.u, kInfNorm);
    row.min_u = state.u.min();
    for (double v : state.u.values) row.dist_u = std::max(row.dist_u, std::abs(v - xi));
    for (double v : state.c.values) row.dist_c = std::max(row.dist_c, std::abs(v - xi_c));
    row.nonlocal_factor = nonlocal_factor(state.u, params.reaction);
    if (comp) {
        row.ubar = comp->upper();
        row.ulow = comp->lower();
    }
    row.clamped_mass = state.clamped_mass;
    return row;
}

/// Rows where min u < ulow - eps or max u > ubar + eps.
inline std::size_t sandwich_violations(std::span<const DiagnosticsRow> rows, double eps) {
    std::size_t bad = 0;
    for (const auto& r : rows) {
        if (!r.ubar || !r.ulow) continue;
        if (r.min_u < *r.ulow - eps || r.linf > *r.ubar + eps) ++bad;
    }
    return bad;
}

/// Sup-norm history split at the run's midpoint time.
struct BoundednessSummary {
    double sup_linf = 0.0;             // over the whole run
    double linf_at_half = 0.0;         // first recorded value at or after t_end / 2
    double sup_linf_final_half = 0.0;  // over t >= t_end / 2
    bool grows_in_final_half = false;  // sup over the final half exceeds its start by > tol
};

inline BoundednessSummary boundedness(std::span<const DiagnosticsRow> rows, double tol) {
    BoundednessSummary b;
    if (rows.empty()) return b;
    const double half = 0.5 * rows.back().t;
    bool started = false;
    for (const auto& r : rows) {
        b.sup_linf = std::max(b.sup_linf, r.linf);
        if (r.t >= half) {
            if (!started) {
                b.linf_at_half = r.linf;
                started = true;
            }
            b.sup_linf_final_half = std::max(b.sup_linf_final_half, r.linf);
        }
    }
    b.grows_in_final_half = b.sup_linf_final_half > b.linf_at_half + tol;
    return b;
}

}  // namespace nlks
