#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nlks/comparison.hpp"
#include "nlks/diagnostics.hpp"
#include "nlks/elliptic.hpp"
#include "nlks/error.hpp"
#include "nlks/grid.hpp"
#include "nlks/params.hpp"
#include "nlks/reaction.hpp"
#include "nlks/state.hpp"

namespace nlks {

/**
 * Conservative upwind discretization of the transport term -chi div(u^m grad c).
 *
 * On each interior face the flux is chi * u_up^m * dc/dn, with dc/dn the
 * central difference across the face and u_up taken from the cell the flux
 * leaves (the side with lower c). Boundary faces carry no flux, so the
 * weighted sum of the result telescopes to zero.
 */
inline Field chemotactic_divergence(const Field& u, const Field& c, double chi, double m) {
    require_same_grid(u, c);
    require_finite(u, "cell density");
    require_finite(c, "chemoattractant");
    const Grid& g = u.grid;
    Field out(g);
    if (chi == 0.0) return out;

    auto face = [&](std::size_t k, std::size_t nb, double h) {
        const double grad = (c[nb] - c[k]) / h;
        const double up = grad > 0.0 ? u[k] : u[nb];
        const double flux = chi * detail::pos_pow(up, m) * grad / h;
        out[k] -= flux;
        out[nb] += flux;
    };
    const double hx = g.spacing(0);
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i + 1 < g.nx(); ++i) face(g.index(i, j), g.index(i + 1, j), hx);
    }
    if (g.dim() == 2) {
        const double hy = g.spacing(1);
        for (std::size_t j = 0; j + 1 < g.ny(); ++j) {
            for (std::size_t i = 0; i < g.nx(); ++i) face(g.index(i, j), g.index(i, j + 1), hy);
        }
    }
    return out;
}

/// Largest face speed chi * m * u^(m-1) |dc/dn|, with u the larger neighbour.
inline double max_chemotactic_speed(const Field& u, const Field& c, double chi, double m) {
    const Grid& g = u.grid;
    double vmax = 0.0;
    auto face = [&](std::size_t k, std::size_t nb, double h) {
        const double grad = std::abs(c[nb] - c[k]) / h;
        const double uf = std::max(u[k], u[nb]);
        vmax = std::max(vmax, chi * m * detail::pos_pow(uf, m - 1.0) * grad);
    };
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i + 1 < g.nx(); ++i) face(g.index(i, j), g.index(i + 1, j), g.spacing(0));
    }
    if (g.dim() == 2) {
        for (std::size_t j = 0; j + 1 < g.ny(); ++j) {
            for (std::size_t i = 0; i < g.nx(); ++i) face(g.index(i, j), g.index(i, j + 1), g.spacing(1));
        }
    }
    return vmax;
}

/// Builds a consistent initial state (c from u0) without stepping.
inline SimState make_state(const Field& u0, const Params& params, const HelmholtzSolver& solver) {
    require_finite(u0, "initial datum");
    if (u0.min() < 0.0) throw InvalidArgument("initial datum must be nonnegative");
    SimState s;
    s.u = u0;
    s.c = chemoattractant(solver, u0, params.gamma);
    s.dt = params.numerical.dt_initial;
    return s;
}

/**
 * One IMEX step of size state.dt:
 *   E = -chi div(u^m grad c) + lambda f(u)           (explicit, at t_n)
 *   (I - dt Lap_h) u* = u + dt E                     (backward Euler)
 *   (I - dt/2 Lap_h) u* = u + dt/2 Lap_h u + dt E    (Crank-Nicolson option)
 *   u_{n+1} = max(u*, 0), c_{n+1} from u_{n+1}
 * The nonlocal factor is evaluated once at t_n.
 */
inline SimState imex_step(const SimState& state, const Params& params, const HelmholtzSolver& solver) {
    const double dt = state.dt;
    if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
    const Field& u = state.u;

    const double factor = nonlocal_factor(u, params.reaction);
    Field rhs = chemotactic_divergence(u, state.c, params.chi, params.m);
    const Field source = reaction_term(u, params.reaction, factor);
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += source[k];
    if (!all_finite(rhs)) {
        throw SolverFailure("explicit increment is not finite at t = " + std::to_string(state.t),
                            std::numeric_limits<double>::infinity());
    }

    double implicit_weight = dt;
    if (params.numerical.diffusion == DiffusionScheme::CrankNicolson) {
        implicit_weight = 0.5 * dt;
        const Field lap = laplacian_neumann(u);
        for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = u[k] + 0.5 * dt * lap[k] + dt * rhs[k];
    } else {
        for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = u[k] + dt * rhs[k];
    }

    SimState next;
    next.u = solver.solve(rhs, 1.0, implicit_weight);
    double clamped = 0.0;
    for (double& v : next.u.values) {
        if (v < 0.0) {
            clamped -= v;
            v = 0.0;
        }
    }
    clamped *= u.grid.cell_measure();
    next.c = chemoattractant(solver, next.u, params.gamma);
    next.t = state.t + dt;
    next.dt = dt;
    next.step_count = state.step_count + 1;
    next.last_clamp = clamped;
    next.clamped_mass = state.clamped_mass + clamped;
    return next;
}

/**
 * Next step size: cfl_safety * min(h / max speed, 1 / (lambda L), dt_max),
 * where L is the source's Lipschitz estimate. Not clamped from below; the
 * caller decides what a step under dt_min means.
 */
inline double adapt_dt(const SimState& state, const Params& params) {
    const auto& num = params.numerical;
    const double inf = std::numeric_limits<double>::infinity();
    const double speed = max_chemotactic_speed(state.u, state.c, params.chi, params.m);
    const double advective = speed > 0.0 ? state.u.grid.min_spacing() / speed : inf;
    const double factor = nonlocal_factor(state.u, params.reaction);
    const double lip = reaction_lipschitz(state.u, params.reaction, factor);
    const double reactive = lip > 0.0 ? 1.0 / lip : inf;
    return num.cfl_safety * std::min({advective, reactive, num.dt_max});
}

struct RunStatus {
    enum class Kind { Completed, BlowUp, SolverFailure };
    Kind kind = Kind::Completed;
    double time = 0.0;
    std::string message;

    friend bool operator==(const RunStatus&, const RunStatus&) = default;
};

inline std::string_view to_string(RunStatus::Kind k) {
    switch (k) {
        case RunStatus::Kind::Completed: return "completed";
        case RunStatus::Kind::BlowUp: return "blow_up";
        case RunStatus::Kind::SolverFailure: return "solver_failure";
    }
    return "completed";
}

struct RunStats {
    std::size_t steps = 0;
    double dt_first = 0.0;
    double dt_smallest = 0.0;
    double dt_last = 0.0;
    double sup_linf = 0.0;
    double initial_mass = 0.0;
    double blow_up_threshold = 0.0;
    double max_relative_mass_drift = 0.0;  // |pre-clamp mass - initial| / initial, worst step

    friend bool operator==(const RunStats&, const RunStats&) = default;
};

struct RunRecord {
    std::vector<DiagnosticsRow> rows;
    RunStatus status;
    RunStats stats;
};

/**
 * Marches u0 to t_final, or until blow-up is detected:
 *  - sup u exceeds blow_up_threshold, or
 *  - the step controller asks for dt < dt_min while sup u is still growing.
 * When `comparison` is given the super/sub pair is advanced with the same
 * steps and recorded next to the PDE diagnostics.
 */
inline RunRecord run_simulation(const Field& u0, const Params& params,
                                std::optional<ComparisonState> comparison = std::nullopt) {
    params.validate();
    const auto& num = params.numerical;
    const HelmholtzSolver solver(u0.grid, num.solver_tolerance);
    RunRecord rec;
    SimState state = make_state(u0, params, solver);

    const double threshold =
        num.blow_up_threshold.value_or(1e6 * std::max(params.xi(), u0.max()));
    rec.stats.blow_up_threshold = threshold;
    rec.stats.initial_mass = integral(u0);
    rec.stats.sup_linf = u0.max();
    rec.rows.push_back(record(state, comparison, params));

    double prev_linf = u0.max();
    double prev_dt = num.dt_initial;
    double next_record = num.record_interval;
    bool first = true;

    auto stop = [&](RunStatus::Kind kind, std::string msg) {
        rec.status = {kind, state.t, std::move(msg)};
    };

    while (state.t < num.t_final) {
        if (state.step_count >= num.max_steps) {
            stop(RunStatus::Kind::SolverFailure, "step limit reached");
            break;
        }
        double dt = std::min(adapt_dt(state, params), first ? num.dt_initial : 2.0 * prev_dt);
        if (dt < num.dt_min) {
            if (state.u.max() > prev_linf) {
                stop(RunStatus::Kind::BlowUp, "dt_collapse");
                break;
            }
            dt = num.dt_min;
        }
        bool last = false;
        if (num.t_final - state.t <= dt) {
            dt = num.t_final - state.t;
            last = true;
        }
        state.dt = dt;
        prev_linf = state.u.max();
        try {
            state = imex_step(state, params, solver);
            if (comparison) comparison = advance_comparison(*comparison, params, dt);
        } catch (const SolverFailure& e) {
            stop(RunStatus::Kind::SolverFailure, e.what());
            break;
        } catch (const IntegratorFailure& e) {
            stop(RunStatus::Kind::SolverFailure, e.what());
            break;
        }
        if (last) {
            state.t = num.t_final;
            if (comparison) comparison->t = num.t_final;
        }

        auto& st = rec.stats;
        if (first) {
            st.dt_first = dt;
            st.dt_smallest = dt;
        }
        if (!last) st.dt_smallest = std::min(st.dt_smallest, dt);
        st.dt_last = dt;
        st.steps = state.step_count;
        const double linf = state.u.max();
        st.sup_linf = std::max(st.sup_linf, linf);
        if (st.initial_mass > 0.0) {
            const double pre_clamp = integral(state.u) - state.clamped_mass;
            st.max_relative_mass_drift = std::max(
                st.max_relative_mass_drift, std::abs(pre_clamp - st.initial_mass) / st.initial_mass);
        }
        prev_dt = dt;
        first = false;

        if (!(linf <= threshold)) {
            rec.rows.push_back(record(state, comparison, params));
            stop(RunStatus::Kind::BlowUp, "threshold");
            return rec;
        }
        if (num.record_interval == 0.0 || last || state.t >= next_record) {
            rec.rows.push_back(record(state, comparison, params));
            while (num.record_interval > 0.0 && next_record <= state.t) next_record += num.record_interval;
        }
    }
    if (rec.status.kind != RunStatus::Kind::Completed) {
        if (rec.rows.back().t != state.t && all_finite(state.u)) {
            rec.rows.push_back(record(state, comparison, params));
        }
        return rec;
    }
    rec.status = {RunStatus::Kind::Completed, state.t, ""};
    return rec;
}

}  // namespace nlks
