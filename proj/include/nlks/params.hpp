#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "nlks/error.hpp"
#include "nlks/reaction.hpp"

namespace nlks {

enum class DiffusionScheme { BackwardEuler, CrankNicolson };

/// Step-size, stopping and solver controls for a run.
struct NumericalControls {
    double dt_initial = 1e-4;
    double dt_min = 1e-12;
    double dt_max = 1e-2;
    double cfl_safety = 0.4;
    std::optional<double> blow_up_threshold;  // default: 1e6 * max(xi, sup u0)
    double t_final = 1.0;
    double record_interval = 0.0;  // 0 records every step
    double lk_order = 4.0;
    double solver_tolerance = 1e-10;
    std::size_t max_steps = 50'000'000;
    DiffusionScheme diffusion = DiffusionScheme::BackwardEuler;

    void validate() const {
        if (!(dt_min > 0.0) || !(dt_min < dt_initial) || !(dt_initial <= dt_max)) {
            throw InvalidArgument("time steps must satisfy 0 < dt_min < dt_initial <= dt_max");
        }
        if (!(cfl_safety > 0.0 && cfl_safety < 1.0)) {
            throw InvalidArgument("cfl_safety must lie in (0, 1)");
        }
        if (!(t_final > 0.0) || !std::isfinite(t_final)) {
            throw InvalidArgument("t_final must be positive and finite");
        }
        if (blow_up_threshold && !(*blow_up_threshold > 0.0)) {
            throw InvalidArgument("blow_up_threshold must be positive");
        }
        if (!(record_interval >= 0.0)) throw InvalidArgument("record_interval must be >= 0");
        if (!(lk_order >= 1.0)) throw InvalidArgument("lk_order must be >= 1");
        if (!(solver_tolerance > 0.0)) throw InvalidArgument("solver_tolerance must be positive");
        if (max_steps == 0) throw InvalidArgument("max_steps must be positive");
    }
};

/**
 * Full parameter vector of the chemotaxis model
 *
 *   u_t = Lap u - chi div(u^m grad c) + lambda u^alpha (1 - sigma avg u^beta)
 *   -Lap c + c = u^gamma
 *
 * plus numerical controls. `n` is the analytic space dimension used by the
 * regime classifier; the simulated dimension is the grid's.
 */
struct Params {
    int n = 3;
    double chi = 1.0;
    double m = 1.0;
    double gamma = 1.0;
    ReactionParams reaction;
    NumericalControls numerical;

    double xi() const { return reaction.equilibrium(); }

    /// Range checks for simulation. chi = 0 and lambda = 0 are allowed here
    /// (pure diffusion / no source); the classifier demands both positive.
    void validate() const {
        if (n < 3) throw InvalidArgument("n = " + std::to_string(n) + " violates n >= 3");
        if (!(chi >= 0.0) || !std::isfinite(chi)) throw InvalidArgument("chi must be >= 0");
        if (!(m >= 1.0) || !std::isfinite(m)) {
            throw InvalidArgument("m = " + std::to_string(m) + " violates m >= 1");
        }
        if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
            throw InvalidArgument("gamma = " + std::to_string(gamma) + " violates gamma >= 1");
        }
        reaction.validate();
        numerical.validate();
    }
};

}  // namespace nlks
