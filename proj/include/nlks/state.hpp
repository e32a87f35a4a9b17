#pragma once

#include <cstddef>

#include "nlks/grid.hpp"

namespace nlks {

/// Snapshot of a run: cell density u and its chemoattractant c at time t.
struct SimState {
    double t = 0.0;
    Field u;
    Field c;
    double dt = 0.0;  // step that will be attempted next
    std::size_t step_count = 0;
    double clamped_mass = 0.0;  // mass added by clamping negative undershoots, cumulative
    double last_clamp = 0.0;    // same, last step only
};

}  // namespace nlks
