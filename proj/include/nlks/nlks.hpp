#pragma once

#include "nlks/comparison.hpp"
#include "nlks/config.hpp"
#include "nlks/diagnostics.hpp"
#include "nlks/dynamics.hpp"
#include "nlks/elliptic.hpp"
#include "nlks/error.hpp"
#include "nlks/grid.hpp"
#include "nlks/io.hpp"
#include "nlks/params.hpp"
#include "nlks/reaction.hpp"
#include "nlks/regimes.hpp"
#include "nlks/scenarios.hpp"
#include "nlks/state.hpp"
