#pragma once

#include <span>
#include <string_view>

#include "sep/dynamics/gillespie.hpp"
#include "sep/dynamics/stirring.hpp"

namespace sep::dynamics {

/// Two independent routes to the same laws: arrows of the stirring
/// construction (with thinning for annihilation) or direct simulation of the
/// generator.
enum class Engine { stirring, gillespie };

std::string_view engine_name(Engine e);
Engine parse_engine(std::string_view name);

/// Number of stirring channels the graphical construction of `p` consumes.
int stirring_channels(Process p);

/// Snapshots of process `p` from `init` at the observation times (sorted,
/// within [0, horizon]). Pure function of (inputs, seed).
Trajectory<AnyState> run_process(Process p, Engine engine, const AnyState& init, double horizon,
                                 std::span<const double> obs, Seed seed);

}  // namespace sep::dynamics
