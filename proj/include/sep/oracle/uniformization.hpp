#pragma once

#include <span>
#include <vector>

#include "sep/oracle/generator.hpp"

namespace sep::oracle {

using Distribution = std::vector<double>;

/// Truncation target for the Poisson weights: the dropped tail mass bounds
/// the total-variation error of the result.
inline constexpr double kUniformizationTail = 1e-13;

/// d0 e^{tQ} by uniformization at rate max exit rate. The matrix-vector step
/// runs as an OpenMP gather over target states; `workers` <= 0 uses the
/// runtime default.
Distribution evolve_exact(const GeneratorMatrix& Q, std::span<const double> d0, double t, int workers = 0);

/// Single-threaded reference of evolve_exact; bitwise identical output.
Distribution evolve_exact_serial(const GeneratorMatrix& Q, std::span<const double> d0, double t);

Distribution point_mass(std::size_t size, std::size_t state);
double total_variation(std::span<const double> a, std::span<const double> b);

/// Poisson(mean) weights 0..K with K the first index past the mean whose
/// cumulative mass reaches 1 - tail.
std::vector<double> poisson_weights(double mean, double tail);

}  // namespace sep::oracle
