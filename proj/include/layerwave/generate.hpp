#pragma once

// Seeded random generic models for fixtures and tests.

#include <cstdint>
#include <optional>

#include "layerwave/core.hpp"
#include "layerwave/scalar.hpp"

namespace layerwave {

struct GenerateOptions {
    std::size_t layers = 1;
    std::uint64_t seed = 0;
    /// Smallest accepted gap between distinct lattice arrival times.
    double margin_floor = 1e-9;
    double refl_low = 0.05;
    double refl_high = 0.8;
    double tau_low = 0.1;
    double tau_high = 2.0;
    /// tau is rounded to 1/tau_grid and R to 1/refl_grid, so the float and
    /// rational versions of a fixture are the same numbers.
    std::int64_t tau_grid = 1'000'000'000;
    std::int64_t refl_grid = 1'000'000;
    /// Optional bounds on the size of the lattice set; draws outside are
    /// resampled.
    std::optional<std::size_t> min_lattice;
    std::optional<std::size_t> max_lattice;
    std::size_t max_attempts = 1000;
};

/// Draws tau uniformly in [tau_low, tau_high] and |R| uniformly in
/// [refl_low, refl_high] with random signs until the model is generic with
/// margin >= margin_floor. Throws GuardError when the attempts run out.
template <Scalar T>
Model<T> gen_random_generic(const GenerateOptions& options);

}  // namespace layerwave
