#pragma once

// Controlled damage to clean data: decimation, spurious arrivals, additive
// sine distortion and a collective time shift.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "layerwave/core.hpp"
#include "layerwave/scalar.hpp"

namespace layerwave {

/// Keeps the arrivals with |alpha| >= threshold, in order. Throws
/// AlgorithmError when nothing survives.
template <Scalar T>
Data<T> decimate(const Data<T>& data, const T& threshold);

/// Merges extra arrivals into the data. Each time must differ from every
/// existing arrival (and every other new one) by more than guard_tol.
template <Scalar T>
Data<T> add_spurious(const Data<T>& data, const std::vector<RawTerm<T>>& points, const T& guard_tol);

struct SpuriousDraw {
    std::size_t count = 0;
    std::uint64_t seed = 0;
    /// Magnitudes are uniform in this range, signs are random.
    double min_amplitude = 0.01;
    double max_amplitude = 0.2;
    /// Times and amplitudes are rounded to 1/grid.
    std::int64_t grid = 1'000'000'000;
    std::size_t max_attempts = 100'000;
};

/// Random arrivals strictly inside (sigma_1, sigma_d), each farther than
/// guard_tol from the data and from one another. Sorted by time.
template <Scalar T>
std::vector<RawTerm<T>> random_spurious(const Data<T>& data, const SpuriousDraw& draw, const T& guard_tol);

struct SineWave {
    double amplitude = 0.0;
    double t_a = 0.0;
    double t_b = 0.0;
    double omega = 6.283185307179586;
    double phase = 0.0;
};

/// alpha_j += A sin(omega sigma_j + phase) for sigma_j in [t_a, t_b]. The sine
/// is evaluated in double precision; in rational mode its exact binary value
/// is added. Arrivals that become exactly zero are dropped.
template <Scalar T>
Data<T> sine_distort(const Data<T>& data, const SineWave& wave);

/// sigma_j += kappa. Throws ValidationError if sigma_1 + kappa <= 0.
template <Scalar T>
Data<T> shift_times(const Data<T>& data, const T& kappa);

template <Scalar T>
struct PerturbSpec {
    std::optional<T> decimate_threshold;
    std::vector<RawTerm<T>> spurious;
    std::optional<SpuriousDraw> spurious_draw;
    T guard_tol{};
    std::optional<SineWave> sine;
    std::optional<T> shift;
};

/// Applies decimation, spurious arrivals (listed, then drawn), distortion and
/// shift in that order.
template <Scalar T>
Data<T> perturb(const Data<T>& data, const PerturbSpec<T>& spec);

}  // namespace layerwave
