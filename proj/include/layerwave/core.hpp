#pragma once

// Domain types for the layered reflection problem: a model is a vector of
// two-way travel times plus a vector of reflection coefficients (one per
// interface z_0..z_M); data is a normal-form delta train of arrival times and
// amplitudes observed at the reference depth.

#include <cstddef>
#include <optional>
#include <vector>

#include "layerwave/scalar.hpp"

namespace layerwave {

template <Scalar T>
struct Model {
    std::vector<T> tau;   ///< two-way travel times, tau[0] is reference depth to z_0
    std::vector<T> refl;  ///< reflection coefficients seen from above

    /// Number of layers M (the model has M + 1 interfaces).
    std::size_t layers() const { return tau.empty() ? 0 : tau.size() - 1; }

    bool operator==(const Model&) const = default;
};

/// Normal-form impulse response: strictly increasing sigma, nonzero alpha.
template <Scalar T>
struct Data {
    std::vector<T> sigma;
    std::vector<T> alpha;

    std::size_t size() const { return sigma.size(); }
    bool empty() const { return sigma.empty(); }

    bool operator==(const Data&) const = default;
};

template <Scalar T>
struct RawTerm {
    T time;
    T amplitude;

    bool operator==(const RawTerm& other) const { return time == other.time && amplitude == other.amplitude; }
};

/// Pre-normal-form delta train: any order, repeats and zeros allowed.
template <Scalar T>
using RawTermList = std::vector<RawTerm<T>>;

/// Piecewise-constant acoustic medium. Media are indexed -1..M: medium -1
/// fills [z_{-1}, z_0], medium n (0 <= n < M) fills [z_n, z_{n+1}] and medium
/// M is the half-space below z_M. Vectors are stored from index -1 upward.
struct PhysicalProfile {
    std::vector<double> depth;    ///< z_{-1} < z_0 < ... < z_M, metres
    std::vector<double> density;  ///< rho per medium, kg/m^3
    std::vector<double> modulus;  ///< bulk modulus K per medium, Pa
};

struct ModelCheck {
    bool allow_single_interface = false;  ///< permit M = 0
};

/// Checks lengths, tau > 0 and |refl| < 1; errors name the offending index.
template <Scalar T>
Model<T> validate_model(std::vector<T> tau, std::vector<T> refl, ModelCheck check = {});

/// Acoustic impedance contrast formulas. The reference medium -1 supplies
/// both the wave speed for tau_0 and the upper impedance of R_0.
Model<double> from_physical(const PhysicalProfile& profile);

template <Scalar T>
T total_travel_time(const Model<T>& model);

template <Scalar T>
struct NormalizeOptions {
    /// Times closer than this (chained transitively) are merged. Must be 0
    /// for rationals.
    T time_tol{};
    /// A merged amplitude is dropped when |sum| <= amp_zero_tol * sum(|a_i|).
    /// Relative to the magnitudes being combined so that lone tiny arrivals
    /// survive while cancellations down to rounding level vanish.
    double amp_zero_tol = 0.0;
    /// Maximum time extent of one merged cluster; larger spans mean time_tol
    /// is too coarse for the data.
    std::optional<T> max_cluster_span;
};

/// Float defaults: time_tol = 1e-9 * max time, amp_zero_tol = 1e-12, span
/// guard 100 * time_tol. Rational defaults are all exact.
template <Scalar T>
NormalizeOptions<T> default_normalize_options(const RawTermList<T>& terms);

/// One merged cluster of raw terms.
struct Cluster {
    std::size_t first = 0;  ///< index into the time-sorted term list
    std::size_t count = 0;
    bool kept = false;      ///< false when the amplitudes cancelled
};

/// Sorts terms by time (stable), merges near-coincident times and reports the
/// clusters. Shared by `normalize` and the forward enumeration map.
template <Scalar T>
std::vector<Cluster> cluster_terms(RawTermList<T>& terms, const NormalizeOptions<T>& options);

/// Normal form of a raw delta train. May return empty Data.
template <Scalar T>
Data<T> normalize(RawTermList<T> terms, const NormalizeOptions<T>& options);

template <Scalar T>
Data<T> normalize(RawTermList<T> terms);

/// Throws ValidationError unless data is in normal form with d >= 1.
template <Scalar T>
void validate_data(const Data<T>& data);

template <Scalar T>
Data<double> to_float(const Data<T>& data);

template <Scalar T>
Model<double> to_float(const Model<T>& model);

}  // namespace layerwave
