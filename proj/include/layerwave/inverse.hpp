#pragma once

// Data -> model. Stage I recovers travel times from arrival times alone by
// peeling off, layer by layer, every arrival the current prefix explains.
// Stage II reads the reflectivities off the primary amplitudes. An optional
// Stage III re-derives reflectivities from the redundancy between pairs of
// multiples when amplitudes are distorted.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "layerwave/core.hpp"
#include "layerwave/lattice.hpp"
#include "layerwave/scalar.hpp"

namespace layerwave {

template <Scalar T>
struct InverseOptions {
    /// Arrival matching tolerance (absolute). Float default 1e-9 * sigma_d;
    /// must be 0 for rationals.
    std::optional<T> time_tol;
    /// Reject candidate primaries that explain no later arrival.
    bool robust = false;
    std::size_t max_layers = 64;
    std::size_t max_iterations = 1'000'000;
    EnumerationLimits limits;
};

struct Match {
    std::size_t index;    ///< data index
    TransitCountVector k; ///< the unique lattice point explaining it
};

template <Scalar T>
struct InverseReport {
    Model<T> model;
    std::vector<std::size_t> rejected;  ///< data indices discarded as spurious
    std::vector<Match> matched;           ///< sorted by data index
    std::vector<std::size_t> primary_indices;  ///< data index of k^0..k^M
    /// Stage I iterations, including robust retries.
    std::size_t iterations = 0;
};

template <Scalar T>
InverseReport<T> invert(const Data<T>& data, const InverseOptions<T>& options = {});

/// Stage I alone: travel times from arrival times. The report's model has
/// empty reflectivities and no primary indices.
template <Scalar T>
InverseReport<T> invert_travel_times(const Data<T>& data, const InverseOptions<T>& options = {});

/// Resolved matching tolerance for `data`.
template <Scalar T>
T inverse_time_tol(const Data<T>& data, const std::optional<T>& requested);

/// Index of the arrival within `tol` of t, preferring the closest, or
/// data.size() if there is none.
template <Scalar T>
std::size_t find_arrival(const Data<T>& data, const T& t, const T& tol);

/// Pairs (k, k + e^n) from the set with k_{n-1} = k_n = k_{n+1} = 1 and both
/// endpoints present. Empty when n is outside 1..M-1.
template <Scalar T>
std::vector<std::pair<TransitCountVector, TransitCountVector>> redundancy_pairs(const LatticeSet<T>& set,
                                                                                std::size_t n);

/// Mean of the largest single-linkage cluster of the sorted values. Ties go
/// to the smaller within-cluster variance, then to the smaller mean.
template <Scalar T>
T consensus(std::vector<T> values, const T& cluster_tol);

template <Scalar T>
struct CorrectionSet {
    std::size_t n = 0;
    std::vector<std::pair<TransitCountVector, TransitCountVector>> pairs;  ///< E_n
    std::vector<T> ratios;                                                ///< C_n
    std::optional<T> consensus;                                           ///< c_n
};

template <Scalar T>
struct CorrectionOptions {
    /// Consensus clustering tolerance. Float default 1e-6; 0 for rationals.
    std::optional<T> cluster_tol;
    /// Arrival matching tolerance, as in InverseOptions.
    std::optional<T> time_tol;
    /// Smallest |R''_{n-1}| accepted as a divisor.
    double min_divisor = 1e-12;
    EnumerationLimits limits;
};

template <Scalar T>
struct CorrectionResult {
    std::vector<T> refl;
    std::vector<CorrectionSet<T>> sets;  ///< n = 1..M-3
};

/// Replaces distorted reflectivities: R''_0 = R'_0, R''_n = c_n / R''_{n-1}
/// for n <= M-4, and the last four from their primaries. Needs accurate
/// travel times, R'_0 and last four primary amplitudes. For M < 4 this
/// reduces to the plain primary recursion.
template <Scalar T>
CorrectionResult<T> correct_reflectivity(const Model<T>& recovered, const Data<T>& data,
                                         const CorrectionOptions<T>& options = {});

template <Scalar T>
CorrectionResult<T> correct_reflectivity(const InverseReport<T>& report, const Data<T>& data,
                                         const CorrectionOptions<T>& options = {}) {
    return correct_reflectivity(report.model, data, options);
}

/// Rows: n, ratio (one per member of C_n).
template <Scalar T>
void write_correction_csv(std::ostream& os, const std::vector<CorrectionSet<T>>& sets);

}  // namespace layerwave
