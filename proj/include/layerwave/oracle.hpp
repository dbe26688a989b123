#pragma once

// Ground truth from first principles: walk every scattering sequence (a path
// over interface indices that starts and ends at the reference depth),
// multiply its local reflection/transmission factors and add up the
// contributions by arrival time. Shares nothing with the amplitude-polynomial
// path except the final normal-form step.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "layerwave/core.hpp"
#include "layerwave/lattice.hpp"
#include "layerwave/scalar.hpp"

namespace layerwave {

/// Depth indices p_0..p_L over {-1, 0, ..., M}; -1 is the reference depth.
struct ScatteringSequence {
    std::vector<int> path;

    bool operator==(const ScatteringSequence&) const = default;
    auto operator<=>(const ScatteringSequence&) const = default;
};

/// Throws ValidationError unless the path starts and ends at -1, stays in
/// 0..M in between, moves by one interface per step and has L >= 2.
void validate_sequence(const ScatteringSequence& sequence, std::size_t layers);

struct SequenceStats {
    TransitCountVector kappa;  ///< arrivals at z_n from above
    TransitCountVector beta;   ///< arrivals at z_n that continue deeper
    /// Stepwise factor counts per interface: R_j (reflection from above),
    /// -R_j (reflection from below), T_j (transmission either way).
    TransitCountVector reflections_above;
    TransitCountVector reflections_below;
    TransitCountVector transmissions;

    bool operator==(const SequenceStats&) const = default;
    auto operator<=>(const SequenceStats&) const = default;
};

struct OracleLimits {
    std::size_t max_sequences = 10'000'000;
};

/// Every sequence with arrival time <kappa, tau> <= t_max, lexicographic.
template <Scalar T>
std::vector<ScatteringSequence> enumerate_sequences(std::size_t layers, const std::vector<T>& tau, const T& t_max,
                                                    OracleLimits limits = {});

SequenceStats stats(const ScatteringSequence& sequence, std::size_t layers);

/// Closed form (-R)^{shift(k)-b} R^{k-b} T^{2b}, checked against the product
/// of the stepwise factors; a disagreement throws std::logic_error.
template <Scalar T>
T weight_eval(const SequenceStats& stats, const std::vector<T>& refl);

/// Product of the stepwise factors alone (T_j^{2m} = (1 - R_j^2)^m).
template <Scalar T>
T stepwise_weight(const SequenceStats& stats, const std::vector<T>& refl);

/// Summed weight per transit count vector over all sequences arriving by t_max.
template <Scalar T>
std::map<TransitCountVector, T> oracle_weights(const Model<T>& model, const T& t_max, OracleLimits limits = {});

/// Impulse response on [0, t_max] assembled from scattering sequences.
template <Scalar T>
Data<T> oracle_response(const Model<T>& model, const T& t_max, OracleLimits limits = {});

/// Number of sequences with transit count k, keyed by branch count vector.
std::map<TransitCountVector, std::uint64_t> count_sequences_by_branch(const TransitCountVector& k,
                                                                      OracleLimits limits = {});

/// Number of sequences with (kappa, beta) = (k, b), by exhaustive search.
std::uint64_t count_sequences_by(const TransitCountVector& k, const TransitCountVector& b, OracleLimits limits = {});

/// Rows: k entries, time, summed weight (same layout as the psi CSV).
template <Scalar T>
void write_weights_csv(std::ostream& os, const std::map<TransitCountVector, T>& weights, const std::vector<T>& tau);

}  // namespace layerwave
