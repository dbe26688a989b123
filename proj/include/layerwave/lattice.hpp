#pragma once

// Transit count vectors and their time-bounded lattice sets.
//
// A transit count vector k = (k_0, ..., k_M) records how many round trips a
// family of scattering sequences makes across each layer. Membership: k_0 = 1
// and the support is an initial segment (k_n > 0 implies k_{n-1} > 0).

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "layerwave/scalar.hpp"

namespace layerwave {

using Count = std::int64_t;

/// Integer vector indexed 0..M. Used both for lattice members and for the
/// derived vectors (left shifts, branch counts) that need not be members.
class TransitCountVector {
public:
    TransitCountVector() = default;
    explicit TransitCountVector(std::size_t size) : entries_(size, 0) {}
    TransitCountVector(std::initializer_list<Count> entries) : entries_(entries) {}
    explicit TransitCountVector(std::vector<Count> entries) : entries_(std::move(entries)) {}

    std::size_t size() const { return entries_.size(); }
    Count& operator[](std::size_t n) { return entries_[n]; }
    const Count& operator[](std::size_t n) const { return entries_[n]; }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }
    const std::vector<Count>& entries() const { return entries_; }

    /// |k| = sum of entries.
    Count total() const;

    /// k_0 = 1 and k_n > 0 implies k_{n-1} > 0.
    bool is_member() const;

    /// Largest n with k_n > 0, or -1 for the zero vector.
    long depth() const;

    /// k extended (or truncated, when the dropped entries are zero) to `size`.
    TransitCountVector resized(std::size_t size) const;

    auto operator<=>(const TransitCountVector&) const = default;
    bool operator==(const TransitCountVector&) const = default;

private:
    std::vector<Count> entries_;
};

std::ostream& operator<<(std::ostream& os, const TransitCountVector& k);
std::string to_string(const TransitCountVector& k);

template <Scalar T>
T arrival_time(const TransitCountVector& k, const std::vector<T>& tau);

/// Enumeration budget shared by lattice and sequence enumerations.
struct EnumerationLimits {
    std::size_t max_terms = 10'000'000;
};

template <Scalar T>
struct LatticeSet {
    std::vector<TransitCountVector> points;  ///< lexicographic order
    std::vector<T> tau;
    T bound{};

    std::size_t size() const { return points.size(); }
    bool contains(const TransitCountVector& k) const;
    /// Position of k in `points`, or points.size() when absent.
    std::size_t index_of(const TransitCountVector& k) const;
};

/// {k in L_M : <k, tau> <= bound} by depth-first search with per-coordinate
/// pruning.
template <Scalar T>
LatticeSet<T> enumerate_lattice_set(const std::vector<T>& tau, const T& bound, EnumerationLimits limits = {});

/// {k in L_n : k_n >= 1 and <k, tau_prefix> <= s}; tau_prefix has n + 1
/// entries. Every entry of such k is at least one.
template <Scalar T>
LatticeSet<T> enumerate_restricted(const std::vector<T>& tau_prefix, std::size_t n, const T& s,
                                   EnumerationLimits limits = {});

/// n + 1 ones followed by M - n zeros.
TransitCountVector primary_vector(std::size_t n, std::size_t layers);

/// (k_1, ..., k_M, 0)
TransitCountVector left_shift(const TransitCountVector& k);

/// Integer box [low, high] of admissible branch count vectors:
/// low = min(1, shift(k)), high = min(k, shift(k)).
struct BranchBox {
    TransitCountVector low;
    TransitCountVector high;

    /// Number of integer points in the box.
    std::uint64_t volume() const;
};

BranchBox branch_box(const TransitCountVector& k);

/// Calls f(b) for every b in the box in lexicographic order.
template <typename F>
void for_each_in_box(const BranchBox& box, F&& f) {
    TransitCountVector b = box.low;
    const std::size_t size = b.size();
    for (std::size_t n = 0; n < size; ++n) {
        if (box.low[n] > box.high[n]) return;
    }
    for (;;) {
        f(static_cast<const TransitCountVector&>(b));
        std::size_t n = size;
        for (;;) {
            if (n == 0) return;
            --n;
            if (b[n] < box.high[n]) {
                ++b[n];
                for (std::size_t m = n + 1; m < size; ++m) b[m] = box.low[m];
                break;
            }
        }
    }
}

struct ProjectedPoint {
    TransitCountVector k;
    double value;  ///< <k, tau> / |tau|
};

/// Coordinates of the lattice points along the tau direction.
template <Scalar T>
std::vector<ProjectedPoint> project_onto_tau(const LatticeSet<T>& set, const std::vector<T>& tau);

/// One row per point: entries, then <k, tau>.
template <Scalar T>
void write_lattice_csv(std::ostream& os, const LatticeSet<T>& set);

}  // namespace layerwave
