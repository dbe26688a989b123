#pragma once

// Exact forward map: model -> finite-time impulse response, together with the
// enumeration function psi that assigns each lattice point to its data index.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "layerwave/core.hpp"
#include "layerwave/lattice.hpp"
#include "layerwave/scalar.hpp"

namespace layerwave {

template <Scalar T>
struct ForwardOptions {
    /// Observation window end; defaults to the total travel time |tau|.
    std::optional<T> t_max;
    /// Time merge tolerance (float only); defaults to 1e-9 * t_max.
    std::optional<T> time_tol;
    /// Relative cancellation threshold for merged amplitudes (float only).
    double amp_zero_tol = 1e-12;
    EnumerationLimits limits;
};

/// psi over the lattice set, stored parallel to `lattice.points`.
/// psi[i] == 0 marks a point whose merged amplitude vanished; other values
/// run over 1..d in arrival order.
template <Scalar T>
struct EnumerationMap {
    LatticeSet<T> lattice;
    std::vector<T> time;
    std::vector<T> amplitude;  ///< a(R, k) of the individual point
    std::vector<std::size_t> psi;
    std::size_t d = 0;
    /// Lattice indices sorted by (time, k); the order psi was assigned in.
    std::vector<std::size_t> arrival_order;

    /// True when psi is a bijection onto 1..d.
    bool is_bijective() const;
    /// Lattice indices with psi == n (n in 1..d).
    std::vector<std::size_t> preimage(std::size_t n) const;
};

template <Scalar T>
struct ForwardResult {
    Data<T> data;
    EnumerationMap<T> map;
};

template <Scalar T>
ForwardResult<T> forward(const Model<T>& model, const ForwardOptions<T>& options = {});

/// Dense integer matrix, row-major.
struct IntMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Count> values;

    IntMatrix() = default;
    IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0) {}

    Count& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    Count operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

    TransitCountVector column(std::size_t c) const;
    IntMatrix operator*(const IntMatrix& other) const;
    bool operator==(const IntMatrix&) const = default;

    static IntMatrix identity(std::size_t n);
};

/// Row vector times integer matrix.
template <Scalar T>
std::vector<T> row_times(const std::vector<T>& row, const IntMatrix& matrix);

/// Upper-triangular all-ones (M+1)x(M+1) matrix whose columns are the primary
/// vectors k^0..k^M.
IntMatrix primary_matrix(std::size_t layers);

/// Inverse of primary_matrix: ones on the diagonal, -1 on the superdiagonal.
IntMatrix primary_matrix_inverse(std::size_t layers);

/// Enumeration matrix A with column n equal to psi^{-1}(n + 1). Requires a
/// bijective psi and checks sigma = tau A against `data` (exact for
/// rationals, 1e-12 relative for floats).
template <Scalar T>
IntMatrix enumeration_matrix(const EnumerationMap<T>& map, const Data<T>& data);

/// Column positions of the primary vectors k^0..k^M inside A.
std::vector<std::size_t> primary_columns(const IntMatrix& enumeration);

/// sigma_psi: arrival times of the primaries, in primary order.
template <Scalar T>
std::vector<T> primary_times(const IntMatrix& enumeration, const Data<T>& data);

template <Scalar T>
struct GenericityReport {
    bool time_injective = true;
    std::vector<std::pair<TransitCountVector, TransitCountVector>> collisions;
    std::vector<TransitCountVector> zero_amplitudes;
    /// min |<k - k', tau>| over distinct lattice points; +inf for one point.
    double margin = std::numeric_limits<double>::infinity();

    bool generic() const { return time_injective && zero_amplitudes.empty(); }
};

/// Checks that arrival times are distinct on the lattice set (float: margin
/// above 10 * time_tol) and that no arrival amplitude vanishes.
template <Scalar T>
GenericityReport<T> is_generic(const Model<T>& model, const ForwardOptions<T>& options = {});

/// Constant-travel-time model with M layers and its (M+1)-layer extension
/// whose deepest reflectivity cancels the coincident arrival at
/// (M + 2) * tau_const. Both produce the same data.
template <Scalar T>
std::pair<Model<T>, Model<T>> ill_posed_pair(const T& tau_const, std::size_t layers, const std::vector<T>& refl);

/// Rows: k entries, time, amplitude, psi.
template <Scalar T>
void write_psi_csv(std::ostream& os, const EnumerationMap<T>& map);

}  // namespace layerwave
