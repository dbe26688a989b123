#pragma once

// Amplitude polynomials a(x, k): the summed weight of every scattering
// sequence with transit count vector k, written in the variables x_n and
// q_n = 1 - x_n^2 (the squared transmission coefficient). Keeping q_n atomic
// keeps coefficients small integers and makes rational evaluation exact.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "layerwave/lattice.hpp"
#include "layerwave/scalar.hpp"

namespace layerwave {

/// coeff * prod x_n^{x_exponents[n]} * prod (1 - x_n^2)^{q_exponents[n]}
struct AmplitudeTerm {
    std::int64_t coeff = 0;
    TransitCountVector x_exponents;
    TransitCountVector q_exponents;

    /// sum(x_exponents) + 2 * sum(q_exponents)
    Count degree() const;
};

/// Binomial coefficient with overflow detection (throws GuardError).
std::int64_t binomial(std::int64_t n, std::int64_t r);

/// prod_n C(top_n, bottom_n)
std::int64_t multi_binomial(const TransitCountVector& top, const TransitCountVector& bottom);

/// One term per b in the branch box of k, ordered by b lexicographically:
/// coeff = (-1)^{|shift(k) - b|} C(k, b) C(shift(k) - u, b - u),
/// x exponents = (shift(k) - b) + (k - b), q exponents = b.
std::vector<AmplitudeTerm> amplitude_terms(const TransitCountVector& k);

template <Scalar T>
T amplitude_eval(const std::vector<T>& x, const TransitCountVector& k);

/// Evaluates a precomputed term list; x^j and (1 - x^2)^j are memoised per call.
template <Scalar T>
T amplitude_eval(const std::vector<T>& x, const std::vector<AmplitudeTerm>& terms);

/// k' = k + e^n when k_{n-1} = k_n = k_{n+1} = 1. For such pairs
/// a(x, k') = -2 x_{n-1} x_n a(x, k).
std::optional<TransitCountVector> redundancy_ratio_check(const TransitCountVector& k, std::size_t n);

/// CSV rows: coeff, x exponents..., q exponents...
void write_terms_csv(std::ostream& os, const std::vector<AmplitudeTerm>& terms);

}  // namespace layerwave
