#pragma once

// Scalar abstraction shared by every module: binary64 floating point or
// exact GMP rationals. Algorithms are templates over `Scalar` and are
// explicitly instantiated for both types, so a single computation can never
// mix modes.

#include <gmpxx.h>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>

namespace layerwave {

using Rational = mpq_class;

template <typename T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

enum class NumericMode { Float, Rational };

template <Scalar T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static constexpr bool exact = false;
    static constexpr NumericMode mode = NumericMode::Float;
    static constexpr const char* name = "float";
};

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static constexpr NumericMode mode = NumericMode::Rational;
    static constexpr const char* name = "rational";
};

template <Scalar T>
inline constexpr bool is_exact_v = ScalarTraits<T>::exact;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.get_d(); }

inline double abs_value(double x) { return std::fabs(x); }
inline Rational abs_value(const Rational& x) { return Rational(abs(x)); }

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const Rational& x) { return sgn(x) == 0; }

/// x^e for a non-negative integer exponent.
double power(double x, std::uint64_t e);
Rational power(const Rational& x, std::uint64_t e);

/// Exact conversion of a double into the target scalar type (the rational
/// receives the exact binary value, not a decimal approximation).
template <Scalar T>
T from_double(double x);

/// Parses "p/q", "p", or a plain decimal such as "-0.125" or "3e-2".
/// Decimal strings are converted exactly in rational mode.
template <Scalar T>
T parse_scalar(std::string_view text);

/// Canonical text: "p/q" (or "p" for integers) in rational mode, shortest
/// round-trip decimal in float mode.
std::string format_scalar(double x);
std::string format_scalar(const Rational& x);

/// Rounds x to the nearest multiple of 1/denominator and returns it in the
/// target type; used to put randomly drawn values on a decimal grid so that the
/// float and rational renditions of a fixture describe the same number.
template <Scalar T>
T on_grid(double x, std::int64_t denominator);

}  // namespace layerwave
