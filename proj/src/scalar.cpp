#include "layerwave/scalar.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "layerwave/error.hpp"

namespace layerwave {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Guard: return "guard";
        case ErrorKind::Algorithm: return "algorithm";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

double power(double x, std::uint64_t e) {
    double result = 1.0;
    double base = x;
    while (e != 0) {
        if (e & 1U) result *= base;
        e >>= 1U;
        if (e != 0) base *= base;
    }
    return result;
}

Rational power(const Rational& x, std::uint64_t e) {
    Rational result;
    mpz_pow_ui(result.get_num_mpz_t(), x.get_num_mpz_t(), e);
    mpz_pow_ui(result.get_den_mpz_t(), x.get_den_mpz_t(), e);
    // num/den already coprime, so the powers are too; sign lives in num.
    return result;
}

template <>
double from_double<double>(double x) {
    return x;
}

template <>
Rational from_double<Rational>(double x) {
    if (!std::isfinite(x)) throw ValidationError("non-finite value cannot be made rational");
    return Rational(x);
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

// Exact value of a decimal literal [+-]digits[.digits][(e|E)[+-]digits].
Rational parse_decimal(std::string_view text) {
    std::string_view s = text;
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    std::string digits;
    long exponent = 0;
    bool seen_digit = false;
    bool seen_point = false;
    std::size_t i = 0;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            seen_digit = true;
            if (seen_point) --exponent;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) throw ValidationError("malformed number '" + std::string(text) + "'");
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E') throw ValidationError("malformed number '" + std::string(text) + "'");
        ++i;
        long e = 0;
        auto [ptr, ec] = std::from_chars(s.data() + i + (i < s.size() && s[i] == '+' ? 1 : 0), s.data() + s.size(), e);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw ValidationError("malformed exponent in '" + std::string(text) + "'");
        }
        exponent += e;
    }
    mpz_class mantissa(digits, 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    Rational value = exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale);
    value.canonicalize();
    return negative ? Rational(-value) : value;
}

Rational parse_rational(std::string_view text) {
    auto s = trim(text);
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return parse_decimal(s);
    auto num_text = trim(s.substr(0, slash));
    auto den_text = trim(s.substr(slash + 1));
    auto integral = [](std::string_view t) {
        if (t.empty()) return false;
        std::size_t start = (t.front() == '-' || t.front() == '+') ? 1 : 0;
        if (start == t.size()) return false;
        for (std::size_t i = start; i < t.size(); ++i) {
            if (t[i] < '0' || t[i] > '9') return false;
        }
        return true;
    };
    if (!integral(num_text) || !integral(den_text)) {
        throw ValidationError("malformed rational '" + std::string(text) + "'");
    }
    std::string num(num_text.front() == '+' ? num_text.substr(1) : num_text);
    std::string den(den_text.front() == '+' ? den_text.substr(1) : den_text);
    mpz_class n(num, 10);
    mpz_class d(den, 10);
    if (d == 0) throw ValidationError("zero denominator in '" + std::string(text) + "'");
    Rational value(n, d);
    value.canonicalize();
    return value;
}

}  // namespace

template <>
Rational parse_scalar<Rational>(std::string_view text) {
    return parse_rational(text);
}

template <>
double parse_scalar<double>(std::string_view text) {
    auto s = trim(text);
    if (s.find('/') != std::string_view::npos) return parse_rational(s).get_d();
    double value = 0.0;
    const char* begin = s.data() + (!s.empty() && s.front() == '+' ? 1 : 0);
    auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ValidationError("malformed number '" + std::string(text) + "'");
    }
    return value;
}

std::string format_scalar(double x) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, x);
    return std::string(buffer, ptr);
}

std::string format_scalar(const Rational& x) { return x.get_str(10); }

template <>
double on_grid<double>(double x, std::int64_t denominator) {
    return std::nearbyint(x * static_cast<double>(denominator)) / static_cast<double>(denominator);
}

template <>
Rational on_grid<Rational>(double x, std::int64_t denominator) {
    auto numerator = static_cast<long>(std::nearbyint(x * static_cast<double>(denominator)));
    Rational value(numerator, static_cast<long>(denominator));
    value.canonicalize();
    return value;
}

}  // namespace layerwave
