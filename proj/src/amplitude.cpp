#include "layerwave/amplitude.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "layerwave/error.hpp"

namespace layerwave {

Count AmplitudeTerm::degree() const { return x_exponents.total() + 2 * q_exponents.total(); }

std::int64_t binomial(std::int64_t n, std::int64_t r) {
    if (r < 0 || n < 0 || r > n) return 0;
    r = std::min(r, n - r);
    std::int64_t result = 1;
    for (std::int64_t i = 1; i <= r; ++i) {
        // result * (n - r + i) / i stays integral at every step
        std::int64_t next = 0;
        if (__builtin_mul_overflow(result, n - r + i, &next)) {
            throw GuardError("binomial C(" + std::to_string(n) + "," + std::to_string(r) + ") overflows 64 bits");
        }
        result = next / i;
    }
    return result;
}

std::int64_t multi_binomial(const TransitCountVector& top, const TransitCountVector& bottom) {
    std::int64_t result = 1;
    for (std::size_t n = 0; n < top.size(); ++n) {
        std::int64_t factor = binomial(top[n], bottom[n]);
        if (__builtin_mul_overflow(result, factor, &result)) {
            throw GuardError("multi-index binomial overflows 64 bits for " + to_string(top));
        }
    }
    return result;
}

std::vector<AmplitudeTerm> amplitude_terms(const TransitCountVector& k) {
    if (!k.is_member()) throw ValidationError(to_string(k) + " is not a transit count vector");
    const auto shifted = left_shift(k);
    const auto box = branch_box(k);
    const auto& u = box.low;
    const std::size_t size = k.size();

    std::vector<AmplitudeTerm> terms;
    terms.reserve(box.volume());
    TransitCountVector shift_minus_u(size);
    for (std::size_t n = 0; n < size; ++n) shift_minus_u[n] = shifted[n] - u[n];

    for_each_in_box(box, [&](const TransitCountVector& b) {
        AmplitudeTerm term;
        term.x_exponents = TransitCountVector(size);
        term.q_exponents = b;
        TransitCountVector b_minus_u(size);
        Count sign_power = 0;
        for (std::size_t n = 0; n < size; ++n) {
            sign_power += shifted[n] - b[n];
            term.x_exponents[n] = (shifted[n] - b[n]) + (k[n] - b[n]);
            b_minus_u[n] = b[n] - u[n];
        }
        std::int64_t magnitude = multi_binomial(k, b);
        if (__builtin_mul_overflow(magnitude, multi_binomial(shift_minus_u, b_minus_u), &magnitude)) {
            throw GuardError("amplitude coefficient overflows 64 bits for " + to_string(k));
        }
        term.coeff = (sign_power % 2 == 0) ? magnitude : -magnitude;
        terms.push_back(std::move(term));
    });
    return terms;
}

template <Scalar T>
T amplitude_eval(const std::vector<T>& x, const std::vector<AmplitudeTerm>& terms) {
    if (terms.empty()) return T(0);
    const std::size_t size = x.size();
    if (terms.front().x_exponents.size() != size) {
        throw ValidationError("dimension mismatch: x has " + std::to_string(size) + " entries, k has " +
                              std::to_string(terms.front().x_exponents.size()));
    }
    std::vector<Count> max_x(size, 0);
    std::vector<Count> max_q(size, 0);
    for (const auto& term : terms) {
        for (std::size_t n = 0; n < size; ++n) {
            max_x[n] = std::max(max_x[n], term.x_exponents[n]);
            max_q[n] = std::max(max_q[n], term.q_exponents[n]);
        }
    }
    std::vector<std::vector<T>> x_pow(size);
    std::vector<std::vector<T>> q_pow(size);
    for (std::size_t n = 0; n < size; ++n) {
        x_pow[n].resize(static_cast<std::size_t>(max_x[n]) + 1);
        x_pow[n][0] = 1;
        for (Count j = 1; j <= max_x[n]; ++j) x_pow[n][j] = x_pow[n][j - 1] * x[n];
        q_pow[n].resize(static_cast<std::size_t>(max_q[n]) + 1);
        q_pow[n][0] = 1;
        if (max_q[n] > 0) {
            const T q = T(1) - x[n] * x[n];
            for (Count j = 1; j <= max_q[n]; ++j) q_pow[n][j] = q_pow[n][j - 1] * q;
        }
    }

    T sum = 0;
    T product;
    for (const auto& term : terms) {
        product = T(static_cast<long>(term.coeff));
        for (std::size_t n = 0; n < size; ++n) {
            if (term.x_exponents[n] != 0) product *= x_pow[n][term.x_exponents[n]];
            if (term.q_exponents[n] != 0) product *= q_pow[n][term.q_exponents[n]];
        }
        sum += product;
    }
    return sum;
}

template <Scalar T>
T amplitude_eval(const std::vector<T>& x, const TransitCountVector& k) {
    if (x.size() != k.size()) {
        throw ValidationError("dimension mismatch: x has " + std::to_string(x.size()) + " entries, k has " +
                              std::to_string(k.size()));
    }
    return amplitude_eval(x, amplitude_terms(k));
}

std::optional<TransitCountVector> redundancy_ratio_check(const TransitCountVector& k, std::size_t n) {
    if (n == 0 || n + 1 >= k.size()) return std::nullopt;
    if (k[n - 1] != 1 || k[n] != 1 || k[n + 1] != 1) return std::nullopt;
    TransitCountVector next = k;
    ++next[n];
    return next;
}

void write_terms_csv(std::ostream& os, const std::vector<AmplitudeTerm>& terms) {
    for (const auto& term : terms) {
        os << term.coeff;
        for (auto e : term.x_exponents) os << ',' << e;
        for (auto e : term.q_exponents) os << ',' << e;
        os << '\n';
    }
}

template double amplitude_eval<double>(const std::vector<double>&, const std::vector<AmplitudeTerm>&);
template Rational amplitude_eval<Rational>(const std::vector<Rational>&, const std::vector<AmplitudeTerm>&);
template double amplitude_eval<double>(const std::vector<double>&, const TransitCountVector&);
template Rational amplitude_eval<Rational>(const std::vector<Rational>&, const TransitCountVector&);

}  // namespace layerwave
