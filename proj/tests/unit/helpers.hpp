#pragma once

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "layerwave/lattice.hpp"
#include "layerwave/random.hpp"
#include "layerwave/scalar.hpp"

namespace testing {

using layerwave::Count;
using layerwave::Rational;
using layerwave::TransitCountVector;

inline Rational Q(const char* text) { return layerwave::parse_scalar<Rational>(text); }

inline std::vector<Rational> Qs(std::initializer_list<const char*> texts) {
    std::vector<Rational> out;
    for (auto t : texts) out.push_back(Q(t));
    return out;
}

inline bool close(double a, double b, double rel = 1e-12) {
    return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Exhaustive scan of the integer box 0 <= k_n <= bound / tau_n, keeping the
// members of L_M under the bound. Shares no code with the library DFS.
template <typename T>
std::set<TransitCountVector> brute_lattice(const std::vector<T>& tau, const T& bound) {
    const std::size_t size = tau.size();
    std::vector<Count> cap(size);
    for (std::size_t n = 0; n < size; ++n) {
        Count c = 0;
        while (T(c + 1) * tau[n] <= bound) ++c;
        cap[n] = c;
    }
    std::set<TransitCountVector> out;
    std::vector<Count> k(size, 0);
    for (;;) {
        bool member = k[0] == 1;
        for (std::size_t n = 1; n < size && member; ++n) {
            if (k[n] > 0 && k[n - 1] == 0) member = false;
        }
        if (member) {
            T t = 0;
            for (std::size_t n = 0; n < size; ++n) t += T(k[n]) * tau[n];
            if (t <= bound) out.insert(TransitCountVector(k));
        }
        std::size_t n = size;
        for (;;) {
            if (n == 0) return out;
            --n;
            if (k[n] < cap[n]) {
                ++k[n];
                for (std::size_t m = n + 1; m < size; ++m) k[m] = 0;
                break;
            }
        }
    }
}

// Every member of L_M with |k| = total.
inline void members_of_total(std::size_t size, Count total, std::vector<TransitCountVector>& out) {
    std::vector<Count> k(size, 0);
    k[0] = 1;
    auto rec = [&](auto&& self, std::size_t n, Count left) -> void {
        if (n == size) {
            if (left == 0) out.emplace_back(k);
            return;
        }
        const Count low = 0;
        const Count high = k[n - 1] > 0 ? left : 0;
        for (Count v = low; v <= high; ++v) {
            k[n] = v;
            self(self, n + 1, left - v);
        }
        k[n] = 0;
    };
    rec(rec, 1, total - 1);
}

// Random rational in (-1, 1) with a small denominator.
inline Rational random_rational(layerwave::Engine& engine, long denominator = 97) {
    const long span = 2 * denominator - 1;
    const long v = static_cast<long>(engine() % static_cast<std::uint64_t>(span)) - (denominator - 1);
    Rational q(v, denominator);
    q.canonicalize();
    return q;
}

}  // namespace testing
