#include "layerwave/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "layerwave/error.hpp"

namespace layerwave {

Count TransitCountVector::total() const {
    Count sum = 0;
    for (auto c : entries_) sum += c;
    return sum;
}

bool TransitCountVector::is_member() const {
    if (entries_.empty() || entries_[0] != 1) return false;
    for (std::size_t n = 1; n < entries_.size(); ++n) {
        if (entries_[n] < 0) return false;
        if (entries_[n] > 0 && entries_[n - 1] == 0) return false;
    }
    return true;
}

long TransitCountVector::depth() const {
    for (std::size_t n = entries_.size(); n > 0; --n) {
        if (entries_[n - 1] != 0) return static_cast<long>(n - 1);
    }
    return -1;
}

TransitCountVector TransitCountVector::resized(std::size_t size) const {
    for (std::size_t n = size; n < entries_.size(); ++n) {
        if (entries_[n] != 0) throw ValidationError("cannot truncate nonzero entries of " + to_string(*this));
    }
    std::vector<Count> out(entries_.begin(), entries_.begin() + static_cast<long>(std::min(size, entries_.size())));
    out.resize(size, 0);
    return TransitCountVector(std::move(out));
}

std::ostream& operator<<(std::ostream& os, const TransitCountVector& k) {
    os << '(';
    for (std::size_t n = 0; n < k.size(); ++n) {
        if (n) os << ',';
        os << k[n];
    }
    return os << ')';
}

std::string to_string(const TransitCountVector& k) {
    std::ostringstream os;
    os << k;
    return os.str();
}

template <Scalar T>
T arrival_time(const TransitCountVector& k, const std::vector<T>& tau) {
    if (k.size() != tau.size()) {
        throw ValidationError("dimension mismatch: k has " + std::to_string(k.size()) + " entries, tau has " +
                              std::to_string(tau.size()));
    }
    T sum = 0;
    for (std::size_t n = 0; n < k.size(); ++n) {
        if (k[n] != 0) sum += T(static_cast<long>(k[n])) * tau[n];
    }
    return sum;
}

template <Scalar T>
bool LatticeSet<T>::contains(const TransitCountVector& k) const {
    return index_of(k) != points.size();
}

template <Scalar T>
std::size_t LatticeSet<T>::index_of(const TransitCountVector& k) const {
    auto it = std::lower_bound(points.begin(), points.end(), k);
    if (it == points.end() || *it != k) return points.size();
    return static_cast<std::size_t>(it - points.begin());
}

namespace {

template <Scalar T>
void check_positive(const std::vector<T>& tau) {
    if (tau.empty()) throw ValidationError("travel-time vector is empty");
    for (std::size_t n = 0; n < tau.size(); ++n) {
        if (!(tau[n] > 0)) throw ValidationError("tau[" + std::to_string(n) + "] is not positive");
    }
}

// Depth-first walk over entries n..M given a partial time. Since every
// tau_n > 0 the partial time only grows, so a coordinate loop stops at the
// first overflowing count.
template <Scalar T>
class LatticeWalker {
public:
    LatticeWalker(const std::vector<T>& tau, const T& bound, Count min_entry, EnumerationLimits limits,
                  std::vector<TransitCountVector>& out)
        : tau_(tau), bound_(bound), min_entry_(min_entry), limits_(limits), out_(out), k_(tau.size()) {}

    void run() {
        k_[0] = 1;
        if (tau_[0] > bound_) return;
        descend(1, tau_[0]);
    }

private:
    void emit() {
        if (out_.size() >= limits_.max_terms) {
            throw GuardError("lattice enumeration exceeded " + std::to_string(limits_.max_terms) +
                             " points; bound too large for this travel-time vector");
        }
        out_.push_back(k_);
    }

    void descend(std::size_t n, const T& time) {
        if (n == k_.size()) {
            emit();
            return;
        }
        if (k_[n - 1] == 0) {
            // support is an initial segment; the rest stays zero
            for (std::size_t m = n; m < k_.size(); ++m) k_[m] = 0;
            emit();
            return;
        }
        T t = time;
        for (Count c = 0;; ++c) {
            if (c > 0) {
                t += tau_[n];
                if (t > bound_) break;
            }
            if (c >= min_entry_) {
                k_[n] = c;
                descend(n + 1, t);
            }
        }
        k_[n] = 0;
    }

    const std::vector<T>& tau_;
    const T& bound_;
    Count min_entry_;
    EnumerationLimits limits_;
    std::vector<TransitCountVector>& out_;
    TransitCountVector k_;
};

}  // namespace

template <Scalar T>
LatticeSet<T> enumerate_lattice_set(const std::vector<T>& tau, const T& bound, EnumerationLimits limits) {
    check_positive(tau);
    LatticeSet<T> set{{}, tau, bound};
    LatticeWalker<T>(tau, bound, 0, limits, set.points).run();
    return set;
}

template <Scalar T>
LatticeSet<T> enumerate_restricted(const std::vector<T>& tau_prefix, std::size_t n, const T& s,
                                   EnumerationLimits limits) {
    if (tau_prefix.size() != n + 1) {
        throw ValidationError("restricted enumeration needs n + 1 = " + std::to_string(n + 1) + " travel times, got " +
                              std::to_string(tau_prefix.size()));
    }
    check_positive(tau_prefix);
    LatticeSet<T> set{{}, tau_prefix, s};
    LatticeWalker<T>(tau_prefix, s, 1, limits, set.points).run();
    return set;
}

TransitCountVector primary_vector(std::size_t n, std::size_t layers) {
    if (n > layers) {
        throw ValidationError("primary index " + std::to_string(n) + " exceeds layer count " + std::to_string(layers));
    }
    TransitCountVector k(layers + 1);
    for (std::size_t j = 0; j <= n; ++j) k[j] = 1;
    return k;
}

TransitCountVector left_shift(const TransitCountVector& k) {
    TransitCountVector out(k.size());
    for (std::size_t n = 0; n + 1 < k.size(); ++n) out[n] = k[n + 1];
    return out;
}

std::uint64_t BranchBox::volume() const {
    std::uint64_t v = 1;
    for (std::size_t n = 0; n < low.size(); ++n) {
        if (high[n] < low[n]) return 0;
        v *= static_cast<std::uint64_t>(high[n] - low[n] + 1);
    }
    return v;
}

BranchBox branch_box(const TransitCountVector& k) {
    const auto shifted = left_shift(k);
    BranchBox box{TransitCountVector(k.size()), TransitCountVector(k.size())};
    for (std::size_t n = 0; n < k.size(); ++n) {
        box.low[n] = std::min<Count>(1, shifted[n]);
        box.high[n] = std::min(k[n], shifted[n]);
    }
    return box;
}

template <Scalar T>
std::vector<ProjectedPoint> project_onto_tau(const LatticeSet<T>& set, const std::vector<T>& tau) {
    double norm = 0.0;
    for (const auto& t : tau) norm += to_double(t) * to_double(t);
    norm = std::sqrt(norm);
    std::vector<ProjectedPoint> out;
    out.reserve(set.size());
    for (const auto& k : set.points) out.push_back({k, to_double(arrival_time(k, tau)) / norm});
    return out;
}

template <Scalar T>
void write_lattice_csv(std::ostream& os, const LatticeSet<T>& set) {
    for (const auto& k : set.points) {
        for (auto c : k) os << c << ',';
        os << format_scalar(arrival_time(k, set.tau)) << '\n';
    }
}

#define LAYERWAVE_INSTANTIATE(T)                                                                                \
    template T arrival_time<T>(const TransitCountVector&, const std::vector<T>&);                              \
    template struct LatticeSet<T>;                                                                             \
    template LatticeSet<T> enumerate_lattice_set<T>(const std::vector<T>&, const T&, EnumerationLimits);       \
    template LatticeSet<T> enumerate_restricted<T>(const std::vector<T>&, std::size_t, const T&,               \
                                                   EnumerationLimits);                                         \
    template std::vector<ProjectedPoint> project_onto_tau<T>(const LatticeSet<T>&, const std::vector<T>&);     \
    template void write_lattice_csv<T>(std::ostream&, const LatticeSet<T>&);

LAYERWAVE_INSTANTIATE(double)
LAYERWAVE_INSTANTIATE(Rational)

#undef LAYERWAVE_INSTANTIATE

}  // namespace layerwave
