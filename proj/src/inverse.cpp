#include "layerwave/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "layerwave/error.hpp"

namespace layerwave {

template <Scalar T>
T inverse_time_tol(const Data<T>& data, const std::optional<T>& requested) {
    if constexpr (is_exact_v<T>) {
        if (requested && !is_zero(*requested)) throw ValidationError("time tolerance must be 0 in rational mode");
        return T(0);
    } else {
        if (requested) {
            if (*requested < 0) throw ValidationError("time tolerance must be non-negative");
            return *requested;
        }
        return data.empty() ? 0.0 : 1e-9 * std::fabs(data.sigma.back());
    }
}

template <Scalar T>
std::size_t find_arrival(const Data<T>& data, const T& t, const T& tol) {
    const auto& sigma = data.sigma;
    auto it = std::lower_bound(sigma.begin(), sigma.end(), T(t - tol));
    std::size_t best = sigma.size();
    T best_gap = 0;
    for (; it != sigma.end() && *it <= t + tol; ++it) {
        T gap = abs_value(T(*it - t));
        if (best == sigma.size() || gap < best_gap) {
            best = static_cast<std::size_t>(it - sigma.begin());
            best_gap = gap;
        }
    }
    return best;
}

namespace {

// Stage I bookkeeping: which data points are still unexplained.
class ArrivalPool {
public:
    explicit ArrivalPool(std::size_t size) : alive_(size, true), remaining_(size) {}

    bool alive(std::size_t i) const { return alive_[i]; }
    std::size_t remaining() const { return remaining_; }

    void remove(std::size_t i) {
        if (alive_[i]) {
            alive_[i] = false;
            --remaining_;
        }
    }

    /// Smallest alive index; alive points only disappear, so a forward
    /// cursor suffices.
    std::size_t first() {
        while (cursor_ < alive_.size() && !alive_[cursor_]) ++cursor_;
        return cursor_;
    }

private:
    std::vector<bool> alive_;
    std::size_t remaining_;
    std::size_t cursor_ = 0;
};

}  // namespace

template <Scalar T>
InverseReport<T> invert_travel_times(const Data<T>& data, const InverseOptions<T>& options) {
    validate_data(data);
    if (data.size() < 2) throw ValidationError("inversion needs at least two arrivals");
    const T tol = inverse_time_tol(data, options.time_tol);
    const T bound = data.sigma.back() + tol;
    const std::size_t d = data.size();

    InverseReport<T> report;
    std::vector<T> tau{data.sigma.front()};
    T elapsed = tau.front();

    // Index 0 fixes tau_0. Every other arrival must be explained by some
    // prefix; the smallest unexplained one is always the next primary.
    ArrivalPool pool(d);
    pool.remove(0);
    std::vector<std::optional<TransitCountVector>> explanation(d);
    std::vector<bool> ambiguous(d, false);
    std::vector<std::pair<std::size_t, TransitCountVector>> hits;

    std::size_t n = 1;
    while (pool.remaining() > 0) {
        if (++report.iterations > options.max_iterations) {
            throw GuardError("inversion exceeded " + std::to_string(options.max_iterations) + " iterations");
        }
        const std::size_t next = pool.first();
        const T candidate = data.sigma[next] - elapsed;
        if (!(candidate > 0)) {
            throw AlgorithmError("non-positive travel time " + format_scalar(candidate) + " for layer " +
                                 std::to_string(n));
        }
        std::vector<T> prefix = tau;
        prefix.push_back(candidate);
        const auto restricted = enumerate_restricted(prefix, n, bound, options.limits);

        hits.clear();
        for (const auto& k : restricted.points) {
            const T t = arrival_time(k, prefix);
            auto it = std::lower_bound(data.sigma.begin(), data.sigma.end(), T(t - tol));
            for (; it != data.sigma.end() && *it <= t + tol; ++it) {
                const auto j = static_cast<std::size_t>(it - data.sigma.begin());
                if (pool.alive(j)) hits.emplace_back(j, k);
            }
        }
        std::size_t distinct = 0;
        bool explains_next = false;
        {
            std::vector<std::size_t> indices;
            indices.reserve(hits.size());
            for (const auto& hit : hits) indices.push_back(hit.first);
            std::sort(indices.begin(), indices.end());
            indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
            distinct = indices.size();
            explains_next = std::binary_search(indices.begin(), indices.end(), next);
        }
        if (distinct == 0) {
            throw AlgorithmError("layer " + std::to_string(n) + " explains no remaining arrival; data is not generic");
        }
        if (options.robust && distinct == 1 && explains_next && pool.remaining() > 1) {
            // A primary with no corroborating multiple: treat it as spurious.
            report.rejected.push_back(next);
            pool.remove(next);
            continue;
        }
        for (const auto& [j, k] : hits) {
            if (explanation[j]) {
                ambiguous[j] = true;
            } else {
                explanation[j] = k;
            }
            pool.remove(j);
        }
        tau = std::move(prefix);
        elapsed += candidate;
        if (pool.remaining() == 0) break;
        if (++n > options.max_layers) {
            throw GuardError("inversion exceeded " + std::to_string(options.max_layers) + " layers");
        }
    }
    const std::size_t layers = tau.size() - 1;
    for (std::size_t j = 0; j < d; ++j) {
        if (j == 0) {
            report.matched.push_back({0, primary_vector(0, layers)});
        } else if (explanation[j] && !ambiguous[j]) {
            report.matched.push_back({j, explanation[j]->resized(layers + 1)});
        }
    }
    report.model.tau = std::move(tau);
    return report;
}

template <Scalar T>
InverseReport<T> invert(const Data<T>& data, const InverseOptions<T>& options) {
    auto report = invert_travel_times(data, options);
    const T tol = inverse_time_tol(data, options.time_tol);
    const std::size_t d = data.size();
    const auto& tau = report.model.tau;
    const std::size_t layers = tau.size() - 1;

    std::vector<bool> rejected(d, false);
    for (auto j : report.rejected) rejected[j] = true;
    std::vector<T> refl;
    T partial = 0;
    for (std::size_t level = 0; level <= layers; ++level) {
        partial += tau[level];
        std::size_t rho = find_arrival(data, partial, tol);
        if (rho == d || rejected[rho]) {
            throw AlgorithmError("no arrival at primary time " + format_scalar(partial) + " of interface " +
                                 std::to_string(level));
        }
        if (!report.primary_indices.empty() && rho <= report.primary_indices.back()) {
            throw AlgorithmError("primary arrivals are not in increasing order");
        }
        report.primary_indices.push_back(rho);
        T r;
        if (level == 0) {
            r = data.alpha[rho];
        } else {
            const T& previous = refl.back();
            r = data.alpha[rho] * previous / (data.alpha[report.primary_indices[level - 1]] * (T(1) - previous * previous));
        }
        if (!(r > -1 && r < 1)) {
            throw AlgorithmError("recovered R[" + std::to_string(level) + "] = " + format_scalar(r) +
                                 " lies outside (-1, 1)");
        }
        refl.push_back(std::move(r));
    }
    report.model.refl = std::move(refl);
    return report;
}

template <Scalar T>
std::vector<std::pair<TransitCountVector, TransitCountVector>> redundancy_pairs(const LatticeSet<T>& set,
                                                                                std::size_t n) {
    std::vector<std::pair<TransitCountVector, TransitCountVector>> out;
    if (set.tau.empty() || n == 0 || n + 1 >= set.tau.size()) return out;
    for (const auto& k : set.points) {
        if (k[n - 1] != 1 || k[n] != 1 || k[n + 1] != 1) continue;
        TransitCountVector next = k;
        ++next[n];
        if (set.contains(next)) out.emplace_back(k, std::move(next));
    }
    return out;
}

template <Scalar T>
T consensus(std::vector<T> values, const T& cluster_tol) {
    if (values.empty()) throw ValidationError("consensus of an empty list");
    std::sort(values.begin(), values.end());

    struct Summary {
        std::size_t size;
        T variance;
        T mean;
    };
    auto summarize = [&](std::size_t first, std::size_t last) {
        T sum = 0;
        for (std::size_t i = first; i < last; ++i) sum += values[i];
        const T count = T(static_cast<long>(last - first));
        T mean = sum / count;
        T spread = 0;
        for (std::size_t i = first; i < last; ++i) spread += (values[i] - mean) * (values[i] - mean);
        return Summary{last - first, T(spread / count), mean};
    };

    std::optional<Summary> best;
    std::size_t first = 0;
    for (std::size_t i = 1; i <= values.size(); ++i) {
        if (i < values.size() && values[i] - values[i - 1] <= cluster_tol) continue;
        auto current = summarize(first, i);
        const bool better = !best || current.size > best->size ||
                            (current.size == best->size &&
                             (current.variance < best->variance ||
                              (current.variance == best->variance && current.mean < best->mean)));
        if (better) best = std::move(current);
        first = i;
    }
    return best->mean;
}

template <Scalar T>
CorrectionResult<T> correct_reflectivity(const Model<T>& recovered, const Data<T>& data,
                                         const CorrectionOptions<T>& options) {
    validate_data(data);
    validate_model(recovered.tau, recovered.refl, ModelCheck{.allow_single_interface = true});
    const T tol = inverse_time_tol(data, options.time_tol);
    T cluster_tol;
    if constexpr (is_exact_v<T>) {
        if (options.cluster_tol && !is_zero(*options.cluster_tol)) {
            throw ValidationError("cluster tolerance must be 0 in rational mode");
        }
        cluster_tol = 0;
    } else {
        cluster_tol = options.cluster_tol.value_or(1e-6);
    }
    const std::size_t layers = recovered.layers();
    const auto& tau = recovered.tau;

    CorrectionResult<T> result;
    if (layers >= 4) {
        const auto lattice = enumerate_lattice_set(tau, T(data.sigma.back() + tol), options.limits);
        for (std::size_t n = 1; n + 3 <= layers; ++n) {
            CorrectionSet<T> set;
            set.n = n;
            set.pairs = redundancy_pairs(lattice, n);
            for (const auto& [k, next] : set.pairs) {
                const auto j = find_arrival(data, arrival_time(k, tau), tol);
                const auto j_next = find_arrival(data, arrival_time(next, tau), tol);
                if (j == data.size() || j_next == data.size()) continue;
                set.ratios.push_back(-data.alpha[j_next] / (T(2) * data.alpha[j]));
            }
            if (!set.ratios.empty()) set.consensus = consensus(set.ratios, cluster_tol);
            result.sets.push_back(std::move(set));
        }
    }

    auto& refl = result.refl;
    refl.push_back(recovered.refl.front());
    auto check = [&](const T& r, std::size_t n) {
        if (!(r > -1 && r < 1)) {
            throw AlgorithmError("corrected R[" + std::to_string(n) + "] = " + format_scalar(r) +
                                 " lies outside (-1, 1)");
        }
    };
    // Step 10: products of neighbouring reflectivities.
    for (std::size_t n = 1; n + 4 <= layers; ++n) {
        const auto& set = result.sets[n - 1];
        if (!set.consensus) {
            throw AlgorithmError("no usable redundancy pairs for interface " + std::to_string(n));
        }
        if (std::fabs(to_double(refl.back())) < options.min_divisor) {
            throw AlgorithmError("reflectivity R[" + std::to_string(n - 1) + "] too small to divide by");
        }
        T r = *set.consensus / refl.back();
        check(r, n);
        refl.push_back(std::move(r));
    }
    // Step 11: the last four interfaces from their primaries.
    T transmission = 1;
    for (const auto& r : refl) transmission *= T(1) - r * r;
    T partial = 0;
    for (std::size_t n = 0; n < refl.size(); ++n) partial += tau[n];
    for (std::size_t n = refl.size(); n <= layers; ++n) {
        partial += tau[n];
        const auto j = find_arrival(data, partial, tol);
        if (j == data.size()) {
            throw AlgorithmError("no arrival at primary time of interface " + std::to_string(n));
        }
        T r = data.alpha[j] / transmission;
        check(r, n);
        transmission *= T(1) - r * r;
        refl.push_back(std::move(r));
    }
    return result;
}

template <Scalar T>
void write_correction_csv(std::ostream& os, const std::vector<CorrectionSet<T>>& sets) {
    for (const auto& set : sets) {
        for (const auto& ratio : set.ratios) os << set.n << ',' << format_scalar(ratio) << '\n';
    }
}

#define LAYERWAVE_INSTANTIATE(T)                                                                          \
    template T inverse_time_tol<T>(const Data<T>&, const std::optional<T>&);                             \
    template std::size_t find_arrival<T>(const Data<T>&, const T&, const T&);                            \
    template InverseReport<T> invert_travel_times<T>(const Data<T>&, const InverseOptions<T>&);          \
    template InverseReport<T> invert<T>(const Data<T>&, const InverseOptions<T>&);                       \
    template std::vector<std::pair<TransitCountVector, TransitCountVector>> redundancy_pairs<T>(         \
        const LatticeSet<T>&, std::size_t);                                                              \
    template T consensus<T>(std::vector<T>, const T&);                                                   \
    template CorrectionResult<T> correct_reflectivity<T>(const Model<T>&, const Data<T>&,                \
                                                         const CorrectionOptions<T>&);                   \
    template void write_correction_csv<T>(std::ostream&, const std::vector<CorrectionSet<T>>&);

LAYERWAVE_INSTANTIATE(double)
LAYERWAVE_INSTANTIATE(Rational)

#undef LAYERWAVE_INSTANTIATE

}  // namespace layerwave
