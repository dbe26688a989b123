#include "layerwave/oracle.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "layerwave/error.hpp"

namespace layerwave {

namespace {

// Depth-first walk over scattering sequences, trying the shallower step
// first so that sequences come out in lexicographic order. Each interior
// vertex is classified as soon as its successor is known; all counters are
// maintained incrementally and undone on backtrack.
class SequenceWalker {
public:
    explicit SequenceWalker(std::size_t layers)
        : layers_(static_cast<int>(layers)),
          stats_{TransitCountVector(layers + 1), TransitCountVector(layers + 1), TransitCountVector(layers + 1),
                 TransitCountVector(layers + 1), TransitCountVector(layers + 1)} {}

    // enter(next, layer) decides whether to take the step crossing `layer`
    // (counters already include it); leave() undoes an accepted enter;
    // complete() sees each finished sequence.
    template <typename Enter, typename Leave, typename Complete>
    void run(Enter&& enter, Leave&& leave, Complete&& complete) {
        path_ = {-1, 0};
        stats_.kappa[0] = 1;
        if (enter(0, 0)) {
            descend(enter, leave, complete);
            leave();
        }
        stats_.kappa[0] = 0;
    }

    const SequenceStats& stats() const { return stats_; }
    const std::vector<int>& path() const { return path_; }

private:
    void apply(int prev, int cur, int next, Count delta) {
        const auto j = static_cast<std::size_t>(cur);
        if (prev == cur - 1 && next == cur - 1) {
            stats_.reflections_above[j] += delta;
        } else if (prev == cur + 1 && next == cur + 1) {
            stats_.reflections_below[j] += delta;
        } else {
            stats_.transmissions[j] += delta;
        }
        if (next == cur + 1) {
            stats_.kappa[static_cast<std::size_t>(next)] += delta;
            if (prev == cur - 1) stats_.beta[j] += delta;
        }
    }

    template <typename Enter, typename Leave, typename Complete>
    void descend(Enter& enter, Leave& leave, Complete& complete) {
        const int cur = path_.back();
        const int prev = path_[path_.size() - 2];
        for (int next : {cur - 1, cur + 1}) {
            if (next > layers_) continue;
            const int layer = next > cur ? next : cur;
            apply(prev, cur, next, +1);
            if (enter(next, layer)) {
                path_.push_back(next);
                if (next == -1) {
                    complete();
                } else {
                    descend(enter, leave, complete);
                }
                path_.pop_back();
                leave();
            }
            apply(prev, cur, next, -1);
        }
    }

    int layers_;
    std::vector<int> path_;
    SequenceStats stats_;
};

template <Scalar T>
T oracle_tol(const T& t_max) {
    if constexpr (is_exact_v<T>) {
        return T(0);
    } else {
        return 1e-9 * std::fabs(t_max);
    }
}

GuardError sequence_guard(std::size_t limit) {
    return GuardError("sequence enumeration exceeded " + std::to_string(limit) + " sequences");
}

// Every sequence arriving by t_max. Each step crosses one layer and costs
// half its two-way time, so elapsed time is tracked doubled.
template <Scalar T, typename Complete>
void walk_time_bounded(std::size_t layers, const std::vector<T>& tau, const T& t_max, OracleLimits limits,
                       Complete&& complete) {
    if (tau.size() != layers + 1) throw ValidationError("tau length does not match the layer count");
    for (std::size_t j = 0; j < tau.size(); ++j) {
        if (!(tau[j] > 0)) throw ValidationError("tau[" + std::to_string(j) + "] must be positive");
    }
    const T budget = T(2) * (t_max + oracle_tol(t_max));
    std::vector<T> back(layers + 1);  // doubled time from z_j back to z_{-1}
    T acc = 0;
    for (std::size_t j = 0; j <= layers; ++j) {
        acc += tau[j];
        back[j] = acc;
    }

    std::vector<T> elapsed{T(0)};
    std::size_t found = 0;
    SequenceWalker walker(layers);
    auto enter = [&](int next, int layer) {
        T t = elapsed.back() + tau[static_cast<std::size_t>(layer)];
        if (next >= 0 && t + back[static_cast<std::size_t>(next)] > budget) return false;
        if (next < 0 && t > budget) return false;
        elapsed.push_back(std::move(t));
        return true;
    };
    auto leave = [&] { elapsed.pop_back(); };
    walker.run(enter, leave, [&] {
        if (++found > limits.max_sequences) throw sequence_guard(limits.max_sequences);
        complete(walker);
    });
}

template <Scalar T>
bool weights_agree(const T& a, const T& b) {
    if constexpr (is_exact_v<T>) {
        return a == b;
    } else {
        return std::fabs(a - b) <= 1e-12 * (std::fabs(a) + std::fabs(b)) + 1e-300;
    }
}

}  // namespace

void validate_sequence(const ScatteringSequence& sequence, std::size_t layers) {
    const auto& p = sequence.path;
    if (p.size() < 3) throw ValidationError("a scattering sequence needs at least two steps");
    if (p.front() != -1 || p.back() != -1) throw ValidationError("a scattering sequence must start and end at -1");
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        if (p[i] < 0 || p[i] > static_cast<int>(layers)) {
            throw ValidationError("path entry " + std::to_string(i) + " is outside 0.." + std::to_string(layers));
        }
    }
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (std::abs(p[i] - p[i - 1]) != 1) {
            throw ValidationError("path step " + std::to_string(i) + " does not move by one interface");
        }
    }
}

SequenceStats stats(const ScatteringSequence& sequence, std::size_t layers) {
    validate_sequence(sequence, layers);
    const auto& p = sequence.path;
    SequenceStats s{TransitCountVector(layers + 1), TransitCountVector(layers + 1), TransitCountVector(layers + 1),
                    TransitCountVector(layers + 1), TransitCountVector(layers + 1)};
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        const int prev = p[i - 1];
        const int cur = p[i];
        const int next = p[i + 1];
        const auto j = static_cast<std::size_t>(cur);
        if (prev == cur - 1) {
            ++s.kappa[j];
            if (next == cur + 1) ++s.beta[j];
        }
        if (prev == next) {
            if (prev < cur) {
                ++s.reflections_above[j];
            } else {
                ++s.reflections_below[j];
            }
        } else {
            ++s.transmissions[j];
        }
    }
    return s;
}

template <Scalar T>
T stepwise_weight(const SequenceStats& s, const std::vector<T>& refl) {
    const std::size_t size = refl.size();
    if (s.kappa.size() != size) throw ValidationError("sequence statistics do not match the model size");
    T w = 1;
    for (std::size_t j = 0; j < size; ++j) {
        if (s.transmissions[j] % 2 != 0) {
            throw std::logic_error("odd number of transmissions at interface " + std::to_string(j));
        }
        const T& r = refl[j];
        const T minus = -r;
        w *= power(r, static_cast<std::uint64_t>(s.reflections_above[j]));
        w *= power(minus, static_cast<std::uint64_t>(s.reflections_below[j]));
        w *= power(T(1 - r * r), static_cast<std::uint64_t>(s.transmissions[j] / 2));
    }
    return w;
}

template <Scalar T>
T weight_eval(const SequenceStats& s, const std::vector<T>& refl) {
    const std::size_t size = refl.size();
    if (s.kappa.size() != size || s.beta.size() != size) {
        throw ValidationError("sequence statistics do not match the model size");
    }
    T w = 1;
    for (std::size_t j = 0; j < size; ++j) {
        const Count k = s.kappa[j];
        const Count shifted = j + 1 < size ? s.kappa[j + 1] : 0;
        const Count b = s.beta[j];
        if (b > k || b > shifted) throw std::logic_error("branch count exceeds transit count");
        const T& r = refl[j];
        const T minus = -r;
        w *= power(minus, static_cast<std::uint64_t>(shifted - b));
        w *= power(r, static_cast<std::uint64_t>(k - b));
        w *= power(T(1 - r * r), static_cast<std::uint64_t>(b));
    }
    const T direct = stepwise_weight(s, refl);
    if (!weights_agree(w, direct)) {
        throw std::logic_error("closed-form weight disagrees with the stepwise product for kappa " +
                               to_string(s.kappa));
    }
    return w;
}

template <Scalar T>
std::vector<ScatteringSequence> enumerate_sequences(std::size_t layers, const std::vector<T>& tau, const T& t_max,
                                                    OracleLimits limits) {
    std::vector<ScatteringSequence> out;
    walk_time_bounded(layers, tau, t_max, limits,
                      [&](const SequenceWalker& w) { out.push_back(ScatteringSequence{w.path()}); });
    return out;
}

template <Scalar T>
std::map<TransitCountVector, T> oracle_weights(const Model<T>& model, const T& t_max, OracleLimits limits) {
    validate_model(model.tau, model.refl, ModelCheck{.allow_single_interface = true});
    // Sequences sharing every counter share a weight; evaluate each class once.
    std::map<SequenceStats, std::uint64_t> classes;
    walk_time_bounded(model.layers(), model.tau, t_max, limits,
                      [&](const SequenceWalker& w) { ++classes[w.stats()]; });
    std::map<TransitCountVector, T> weights;
    for (const auto& [s, count] : classes) {
        T contribution = weight_eval(s, model.refl);
        contribution *= T(static_cast<double>(count));
        auto [it, inserted] = weights.try_emplace(s.kappa, T(0));
        it->second += contribution;
    }
    return weights;
}

template <Scalar T>
Data<T> oracle_response(const Model<T>& model, const T& t_max, OracleLimits limits) {
    const auto weights = oracle_weights(model, t_max, limits);
    RawTermList<T> terms;
    terms.reserve(weights.size());
    for (const auto& [k, w] : weights) terms.push_back({arrival_time(k, model.tau), w});
    NormalizeOptions<T> options;
    if constexpr (!is_exact_v<T>) {
        options.time_tol = oracle_tol(t_max);
        options.amp_zero_tol = 1e-12;
        options.max_cluster_span = 100.0 * options.time_tol;
    }
    return normalize(std::move(terms), options);
}

std::map<TransitCountVector, std::uint64_t> count_sequences_by_branch(const TransitCountVector& k,
                                                                      OracleLimits limits) {
    if (!k.is_member()) throw ValidationError("transit count vector " + to_string(k) + " is not a lattice member");
    const std::size_t layers = k.size() - 1;
    std::map<TransitCountVector, std::uint64_t> out;
    std::size_t found = 0;
    SequenceWalker walker(layers);
    // Every downward step is an arrival from above, so capping arrivals at k
    // bounds the path length by 2|k|.
    auto enter = [&](int next, int) {
        if (next < 0) return true;
        const auto j = static_cast<std::size_t>(next);
        return walker.stats().kappa[j] <= k[j];
    };
    walker.run(enter, [] {}, [&] {
        if (walker.stats().kappa != k) return;
        if (++found > limits.max_sequences) throw sequence_guard(limits.max_sequences);
        ++out[walker.stats().beta];
    });
    return out;
}

std::uint64_t count_sequences_by(const TransitCountVector& k, const TransitCountVector& b, OracleLimits limits) {
    if (b.size() != k.size()) throw ValidationError("branch count vector length does not match k");
    const auto counts = count_sequences_by_branch(k, limits);
    const auto it = counts.find(b);
    return it == counts.end() ? 0 : it->second;
}

template <Scalar T>
void write_weights_csv(std::ostream& os, const std::map<TransitCountVector, T>& weights, const std::vector<T>& tau) {
    for (const auto& [k, w] : weights) {
        for (auto v : k) os << v << ',';
        os << format_scalar(arrival_time(k, tau)) << ',' << format_scalar(w) << '\n';
    }
}

#define LAYERWAVE_INSTANTIATE(T)                                                                                 \
    template T stepwise_weight<T>(const SequenceStats&, const std::vector<T>&);                                  \
    template T weight_eval<T>(const SequenceStats&, const std::vector<T>&);                                      \
    template std::vector<ScatteringSequence> enumerate_sequences<T>(std::size_t, const std::vector<T>&, const T&, \
                                                                    OracleLimits);                               \
    template std::map<TransitCountVector, T> oracle_weights<T>(const Model<T>&, const T&, OracleLimits);         \
    template Data<T> oracle_response<T>(const Model<T>&, const T&, OracleLimits);                                \
    template void write_weights_csv<T>(std::ostream&, const std::map<TransitCountVector, T>&,                    \
                                       const std::vector<T>&);

LAYERWAVE_INSTANTIATE(double)
LAYERWAVE_INSTANTIATE(Rational)

#undef LAYERWAVE_INSTANTIATE

}  // namespace layerwave
