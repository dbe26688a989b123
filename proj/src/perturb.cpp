#include "layerwave/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "layerwave/error.hpp"
#include "layerwave/random.hpp"

namespace layerwave {

namespace {

// True when some sorted time lies within tol of t.
template <Scalar T>
bool near_any(const std::vector<T>& sorted, const T& t, const T& tol) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), T(t - tol));
    return it != sorted.end() && *it <= t + tol;
}

template <Scalar T>
Data<T> renormalize(RawTermList<T> terms) {
    return normalize(std::move(terms), NormalizeOptions<T>{});
}

}  // namespace

template <Scalar T>
Data<T> decimate(const Data<T>& data, const T& threshold) {
    validate_data(data);
    if (threshold < 0) throw ValidationError("decimation threshold must be non-negative");
    Data<T> out;
    for (std::size_t j = 0; j < data.size(); ++j) {
        if (abs_value(data.alpha[j]) >= threshold) {
            out.sigma.push_back(data.sigma[j]);
            out.alpha.push_back(data.alpha[j]);
        }
    }
    if (out.empty()) {
        throw AlgorithmError("decimation at " + format_scalar(threshold) + " removed every arrival");
    }
    return out;
}

template <Scalar T>
Data<T> add_spurious(const Data<T>& data, const std::vector<RawTerm<T>>& points, const T& guard_tol) {
    validate_data(data);
    if (guard_tol < 0) throw ValidationError("guard tolerance must be non-negative");
    std::vector<T> taken = data.sigma;
    RawTermList<T> terms;
    terms.reserve(data.size() + points.size());
    for (std::size_t j = 0; j < data.size(); ++j) terms.push_back({data.sigma[j], data.alpha[j]});
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (!(p.time > 0)) throw ValidationError("spurious arrival " + std::to_string(i) + " has a non-positive time");
        if (is_zero(p.amplitude)) throw ValidationError("spurious arrival " + std::to_string(i) + " has zero amplitude");
        if (near_any(taken, p.time, guard_tol)) {
            throw ValidationError("spurious arrival " + std::to_string(i) + " at t = " + format_scalar(p.time) +
                                  " collides with an existing arrival");
        }
        taken.insert(std::upper_bound(taken.begin(), taken.end(), p.time), p.time);
        terms.push_back(p);
    }
    return renormalize(std::move(terms));
}

template <Scalar T>
std::vector<RawTerm<T>> random_spurious(const Data<T>& data, const SpuriousDraw& draw, const T& guard_tol) {
    validate_data(data);
    if (draw.count == 0) return {};
    if (data.size() < 2) throw ValidationError("random spurious arrivals need at least two data points");
    if (!(draw.min_amplitude > 0) || draw.max_amplitude < draw.min_amplitude) {
        throw ValidationError("spurious amplitude range must satisfy 0 < min <= max");
    }
    Engine engine(draw.seed);
    const double low = to_double(data.sigma.front());
    const double high = to_double(data.sigma.back());
    std::vector<T> taken = data.sigma;
    std::vector<RawTerm<T>> out;
    std::size_t attempts = 0;
    while (out.size() < draw.count) {
        if (++attempts > draw.max_attempts) {
            throw GuardError("could not place " + std::to_string(draw.count) + " spurious arrivals in " +
                             std::to_string(draw.max_attempts) + " attempts");
        }
        const T t = on_grid<T>(uniform(engine, low, high), draw.grid);
        const double magnitude = uniform(engine, draw.min_amplitude, draw.max_amplitude);
        const T a = on_grid<T>(random_sign(engine) * magnitude, draw.grid);
        if (!(t > data.sigma.front()) || !(t < data.sigma.back())) continue;
        if (is_zero(a) || near_any(taken, t, guard_tol)) continue;
        taken.insert(std::upper_bound(taken.begin(), taken.end(), t), t);
        out.push_back({t, a});
    }
    std::sort(out.begin(), out.end(), [](const RawTerm<T>& x, const RawTerm<T>& y) { return x.time < y.time; });
    return out;
}

template <Scalar T>
Data<T> sine_distort(const Data<T>& data, const SineWave& wave) {
    validate_data(data);
    if (!(wave.t_a <= wave.t_b)) throw ValidationError("sine window must satisfy t_a <= t_b");
    const T t_a = from_double<T>(wave.t_a);
    const T t_b = from_double<T>(wave.t_b);
    RawTermList<T> terms;
    terms.reserve(data.size());
    for (std::size_t j = 0; j < data.size(); ++j) {
        T a = data.alpha[j];
        if (data.sigma[j] >= t_a && data.sigma[j] <= t_b) {
            const double s = wave.amplitude * std::sin(wave.omega * to_double(data.sigma[j]) + wave.phase);
            a += from_double<T>(s);
        }
        terms.push_back({data.sigma[j], std::move(a)});
    }
    return renormalize(std::move(terms));
}

template <Scalar T>
Data<T> shift_times(const Data<T>& data, const T& kappa) {
    validate_data(data);
    if (!(data.sigma.front() + kappa > 0)) {
        throw ValidationError("shift by " + format_scalar(kappa) + " makes the first arrival time non-positive");
    }
    Data<T> out = data;
    for (auto& s : out.sigma) s += kappa;
    return out;
}

template <Scalar T>
Data<T> perturb(const Data<T>& data, const PerturbSpec<T>& spec) {
    Data<T> out = data;
    validate_data(out);
    if (spec.decimate_threshold) out = decimate(out, *spec.decimate_threshold);
    std::vector<RawTerm<T>> extra = spec.spurious;
    if (spec.spurious_draw) {
        auto drawn = random_spurious(add_spurious(out, extra, spec.guard_tol), *spec.spurious_draw, spec.guard_tol);
        extra.insert(extra.end(), drawn.begin(), drawn.end());
    }
    if (!extra.empty()) out = add_spurious(out, extra, spec.guard_tol);
    if (spec.sine) out = sine_distort(out, *spec.sine);
    if (spec.shift) out = shift_times(out, *spec.shift);
    return out;
}

#define LAYERWAVE_INSTANTIATE(T)                                                                          \
    template Data<T> decimate<T>(const Data<T>&, const T&);                                               \
    template Data<T> add_spurious<T>(const Data<T>&, const std::vector<RawTerm<T>>&, const T&);           \
    template std::vector<RawTerm<T>> random_spurious<T>(const Data<T>&, const SpuriousDraw&, const T&);    \
    template Data<T> sine_distort<T>(const Data<T>&, const SineWave&);                                    \
    template Data<T> shift_times<T>(const Data<T>&, const T&);                                            \
    template Data<T> perturb<T>(const Data<T>&, const PerturbSpec<T>&);

LAYERWAVE_INSTANTIATE(double)
LAYERWAVE_INSTANTIATE(Rational)

#undef LAYERWAVE_INSTANTIATE

}  // namespace layerwave
