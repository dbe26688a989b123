#include "layerwave/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "layerwave/amplitude.hpp"
#include "layerwave/error.hpp"

namespace layerwave {

namespace {

template <Scalar T>
T resolve_time_tol(const ForwardOptions<T>& options, const T& t_max) {
    if constexpr (is_exact_v<T>) {
        if (options.time_tol && !is_zero(*options.time_tol)) {
            throw ValidationError("time tolerance must be 0 in rational mode");
        }
        return T(0);
    } else {
        if (options.time_tol) {
            if (*options.time_tol < 0) throw ValidationError("time tolerance must be non-negative");
            return *options.time_tol;
        }
        return 1e-9 * t_max;
    }
}

// Lattice points with times and amplitudes, sorted into arrival order and
// merged the same way `normalize` merges raw terms.
template <Scalar T>
ForwardResult<T> run_forward(const Model<T>& model, const ForwardOptions<T>& options) {
    validate_model(model.tau, model.refl, ModelCheck{.allow_single_interface = true});
    const T t_max = options.t_max ? *options.t_max : total_travel_time(model);
    const T time_tol = resolve_time_tol(options, t_max);

    ForwardResult<T> result;
    auto& map = result.map;
    map.lattice = enumerate_lattice_set(model.tau, T(t_max + time_tol), options.limits);
    const std::size_t count = map.lattice.size();
    map.time.reserve(count);
    map.amplitude.reserve(count);
    for (const auto& k : map.lattice.points) {
        map.time.push_back(arrival_time(k, model.tau));
        map.amplitude.push_back(amplitude_eval(model.refl, k));
    }

    // Lattice points are already lexicographic, so a stable sort by time
    // breaks ties by k.
    map.arrival_order.resize(count);
    std::iota(map.arrival_order.begin(), map.arrival_order.end(), std::size_t{0});
    std::stable_sort(map.arrival_order.begin(), map.arrival_order.end(),
                     [&](std::size_t a, std::size_t b) { return map.time[a] < map.time[b]; });

    RawTermList<T> terms;
    terms.reserve(count);
    for (auto i : map.arrival_order) terms.push_back({map.time[i], map.amplitude[i]});
    NormalizeOptions<T> normalize_options;
    normalize_options.time_tol = time_tol;
    if constexpr (!is_exact_v<T>) {
        normalize_options.amp_zero_tol = options.amp_zero_tol;
        normalize_options.max_cluster_span = 100.0 * time_tol;
    }
    const auto clusters = cluster_terms(terms, normalize_options);

    map.psi.assign(count, 0);
    for (const auto& cluster : clusters) {
        if (!cluster.kept) continue;
        ++map.d;
        T sum = 0;
        for (std::size_t m = cluster.first; m < cluster.first + cluster.count; ++m) {
            sum += terms[m].amplitude;
            map.psi[map.arrival_order[m]] = map.d;
        }
        result.data.sigma.push_back(terms[cluster.first].time);
        result.data.alpha.push_back(std::move(sum));
    }
    return result;
}

}  // namespace

template <Scalar T>
bool EnumerationMap<T>::is_bijective() const {
    if (d != psi.size()) return false;
    return std::none_of(psi.begin(), psi.end(), [](std::size_t v) { return v == 0; });
}

template <Scalar T>
std::vector<std::size_t> EnumerationMap<T>::preimage(std::size_t n) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (psi[i] == n) out.push_back(i);
    }
    return out;
}

template <Scalar T>
ForwardResult<T> forward(const Model<T>& model, const ForwardOptions<T>& options) {
    auto result = run_forward(model, options);
    if (result.data.empty()) {
        throw AlgorithmError("every arrival amplitude cancelled; the model is not generic");
    }
    return result;
}

TransitCountVector IntMatrix::column(std::size_t c) const {
    TransitCountVector k(rows);
    for (std::size_t r = 0; r < rows; ++r) k[r] = (*this)(r, c);
    return k;
}

IntMatrix IntMatrix::operator*(const IntMatrix& other) const {
    if (cols != other.rows) throw ValidationError("matrix dimension mismatch");
    IntMatrix out(rows, other.cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t m = 0; m < cols; ++m) {
            const Count a = (*this)(r, m);
            if (a == 0) continue;
            for (std::size_t c = 0; c < other.cols; ++c) out(r, c) += a * other(m, c);
        }
    }
    return out;
}

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1;
    return out;
}

template <Scalar T>
std::vector<T> row_times(const std::vector<T>& row, const IntMatrix& matrix) {
    if (row.size() != matrix.rows) throw ValidationError("row vector length does not match matrix rows");
    std::vector<T> out(matrix.cols, T(0));
    for (std::size_t c = 0; c < matrix.cols; ++c) {
        for (std::size_t r = 0; r < matrix.rows; ++r) {
            const Count a = matrix(r, c);
            if (a != 0) out[c] += T(static_cast<long>(a)) * row[r];
        }
    }
    return out;
}

IntMatrix primary_matrix(std::size_t layers) {
    IntMatrix k(layers + 1, layers + 1);
    for (std::size_t r = 0; r <= layers; ++r) {
        for (std::size_t c = r; c <= layers; ++c) k(r, c) = 1;
    }
    return k;
}

IntMatrix primary_matrix_inverse(std::size_t layers) {
    IntMatrix j(layers + 1, layers + 1);
    for (std::size_t r = 0; r <= layers; ++r) {
        j(r, r) = 1;
        if (r + 1 <= layers) j(r, r + 1) = -1;
    }
    return j;
}

template <Scalar T>
IntMatrix enumeration_matrix(const EnumerationMap<T>& map, const Data<T>& data) {
    if (!map.is_bijective()) {
        throw AlgorithmError("enumeration function is not a bijection; the model is not generic");
    }
    if (data.size() != map.d) throw ValidationError("data length does not match the enumeration map");
    const std::size_t rows = map.lattice.tau.size();
    IntMatrix a(rows, map.d);
    for (std::size_t i = 0; i < map.psi.size(); ++i) {
        const auto& k = map.lattice.points[i];
        for (std::size_t r = 0; r < rows; ++r) a(r, map.psi[i] - 1) = k[r];
    }
    const auto sigma = row_times(map.lattice.tau, a);
    for (std::size_t n = 0; n < sigma.size(); ++n) {
        bool ok = false;
        if constexpr (is_exact_v<T>) {
            ok = sigma[n] == data.sigma[n];
        } else {
            ok = std::fabs(sigma[n] - data.sigma[n]) <= 1e-12 * std::fabs(data.sigma[n]);
        }
        if (!ok) {
            throw AlgorithmError("tau A differs from sigma at column " + std::to_string(n) + ": " +
                                 format_scalar(sigma[n]) + " vs " + format_scalar(data.sigma[n]));
        }
    }
    return a;
}

std::vector<std::size_t> primary_columns(const IntMatrix& enumeration) {
    const std::size_t layers = enumeration.rows - 1;
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n <= layers; ++n) {
        const auto primary = primary_vector(n, layers);
        std::size_t c = 0;
        while (c < enumeration.cols && enumeration.column(c) != primary) ++c;
        if (c == enumeration.cols) {
            throw AlgorithmError("primary vector " + to_string(primary) + " missing from the enumeration matrix");
        }
        out.push_back(c);
    }
    return out;
}

template <Scalar T>
std::vector<T> primary_times(const IntMatrix& enumeration, const Data<T>& data) {
    std::vector<T> out;
    for (auto c : primary_columns(enumeration)) out.push_back(data.sigma[c]);
    return out;
}

template <Scalar T>
GenericityReport<T> is_generic(const Model<T>& model, const ForwardOptions<T>& options) {
    const auto result = run_forward(model, options);
    const auto& map = result.map;
    const T t_max = options.t_max ? *options.t_max : total_travel_time(model);
    const T time_tol = resolve_time_tol(options, t_max);

    GenericityReport<T> report;
    const auto& order = map.arrival_order;
    for (std::size_t m = 1; m < order.size(); ++m) {
        const T gap = map.time[order[m]] - map.time[order[m - 1]];
        const double gap_value = to_double(gap);
        report.margin = std::min(report.margin, gap_value);
        bool collide = false;
        if constexpr (is_exact_v<T>) {
            collide = is_zero(gap);
        } else {
            collide = gap <= 10.0 * time_tol;
        }
        if (collide) {
            report.time_injective = false;
            report.collisions.emplace_back(map.lattice.points[order[m - 1]], map.lattice.points[order[m]]);
        }
    }
    for (std::size_t i = 0; i < map.psi.size(); ++i) {
        if (map.psi[i] == 0) report.zero_amplitudes.push_back(map.lattice.points[i]);
    }
    return report;
}

template <Scalar T>
std::pair<Model<T>, Model<T>> ill_posed_pair(const T& tau_const, std::size_t layers, const std::vector<T>& refl) {
    if (layers < 1) throw ValidationError("ill-posed pair needs at least one layer");
    if (refl.size() != layers + 1) {
        throw ValidationError("expected " + std::to_string(layers + 1) + " reflectivities, got " +
                              std::to_string(refl.size()));
    }
    auto base = validate_model(std::vector<T>(layers + 1, tau_const), refl);

    const std::size_t deeper = layers + 1;
    std::vector<T> tau_ext(deeper + 1, tau_const);
    std::vector<T> refl_ext = refl;
    refl_ext.push_back(T(0));
    const auto deepest = primary_vector(deeper, deeper);
    const T target = arrival_time(deepest, tau_ext);

    // S: every other lattice point arriving together with the deepest primary.
    // None of them reaches the last layer, so their amplitudes ignore R_{M+1}.
    const auto lattice = enumerate_lattice_set(tau_ext, target);
    T cancel_sum = 0;
    std::size_t coincident = 0;
    for (const auto& k : lattice.points) {
        if (k == deepest) continue;
        const T t = arrival_time(k, tau_ext);
        bool same = false;
        if constexpr (is_exact_v<T>) {
            same = t == target;
        } else {
            same = std::fabs(t - target) <= 1e-12 * target;
        }
        if (!same) continue;
        ++coincident;
        cancel_sum += amplitude_eval(refl_ext, k);
    }
    if (coincident == 0) throw AlgorithmError("no lattice point shares the deepest primary's arrival time");

    T transmission = 1;
    for (const auto& r : refl) transmission *= T(1) - r * r;
    T last = -cancel_sum / transmission;
    if (is_zero(last) || !(last > -1 && last < 1)) {
        throw ValidationError("induced deepest reflectivity " + format_scalar(last) + " is not in (-1, 1) \\ {0}");
    }
    refl_ext.back() = last;
    auto extended = validate_model(std::move(tau_ext), std::move(refl_ext));
    return {std::move(base), std::move(extended)};
}

template <Scalar T>
void write_psi_csv(std::ostream& os, const EnumerationMap<T>& map) {
    for (auto i : map.arrival_order) {
        for (auto c : map.lattice.points[i]) os << c << ',';
        os << format_scalar(map.time[i]) << ',' << format_scalar(map.amplitude[i]) << ',' << map.psi[i] << '\n';
    }
}

#define LAYERWAVE_INSTANTIATE(T)                                                                            \
    template struct EnumerationMap<T>;                                                                     \
    template ForwardResult<T> forward<T>(const Model<T>&, const ForwardOptions<T>&);                      \
    template std::vector<T> row_times<T>(const std::vector<T>&, const IntMatrix&);                         \
    template IntMatrix enumeration_matrix<T>(const EnumerationMap<T>&, const Data<T>&);                    \
    template std::vector<T> primary_times<T>(const IntMatrix&, const Data<T>&);                            \
    template GenericityReport<T> is_generic<T>(const Model<T>&, const ForwardOptions<T>&);                \
    template std::pair<Model<T>, Model<T>> ill_posed_pair<T>(const T&, std::size_t, const std::vector<T>&); \
    template void write_psi_csv<T>(std::ostream&, const EnumerationMap<T>&);

LAYERWAVE_INSTANTIATE(double)
LAYERWAVE_INSTANTIATE(Rational)

#undef LAYERWAVE_INSTANTIATE

}  // namespace layerwave
