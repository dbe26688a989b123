#include "layerwave/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "layerwave/error.hpp"

namespace layerwave {

template <Scalar T>
Model<T> validate_model(std::vector<T> tau, std::vector<T> refl, ModelCheck check) {
    if (tau.size() != refl.size()) {
        throw ValidationError("tau has " + std::to_string(tau.size()) + " entries but R has " +
                              std::to_string(refl.size()));
    }
    if (tau.empty()) throw ValidationError("model has no interfaces");
    if (tau.size() < 2 && !check.allow_single_interface) {
        throw ValidationError("model needs at least one layer (M >= 1)");
    }
    for (std::size_t n = 0; n < tau.size(); ++n) {
        if (!(tau[n] > 0)) {
            throw ValidationError("tau[" + std::to_string(n) + "] = " + format_scalar(tau[n]) + " is not positive");
        }
        if (!(refl[n] > -1 && refl[n] < 1)) {
            throw ValidationError("R[" + std::to_string(n) + "] = " + format_scalar(refl[n]) +
                                  " is outside (-1, 1)");
        }
    }
    return Model<T>{std::move(tau), std::move(refl)};
}

Model<double> from_physical(const PhysicalProfile& profile) {
    const auto& z = profile.depth;
    const auto& rho = profile.density;
    const auto& bulk = profile.modulus;
    if (z.size() < 2) throw ValidationError("profile needs depths z_{-1} and z_0 at least");
    if (rho.size() != z.size() || bulk.size() != z.size()) {
        throw ValidationError("profile needs one density and one modulus per medium (" + std::to_string(z.size()) +
                              ")");
    }
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!(rho[i] > 0) || !(bulk[i] > 0)) {
            throw ValidationError("medium " + std::to_string(static_cast<long>(i) - 1) +
                                  " has non-positive density or modulus");
        }
        if (i > 0 && !(z[i] > z[i - 1])) {
            throw ValidationError("depths must increase strictly (z_" + std::to_string(static_cast<long>(i) - 1) + ")");
        }
    }
    const std::size_t interfaces = z.size() - 1;  // z_0..z_M
    std::vector<double> tau(interfaces);
    std::vector<double> refl(interfaces);
    for (std::size_t n = 0; n < interfaces; ++n) {
        // Slab above z_n is medium n-1 (vector slot n).
        const double speed = std::sqrt(bulk[n] / rho[n]);
        tau[n] = 2.0 * (z[n + 1] - z[n]) / speed;
        const double upper = std::sqrt(bulk[n] * rho[n]);
        const double lower = std::sqrt(bulk[n + 1] * rho[n + 1]);
        refl[n] = (upper - lower) / (upper + lower);
    }
    return validate_model(std::move(tau), std::move(refl), ModelCheck{.allow_single_interface = true});
}

template <Scalar T>
T total_travel_time(const Model<T>& model) {
    T sum = 0;
    for (const auto& t : model.tau) sum += t;
    return sum;
}

template <Scalar T>
NormalizeOptions<T> default_normalize_options(const RawTermList<T>& terms) {
    NormalizeOptions<T> options;
    if constexpr (!is_exact_v<T>) {
        double max_time = 0.0;
        for (const auto& term : terms) max_time = std::max(max_time, std::fabs(term.time));
        options.time_tol = 1e-9 * max_time;
        options.amp_zero_tol = 1e-12;
        options.max_cluster_span = 100.0 * options.time_tol;
    }
    return options;
}

template <Scalar T>
std::vector<Cluster> cluster_terms(RawTermList<T>& terms, const NormalizeOptions<T>& options) {
    if constexpr (is_exact_v<T>) {
        if (!is_zero(options.time_tol)) throw ValidationError("time_tol must be 0 in rational mode");
    }
    if (options.time_tol < 0) throw ValidationError("time_tol must be non-negative");
    std::stable_sort(terms.begin(), terms.end(),
                     [](const RawTerm<T>& a, const RawTerm<T>& b) { return a.time < b.time; });

    std::vector<Cluster> clusters;
    std::size_t i = 0;
    while (i < terms.size()) {
        Cluster cluster{i, 1, false};
        std::size_t j = i + 1;
        while (j < terms.size() && terms[j].time - terms[j - 1].time <= options.time_tol) ++j;
        cluster.count = j - i;
        if (options.max_cluster_span && cluster.count > 1 &&
            terms[j - 1].time - terms[i].time > *options.max_cluster_span) {
            throw ValidationError("arrival cluster starting at t = " + format_scalar(terms[i].time) +
                                  " spans more than the cluster guard; time tolerance too coarse");
        }
        T sum = 0;
        double magnitude = 0.0;
        for (std::size_t m = i; m < j; ++m) {
            sum += terms[m].amplitude;
            magnitude += std::fabs(to_double(terms[m].amplitude));
        }
        if constexpr (is_exact_v<T>) {
            cluster.kept = !is_zero(sum);
        } else {
            cluster.kept = sum != 0.0 && std::fabs(sum) > options.amp_zero_tol * magnitude;
        }
        clusters.push_back(cluster);
        i = j;
    }
    return clusters;
}

template <Scalar T>
Data<T> normalize(RawTermList<T> terms, const NormalizeOptions<T>& options) {
    auto clusters = cluster_terms(terms, options);
    Data<T> data;
    for (const auto& cluster : clusters) {
        if (!cluster.kept) continue;
        T sum = 0;
        for (std::size_t m = cluster.first; m < cluster.first + cluster.count; ++m) sum += terms[m].amplitude;
        data.sigma.push_back(terms[cluster.first].time);
        data.alpha.push_back(std::move(sum));
    }
    return data;
}

template <Scalar T>
Data<T> normalize(RawTermList<T> terms) {
    auto options = default_normalize_options(terms);
    return normalize(std::move(terms), options);
}

template <Scalar T>
void validate_data(const Data<T>& data) {
    if (data.sigma.size() != data.alpha.size()) {
        throw ValidationError("sigma has " + std::to_string(data.sigma.size()) + " entries but alpha has " +
                              std::to_string(data.alpha.size()));
    }
    if (data.sigma.empty()) throw ValidationError("data is empty");
    for (std::size_t n = 0; n < data.size(); ++n) {
        if (n > 0 && !(data.sigma[n] > data.sigma[n - 1])) {
            throw ValidationError("sigma is not strictly increasing at index " + std::to_string(n));
        }
        if (is_zero(data.alpha[n])) throw ValidationError("alpha[" + std::to_string(n) + "] is zero");
    }
}

template <Scalar T>
Data<double> to_float(const Data<T>& data) {
    Data<double> out;
    for (const auto& s : data.sigma) out.sigma.push_back(to_double(s));
    for (const auto& a : data.alpha) out.alpha.push_back(to_double(a));
    return out;
}

template <Scalar T>
Model<double> to_float(const Model<T>& model) {
    Model<double> out;
    for (const auto& t : model.tau) out.tau.push_back(to_double(t));
    for (const auto& r : model.refl) out.refl.push_back(to_double(r));
    return out;
}

#define LAYERWAVE_INSTANTIATE(T)                                                                      \
    template Model<T> validate_model<T>(std::vector<T>, std::vector<T>, ModelCheck);                 \
    template T total_travel_time<T>(const Model<T>&);                                                \
    template NormalizeOptions<T> default_normalize_options<T>(const RawTermList<T>&);                \
    template std::vector<Cluster> cluster_terms<T>(RawTermList<T>&, const NormalizeOptions<T>&);     \
    template Data<T> normalize<T>(RawTermList<T>, const NormalizeOptions<T>&);                       \
    template Data<T> normalize<T>(RawTermList<T>);                                                   \
    template void validate_data<T>(const Data<T>&);                                                  \
    template Data<double> to_float<T>(const Data<T>&);                                               \
    template Model<double> to_float<T>(const Model<T>&);

LAYERWAVE_INSTANTIATE(double)
LAYERWAVE_INSTANTIATE(Rational)

#undef LAYERWAVE_INSTANTIATE

}  // namespace layerwave
