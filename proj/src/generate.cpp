#include "layerwave/generate.hpp"

#include <string>

#include "layerwave/error.hpp"
#include "layerwave/forward.hpp"
#include "layerwave/lattice.hpp"
#include "layerwave/random.hpp"

namespace layerwave {

template <Scalar T>
Model<T> gen_random_generic(const GenerateOptions& options) {
    if (options.layers < 1) throw ValidationError("layers must be at least 1");
    if (!(options.refl_low >= 0 && options.refl_low <= options.refl_high && options.refl_high < 1)) {
        throw ValidationError("reflectivity range must satisfy 0 <= low <= high < 1");
    }
    if (!(options.tau_low > 0 && options.tau_low <= options.tau_high)) {
        throw ValidationError("travel time range must satisfy 0 < low <= high");
    }
    if (options.margin_floor < 0) throw ValidationError("margin floor must be non-negative");
    Engine engine(options.seed);
    const std::size_t size = options.layers + 1;
    for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
        Model<T> model;
        model.tau.reserve(size);
        model.refl.reserve(size);
        for (std::size_t n = 0; n < size; ++n) {
            model.tau.push_back(on_grid<T>(uniform(engine, options.tau_low, options.tau_high), options.tau_grid));
        }
        for (std::size_t n = 0; n < size; ++n) {
            const double magnitude = uniform(engine, options.refl_low, options.refl_high);
            model.refl.push_back(on_grid<T>(random_sign(engine) * magnitude, options.refl_grid));
        }
        bool valid = true;
        for (std::size_t n = 0; n < size && valid; ++n) {
            valid = model.tau[n] > 0 && !is_zero(model.refl[n]) && abs_value(model.refl[n]) < 1;
        }
        if (!valid) continue;

        ForwardOptions<T> forward_options;
        if (options.max_lattice) forward_options.limits.max_terms = *options.max_lattice;
        try {
            if (options.min_lattice || options.max_lattice) {
                const auto set = enumerate_lattice_set(model.tau, total_travel_time(model), forward_options.limits);
                if (options.min_lattice && set.size() < *options.min_lattice) continue;
            }
            const auto report = is_generic(model, forward_options);
            if (report.generic() && report.margin >= options.margin_floor) return model;
        } catch (const GuardError&) {
            if (!options.max_lattice) throw;
        }
    }
    throw GuardError("no generic " + std::to_string(options.layers) + "-layer model with margin >= " +
                     format_scalar(options.margin_floor) + " in " + std::to_string(options.max_attempts) +
                     " attempts");
}

template Model<double> gen_random_generic<double>(const GenerateOptions&);
template Model<Rational> gen_random_generic<Rational>(const GenerateOptions&);

}  // namespace layerwave
