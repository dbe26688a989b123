#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "layerwave/amplitude.hpp"
#include "layerwave/core.hpp"
#include "layerwave/error.hpp"
#include "layerwave/forward.hpp"
#include "layerwave/generate.hpp"
#include "layerwave/inverse.hpp"
#include "layerwave/io.hpp"
#include "layerwave/lattice.hpp"
#include "layerwave/oracle.hpp"
#include "layerwave/perturb.hpp"

namespace lw = layerwave;

namespace {

struct Common {
    bool rational = false;
    std::string output = "-";
};

struct ForwardArgs {
    std::string model;
    std::optional<std::string> t_max;
    std::optional<std::string> tol;
    std::string emit_psi;
};

struct InvertArgs {
    std::string data;
    bool robust = false;
    std::optional<std::string> tol;
    std::string report;
    std::size_t max_layers = 64;
};

struct CorrectArgs {
    std::string data;
    std::string model;
    std::optional<std::string> cluster_tol;
    std::optional<std::string> tol;
    std::string emit_sets;
};

struct OracleArgs {
    std::string model;
    std::optional<std::string> t_max;
    std::string emit_weights;
};

struct DistortArgs {
    std::string data;
    std::optional<std::string> decimate;
    std::vector<std::string> spurious;
    std::size_t spurious_count = 0;
    std::uint64_t seed = 0;
    std::string guard_tol = "0";
    std::optional<double> sine_amplitude;
    std::vector<double> window;
    double omega = 6.283185307179586;
    double phase = 0.0;
    std::optional<std::string> shift;
};

struct GenArgs {
    std::size_t layers = 1;
    std::uint64_t seed = 0;
    double margin_floor = 1e-9;
    std::vector<double> refl_range{0.05, 0.8};
    std::optional<std::size_t> min_lattice;
    std::optional<std::size_t> max_lattice;
    std::size_t max_attempts = 1000;
};

struct LatticeArgs {
    std::string model;
    std::optional<std::string> bound;
    bool project = false;
    std::string terms;
};

std::optional<std::size_t> max_terms_override() {
    const char* env = std::getenv("LAYERWAVE_MAX_TERMS");
    if (env == nullptr || *env == '\0') return std::nullopt;
    try {
        std::size_t used = 0;
        const unsigned long long value = std::stoull(env, &used);
        if (used != std::string(env).size() || value == 0) throw std::invalid_argument(env);
        return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
        throw lw::ValidationError(std::string("LAYERWAVE_MAX_TERMS must be a positive integer, got '") + env + "'");
    }
}

lw::EnumerationLimits enumeration_limits() {
    lw::EnumerationLimits limits;
    if (auto v = max_terms_override()) limits.max_terms = *v;
    return limits;
}

lw::OracleLimits oracle_limits() {
    lw::OracleLimits limits;
    if (auto v = max_terms_override()) limits.max_sequences = *v;
    return limits;
}

template <lw::Scalar T>
std::optional<T> optional_scalar(const std::optional<std::string>& text, const std::string& what) {
    if (!text) return std::nullopt;
    try {
        return lw::parse_scalar<T>(*text);
    } catch (const lw::ValidationError& e) {
        throw lw::ValidationError(what + ": " + e.what());
    }
}

template <lw::Scalar T>
lw::Model<T> load_model(const std::string& path) {
    auto raw = lw::model_from_json<T>(lw::read_json(path));
    return lw::validate_model(std::move(raw.tau), std::move(raw.refl), lw::ModelCheck{.allow_single_interface = true});
}

template <lw::Scalar T>
lw::Data<T> load_data(const std::string& path) {
    auto data = lw::data_from_json<T>(lw::read_json(path));
    lw::validate_data(data);
    return data;
}

template <typename F>
void write_csv(const std::string& path, F&& emit) {
    if (path.empty()) return;
    std::ostringstream os;
    emit(os);
    lw::write_text(path, os.str());
}

template <lw::Scalar T>
void run_forward(const Common& common, const ForwardArgs& args) {
    const auto model = load_model<T>(args.model);
    lw::ForwardOptions<T> options;
    options.t_max = optional_scalar<T>(args.t_max, "--t-max");
    options.time_tol = optional_scalar<T>(args.tol, "--tol");
    options.limits = enumeration_limits();
    const auto result = lw::forward(model, options);
    write_csv(args.emit_psi, [&](std::ostream& os) { lw::write_psi_csv(os, result.map); });
    lw::write_json(common.output, lw::to_json(result.data));
}

template <lw::Scalar T>
void run_invert(const Common& common, const InvertArgs& args) {
    const auto data = load_data<T>(args.data);
    lw::InverseOptions<T> options;
    options.time_tol = optional_scalar<T>(args.tol, "--tol");
    options.robust = args.robust;
    options.max_layers = args.max_layers;
    options.limits = enumeration_limits();
    const auto report = lw::invert(data, options);
    if (!args.report.empty()) lw::write_json(args.report, lw::to_json(report, data));
    lw::write_json(common.output, lw::to_json(report.model));
}

template <lw::Scalar T>
void run_correct(const Common& common, const CorrectArgs& args) {
    const auto data = load_data<T>(args.data);
    const auto model = load_model<T>(args.model);
    lw::CorrectionOptions<T> options;
    options.cluster_tol = optional_scalar<T>(args.cluster_tol, "--cluster-tol");
    options.time_tol = optional_scalar<T>(args.tol, "--tol");
    options.limits = enumeration_limits();
    const auto result = lw::correct_reflectivity(model, data, options);
    write_csv(args.emit_sets, [&](std::ostream& os) { lw::write_correction_csv(os, result.sets); });
    lw::write_json(common.output, lw::to_json(lw::Model<T>{model.tau, result.refl}));
}

template <lw::Scalar T>
void run_oracle(const Common& common, const OracleArgs& args) {
    const auto model = load_model<T>(args.model);
    const T t_max = args.t_max ? *optional_scalar<T>(args.t_max, "--t-max") : lw::total_travel_time(model);
    if (!args.emit_weights.empty()) {
        const auto weights = lw::oracle_weights(model, t_max, oracle_limits());
        write_csv(args.emit_weights, [&](std::ostream& os) { lw::write_weights_csv(os, weights, model.tau); });
    }
    const auto data = lw::oracle_response(model, t_max, oracle_limits());
    if (data.empty()) throw lw::AlgorithmError("every arrival amplitude cancelled; the model is not generic");
    lw::write_json(common.output, lw::to_json(data));
}

// "time:amplitude"
template <lw::Scalar T>
lw::RawTerm<T> parse_point(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw lw::ValidationError("spurious point '" + text + "' must be time:amplitude");
    return {lw::parse_scalar<T>(text.substr(0, colon)), lw::parse_scalar<T>(text.substr(colon + 1))};
}

template <lw::Scalar T>
void run_distort(const Common& common, const DistortArgs& args) {
    const auto data = load_data<T>(args.data);
    lw::PerturbSpec<T> spec;
    spec.decimate_threshold = optional_scalar<T>(args.decimate, "--decimate");
    for (const auto& p : args.spurious) spec.spurious.push_back(parse_point<T>(p));
    if (args.spurious_count > 0) {
        lw::SpuriousDraw draw;
        draw.count = args.spurious_count;
        draw.seed = args.seed;
        spec.spurious_draw = draw;
    }
    spec.guard_tol = *optional_scalar<T>(args.guard_tol, "--guard-tol");
    if (args.sine_amplitude) {
        if (args.window.size() != 2) throw lw::ValidationError("--sine-amplitude needs --window t_a t_b");
        spec.sine = lw::SineWave{*args.sine_amplitude, args.window[0], args.window[1], args.omega, args.phase};
    }
    spec.shift = optional_scalar<T>(args.shift, "--shift");
    lw::write_json(common.output, lw::to_json(lw::perturb(data, spec)));
}

template <lw::Scalar T>
void run_gen(const Common& common, const GenArgs& args) {
    lw::GenerateOptions options;
    options.layers = args.layers;
    options.seed = args.seed;
    options.margin_floor = args.margin_floor;
    options.refl_low = args.refl_range.at(0);
    options.refl_high = args.refl_range.at(1);
    options.min_lattice = args.min_lattice;
    options.max_lattice = args.max_lattice;
    options.max_attempts = args.max_attempts;
    lw::write_json(common.output, lw::to_json(lw::gen_random_generic<T>(options)));
}

lw::TransitCountVector parse_k(const std::string& text) {
    std::vector<lw::Count> entries;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            entries.push_back(std::stoll(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw lw::ValidationError("malformed transit count vector '" + text + "'");
        }
    }
    return lw::TransitCountVector(std::move(entries));
}

template <lw::Scalar T>
void run_lattice(const Common& common, const LatticeArgs& args) {
    if (!args.terms.empty()) {
        const auto k = parse_k(args.terms);
        if (!k.is_member()) throw lw::ValidationError(lw::to_string(k) + " is not a transit count vector");
        write_csv(common.output, [&](std::ostream& os) { lw::write_terms_csv(os, lw::amplitude_terms(k)); });
        return;
    }
    if (args.model.empty()) throw lw::ValidationError("lattice needs a model file or --terms");
    const auto model = load_model<T>(args.model);
    const auto bound = args.bound ? *optional_scalar<T>(args.bound, "--bound") : lw::total_travel_time(model);
    const auto set = lw::enumerate_lattice_set(model.tau, bound, enumeration_limits());
    if (args.project) {
        write_csv(common.output, [&](std::ostream& os) {
            for (const auto& p : lw::project_onto_tau(set, model.tau)) {
                for (auto v : p.k) os << v << ',';
                os << lw::format_scalar(p.value) << '\n';
            }
        });
    } else {
        write_csv(common.output, [&](std::ostream& os) { lw::write_lattice_csv(os, set); });
    }
}

template <typename F>
void dispatch(const Common& common, F&& run) {
    if (common.rational) {
        run(lw::Rational{});
    } else {
        run(0.0);
    }
}

int report_error(lw::ErrorKind kind, const std::string& message) {
    lw::Json j;
    j["error"] = lw::to_string(kind);
    j["message"] = message;
    j["exit_code"] = static_cast<int>(kind);
    std::cerr << j.dump() << '\n';
    return static_cast<int>(kind);
}

void add_common(CLI::App* sub, Common& common) {
    sub->add_flag("--rational", common.rational, "Exact rational arithmetic");
    sub->add_option("-o,--output", common.output, "Output path, - for stdout");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Layered-medium impulse responses: forward modelling, inversion and verification"};
    app.require_subcommand(1);
    Common common;

    ForwardArgs fwd;
    auto* forward_cmd = app.add_subcommand("forward", "Model JSON to Data JSON");
    forward_cmd->add_option("model", fwd.model, "Model JSON")->required();
    forward_cmd->add_option("--t-max", fwd.t_max, "Response window end (default |tau|)");
    forward_cmd->add_option("--tol", fwd.tol, "Time merging tolerance (float mode)");
    forward_cmd->add_option("--emit-psi", fwd.emit_psi, "Write the enumeration map as CSV");
    add_common(forward_cmd, common);

    InvertArgs inv;
    auto* invert_cmd = app.add_subcommand("invert", "Data JSON to Model JSON");
    invert_cmd->add_option("data", inv.data, "Data JSON")->required();
    invert_cmd->add_flag("--robust", inv.robust, "Reject unexplained candidate primaries");
    invert_cmd->add_option("--tol", inv.tol, "Arrival matching tolerance (float mode)");
    invert_cmd->add_option("--report", inv.report, "Write the inversion report JSON");
    invert_cmd->add_option("--max-layers", inv.max_layers, "Layer guard");
    add_common(invert_cmd, common);

    CorrectArgs cor;
    auto* correct_cmd = app.add_subcommand("correct", "Reflectivity correction from redundant multiples");
    correct_cmd->add_option("data", cor.data, "Data JSON")->required();
    correct_cmd->add_option("model", cor.model, "Recovered model JSON")->required();
    correct_cmd->add_option("--cluster-tol", cor.cluster_tol, "Consensus clustering tolerance");
    correct_cmd->add_option("--tol", cor.tol, "Arrival matching tolerance (float mode)");
    correct_cmd->add_option("--emit-sets", cor.emit_sets, "Write the ratio sets as CSV");
    add_common(correct_cmd, common);

    OracleArgs ora;
    auto* oracle_cmd = app.add_subcommand("oracle", "Impulse response by scattering-sequence enumeration");
    oracle_cmd->add_option("model", ora.model, "Model JSON")->required();
    oracle_cmd->add_option("--t-max", ora.t_max, "Response window end (default |tau|)");
    oracle_cmd->add_option("--emit-weights", ora.emit_weights, "Write summed weights per k as CSV");
    add_common(oracle_cmd, common);

    DistortArgs dis;
    auto* distort_cmd = app.add_subcommand("distort", "Perturb Data JSON");
    distort_cmd->add_option("data", dis.data, "Data JSON")->required();
    distort_cmd->add_option("--decimate", dis.decimate, "Drop arrivals with |alpha| below this");
    distort_cmd->add_option("--spurious", dis.spurious, "Extra arrival time:amplitude (repeatable)");
    distort_cmd->add_option("--spurious-count", dis.spurious_count, "Number of random spurious arrivals");
    distort_cmd->add_option("--seed", dis.seed, "Seed for random spurious arrivals");
    distort_cmd->add_option("--guard-tol", dis.guard_tol, "Minimum distance of spurious arrivals");
    distort_cmd->add_option("--sine-amplitude", dis.sine_amplitude, "Additive sine amplitude");
    distort_cmd->add_option("--window", dis.window, "Sine window t_a t_b")->expected(2);
    distort_cmd->add_option("--omega", dis.omega, "Sine angular frequency");
    distort_cmd->add_option("--phase", dis.phase, "Sine phase");
    distort_cmd->add_option("--shift", dis.shift, "Shift all times by this amount");
    add_common(distort_cmd, common);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Random generic model");
    gen_cmd->add_option("--layers", gen.layers, "Number of layers M")->required();
    gen_cmd->add_option("--seed", gen.seed, "Random seed");
    gen_cmd->add_option("--margin-floor", gen.margin_floor, "Smallest accepted arrival-time gap");
    gen_cmd->add_option("--refl-range", gen.refl_range, "Range of |R|")->expected(2);
    gen_cmd->add_option("--min-lattice", gen.min_lattice, "Resample below this lattice size");
    gen_cmd->add_option("--max-lattice", gen.max_lattice, "Resample above this lattice size");
    gen_cmd->add_option("--max-attempts", gen.max_attempts, "Resample budget");
    add_common(gen_cmd, common);

    LatticeArgs lat;
    auto* lattice_cmd = app.add_subcommand("lattice", "Lattice set or amplitude polynomial as CSV");
    lattice_cmd->add_option("model", lat.model, "Model JSON");
    lattice_cmd->add_option("--bound", lat.bound, "Time bound (default |tau|)");
    lattice_cmd->add_flag("--project", lat.project, "Emit projections onto the tau direction");
    lattice_cmd->add_option("--terms", lat.terms, "Emit the amplitude polynomial of k (comma-separated)");
    add_common(lattice_cmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error(lw::ErrorKind::Validation, e.what());
    }

    try {
        auto run = [&](auto zero) {
            using T = decltype(zero);
            if (forward_cmd->parsed()) run_forward<T>(common, fwd);
            if (invert_cmd->parsed()) run_invert<T>(common, inv);
            if (correct_cmd->parsed()) run_correct<T>(common, cor);
            if (oracle_cmd->parsed()) run_oracle<T>(common, ora);
            if (distort_cmd->parsed()) run_distort<T>(common, dis);
            if (gen_cmd->parsed()) run_gen<T>(common, gen);
            if (lattice_cmd->parsed()) run_lattice<T>(common, lat);
        };
        dispatch(common, run);
    } catch (const lw::Error& e) {
        return report_error(e.kind(), e.what());
    } catch (const std::exception& e) {
        return report_error(lw::ErrorKind::Algorithm, e.what());
    }
    return 0;
}
