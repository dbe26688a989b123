#include "layerwave/io.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

#include "layerwave/error.hpp"

namespace layerwave {

namespace {

template <Scalar T>
std::vector<T> vector_from_json(const Json& j, const char* key) {
    if (!j.is_object()) throw ValidationError("expected a JSON object");
    const auto it = j.find(key);
    if (it == j.end()) throw ValidationError(std::string("missing field \"") + key + "\"");
    if (!it->is_array()) throw ValidationError(std::string("field \"") + key + "\" must be an array");
    std::vector<T> out;
    out.reserve(it->size());
    for (std::size_t i = 0; i < it->size(); ++i) {
        out.push_back(scalar_from_json<T>((*it)[i], std::string(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
}

template <Scalar T>
Json vector_to_json(const std::vector<T>& values) {
    Json out = Json::array();
    for (const auto& v : values) out.push_back(scalar_to_json(v));
    return out;
}

}  // namespace

template <Scalar T>
Json scalar_to_json(const T& x) {
    if constexpr (is_exact_v<T>) {
        return format_scalar(x);
    } else {
        return x;
    }
}

template <Scalar T>
T scalar_from_json(const Json& j, const std::string& what) {
    try {
        if (j.is_string()) return parse_scalar<T>(j.get<std::string>());
        if (j.is_number_integer()) return parse_scalar<T>(j.dump());
        if (j.is_number_float()) {
            // nlohmann writes the shortest text that round-trips, so the
            // rational reading of it is the decimal the user wrote.
            if constexpr (is_exact_v<T>) {
                return parse_scalar<T>(j.dump());
            } else {
                return j.get<double>();
            }
        }
    } catch (const ValidationError& e) {
        throw ValidationError(what + ": " + e.what());
    }
    throw ValidationError(what + " must be a number or a \"p/q\" string");
}

template <Scalar T>
Json to_json(const Model<T>& model) {
    Json j;
    j["tau"] = vector_to_json(model.tau);
    j["R"] = vector_to_json(model.refl);
    return j;
}

template <Scalar T>
Json to_json(const Data<T>& data) {
    Json j;
    j["sigma"] = vector_to_json(data.sigma);
    j["alpha"] = vector_to_json(data.alpha);
    return j;
}

template <Scalar T>
Json to_json(const InverseReport<T>& report, const Data<T>& data) {
    Json j;
    j["model"] = to_json(report.model);
    j["primary_indices"] = report.primary_indices;
    Json rejected = Json::array();
    for (auto i : report.rejected) {
        Json r;
        r["index"] = i;
        if (i < data.size()) {
            r["sigma"] = scalar_to_json(data.sigma[i]);
            r["alpha"] = scalar_to_json(data.alpha[i]);
        }
        rejected.push_back(std::move(r));
    }
    j["rejected"] = std::move(rejected);
    Json matched = Json::array();
    for (const auto& m : report.matched) {
        Json r;
        r["index"] = m.index;
        r["k"] = m.k.entries();
        matched.push_back(std::move(r));
    }
    j["matched"] = std::move(matched);
    j["iterations"] = report.iterations;
    return j;
}

template <Scalar T>
Model<T> model_from_json(const Json& j) {
    Model<T> model;
    model.tau = vector_from_json<T>(j, "tau");
    model.refl = vector_from_json<T>(j, "R");
    if (model.tau.size() != model.refl.size()) throw ValidationError("tau and R have different lengths");
    return model;
}

template <Scalar T>
Data<T> data_from_json(const Json& j) {
    Data<T> data;
    data.sigma = vector_from_json<T>(j, "sigma");
    data.alpha = vector_from_json<T>(j, "alpha");
    if (data.sigma.size() != data.alpha.size()) {
        throw ValidationError("sigma and alpha have different lengths");
    }
    return data;
}

Json read_json(const std::string& path) {
    std::string text;
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        text = buffer.str();
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open " + path + ": " + std::strerror(errno));
        std::ostringstream buffer;
        buffer << in.rdbuf();
        if (in.bad()) throw IoError("cannot read " + path);
        text = buffer.str();
    }
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ValidationError("malformed JSON in " + path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw IoError("cannot write to stdout");
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing: " + std::strerror(errno));
    out << text;
    out.close();
    if (!out) throw IoError("cannot write " + path);
}

void write_json(const std::string& path, const Json& j) {
    write_text(path, j.dump(2) + "\n");
}

#define LAYERWAVE_INSTANTIATE(T)                                          \
    template Json scalar_to_json<T>(const T&);                            \
    template T scalar_from_json<T>(const Json&, const std::string&);      \
    template Json to_json<T>(const Model<T>&);                            \
    template Json to_json<T>(const Data<T>&);                             \
    template Json to_json<T>(const InverseReport<T>&, const Data<T>&);    \
    template Model<T> model_from_json<T>(const Json&);                    \
    template Data<T> data_from_json<T>(const Json&);

LAYERWAVE_INSTANTIATE(double)
LAYERWAVE_INSTANTIATE(Rational)

#undef LAYERWAVE_INSTANTIATE

}  // namespace layerwave
