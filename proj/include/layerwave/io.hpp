#pragma once

// JSON interchange. Model: {"tau": [...], "R": [...]}. Data: {"sigma": [...],
// "alpha": [...]}. Rationals are written as "p/q" strings and floats as
// numbers; either encoding is accepted on input.

#include <json.hpp>
#include <string>

#include "layerwave/core.hpp"
#include "layerwave/inverse.hpp"
#include "layerwave/scalar.hpp"

namespace layerwave {

using Json = nlohmann::ordered_json;

template <Scalar T>
Json scalar_to_json(const T& x);

/// Accepts numbers and strings ("p/q", integers, decimals). Throws
/// ValidationError naming `what` otherwise.
template <Scalar T>
T scalar_from_json(const Json& j, const std::string& what);

template <Scalar T>
Json to_json(const Model<T>& model);

template <Scalar T>
Json to_json(const Data<T>& data);

/// Includes the rejected arrivals themselves, looked up in `data`.
template <Scalar T>
Json to_json(const InverseReport<T>& report, const Data<T>& data);

/// Structural checks only; call validate_model for the domain checks.
template <Scalar T>
Model<T> model_from_json(const Json& j);

template <Scalar T>
Data<T> data_from_json(const Json& j);

/// "-" means stdin / stdout. Failures throw IoError; malformed JSON throws
/// ValidationError.
Json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const Json& j);

}  // namespace layerwave
