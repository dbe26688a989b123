#pragma once

#include <stdexcept>
#include <string>

namespace layerwave {

/// Failure categories; the numeric values double as CLI exit codes.
enum class ErrorKind : int {
    Validation = 2,
    Guard = 3,
    Algorithm = 4,
    Io = 5,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Invalid input: malformed model/data, out-of-range parameters.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message)
        : Error(ErrorKind::Validation, message) {}
};

/// An enumeration guard (term or sequence budget) was exceeded.
class GuardError : public Error {
public:
    explicit GuardError(const std::string& message)
        : Error(ErrorKind::Guard, message) {}
};

/// The algorithm could not complete on otherwise well-formed input, e.g.
/// data that no generic model produces.
class AlgorithmError : public Error {
public:
    explicit AlgorithmError(const std::string& message)
        : Error(ErrorKind::Algorithm, message) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message)
        : Error(ErrorKind::Io, message) {}
};

}  // namespace layerwave
