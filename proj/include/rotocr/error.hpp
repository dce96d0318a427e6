#pragma once

#include <stdexcept>
#include <string>

namespace rotocr {

enum class ErrorKind {
    InvalidInput,
    Config,
    Schema,
    Io,
    Backend,
    DegenerateQuad,
    EmptyCrop,
    Eval,
    Unresolved,
    Generation,
};

const char* to_string(ErrorKind kind) noexcept;

// Single exception type for the core library; the C API maps `kind()` onto
// status codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace rotocr
