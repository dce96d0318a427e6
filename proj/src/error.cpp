#include "rotocr/error.hpp"

namespace rotocr {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidInput: return "invalid input";
        case ErrorKind::Config: return "config error";
        case ErrorKind::Schema: return "schema error";
        case ErrorKind::Io: return "i/o error";
        case ErrorKind::Backend: return "backend failure";
        case ErrorKind::DegenerateQuad: return "degenerate quad";
        case ErrorKind::EmptyCrop: return "empty crop";
        case ErrorKind::Eval: return "evaluation error";
        case ErrorKind::Unresolved: return "unresolved consensus";
        case ErrorKind::Generation: return "generation error";
    }
    return "error";
}

}  // namespace rotocr
