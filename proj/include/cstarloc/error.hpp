#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cstarloc {

enum class ErrorKind {
    invalid_argument,
    shape,
    positivity,
    degenerate_input,
    unsupported_rule,
    invalid_functional,
    no_separation,
    module_mismatch,
    input,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid-argument";
        case ErrorKind::shape: return "shape";
        case ErrorKind::positivity: return "positivity";
        case ErrorKind::degenerate_input: return "degenerate-input";
        case ErrorKind::unsupported_rule: return "unsupported-rule";
        case ErrorKind::invalid_functional: return "invalid-functional";
        case ErrorKind::no_separation: return "no-separation";
        case ErrorKind::module_mismatch: return "module-mismatch";
        case ErrorKind::input: return "input";
    }
    return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

 private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string &what) {
    if (!condition) fail(kind, what);
}

}  // namespace cstarloc
