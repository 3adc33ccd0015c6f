#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace halfinv {

/// Failure modes of the numerical pipeline. Every kind maps to exit code 3 in the CLI.
enum class ErrorKind {
    BracketFailure,
    NegativeEigenvalue,
    NotAnEigenvalue,
    NoConvergence,
    IllConditioned,
    SingularSystem,
    BoundaryDegenerate,
    PoleReached,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::BracketFailure: return "BracketFailure";
        case ErrorKind::NegativeEigenvalue: return "NegativeEigenvalue";
        case ErrorKind::NotAnEigenvalue: return "NotAnEigenvalue";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::IllConditioned: return "IllConditioned";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::BoundaryDegenerate: return "BoundaryDegenerate";
        case ErrorKind::PoleReached: return "PoleReached";
    }
    return "Unknown";
}

class NumericalError : public std::runtime_error {
public:
    NumericalError(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace halfinv
