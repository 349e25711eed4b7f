#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stinespring {

enum class ErrorKind {
    NotSquare,
    NotHermitian,
    NotPSD,
    DescriptorMismatch,
    IndexOutOfRange,
    HermiticityViolation,
    NotCompatible,
    ShapeMismatch,
    DimensionTooSmall,
    DimensionTooLarge,
    WellDefinednessFailure,
    NotMinimal,
    InconsistentSpans,
    ParseError,
    IoError,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::DescriptorMismatch: return "DescriptorMismatch";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::HermiticityViolation: return "HermiticityViolation";
    case ErrorKind::NotCompatible: return "NotCompatible";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::WellDefinednessFailure: return "WellDefinednessFailure";
    case ErrorKind::NotMinimal: return "NotMinimal";
    case ErrorKind::InconsistentSpans: return "InconsistentSpans";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so the
/// command-line layer can map it onto a stable exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace stinespring
