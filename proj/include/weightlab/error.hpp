#pragma once

#include <stdexcept>
#include <string>

namespace weightlab {

enum class ErrorKind {
    AsymmetricDistance,
    TriangleViolation,
    NonpositiveMeasure,
    ZeroDistanceDistinctPoints,
    InvalidParams,
    EmptyRadiusRange,
    ParseError,
    NonpositiveWeight,
    InconsistentPair,
};

inline const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::AsymmetricDistance: return "AsymmetricDistance";
    case ErrorKind::TriangleViolation: return "TriangleViolation";
    case ErrorKind::NonpositiveMeasure: return "NonpositiveMeasure";
    case ErrorKind::ZeroDistanceDistinctPoints: return "ZeroDistanceDistinctPoints";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::EmptyRadiusRange: return "EmptyRadiusRange";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NonpositiveWeight: return "NonpositiveWeight";
    case ErrorKind::InconsistentPair: return "InconsistentPair";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace weightlab
