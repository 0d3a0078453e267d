#pragma once
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ratiep {

enum class ErrorCode {
    DegenerateInput,
    StronglySingular,
    NotPositiveDefinite,
    Singular,
    ShapeError,
    PoleCollidesWithNode,
    Breakdown,
    DuplicateNode,
    InvalidWeight,
    InvalidMeasure,
    PoleInstallFailure,
    EvaluationSingular,
    ParseError
};

inline const char* to_string(ErrorCode c) {
    switch (c) {
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::StronglySingular: return "StronglySingular";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::PoleCollidesWithNode: return "PoleCollidesWithNode";
    case ErrorCode::Breakdown: return "Breakdown";
    case ErrorCode::DuplicateNode: return "DuplicateNode";
    case ErrorCode::InvalidWeight: return "InvalidWeight";
    case ErrorCode::InvalidMeasure: return "InvalidMeasure";
    case ErrorCode::PoleInstallFailure: return "PoleInstallFailure";
    case ErrorCode::EvaluationSingular: return "EvaluationSingular";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

// index is 1-based (pivot, step or node) or 0 when not applicable
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string what, int index = 0)
        : std::runtime_error(compose(code, what, index)), code_(code), index_(index) {}

    ErrorCode code() const { return code_; }
    int index() const { return index_; }

private:
    static std::string compose(ErrorCode code, const std::string& what, int index) {
        std::ostringstream os;
        os << to_string(code);
        if (index > 0) os << "(" << index << ")";
        if (!what.empty()) os << ": " << what;
        return os.str();
    }

    ErrorCode code_;
    int index_;
};

class EvaluationSingularError : public Error {
public:
    EvaluationSingularError(std::complex<double> z, int index)
        : Error(ErrorCode::EvaluationSingular, "system matrix singular at z", index), z_(z) {}
    std::complex<double> z() const { return z_; }

private:
    std::complex<double> z_;
};

} // namespace ratiep
