#ifndef TWISTLAB_ERRORS_HPP
#define TWISTLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace twistlab {

enum class ErrorCode {
    AssumptionViolated,
    NoConvergence,
    FlatDegenerate,
    BisectionFail,
    DegenerateKink,
    TooShort,
    EmptySet,
    MonotonicityViolation,
    AlphaPrimeTie,
    NoGap,
    BoundaryMiss,
    ChainStalled,
    SingularBackward,
    WindowLimit,
    CorruptCache,
    Usage,
};

inline const char* to_string(ErrorCode c) {
    switch (c) {
        case ErrorCode::AssumptionViolated: return "ASSUMPTION_VIOLATED";
        case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
        case ErrorCode::FlatDegenerate: return "FLAT_DEGENERATE";
        case ErrorCode::BisectionFail: return "BISECTION_FAIL";
        case ErrorCode::DegenerateKink: return "DEGENERATE_KINK";
        case ErrorCode::TooShort: return "TOO_SHORT";
        case ErrorCode::EmptySet: return "EMPTY_SET";
        case ErrorCode::MonotonicityViolation: return "MONOTONICITY_VIOLATION";
        case ErrorCode::AlphaPrimeTie: return "ALPHA_PRIME_TIE";
        case ErrorCode::NoGap: return "NO_GAP";
        case ErrorCode::BoundaryMiss: return "BOUNDARY_MISS";
        case ErrorCode::ChainStalled: return "CHAIN_STALLED";
        case ErrorCode::SingularBackward: return "SINGULAR_BACKWARD";
        case ErrorCode::WindowLimit: return "WINDOW_LIMIT";
        case ErrorCode::CorruptCache: return "CORRUPT_CACHE";
        case ErrorCode::Usage: return "USAGE";
    }
    return "UNKNOWN";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace twistlab

#endif
