#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace corround {

enum class ErrorCode {
    NegativeEntry,
    RowSumMismatch,
    EmptyInstance,
    DomainError,
    DimensionMismatch,
    CapExceeded,
    InfeasibleFractional,
    DegenerateSubset,
    SizeImpossible,
    SolverFailure,
    ParseError,
    InvariantViolation,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, std::string(to_string(code)) + ": " + what);
}

#define CORROUND_REQUIRE(cond, code, msg)          \
    do {                                           \
        if (!(cond)) ::corround::fail((code), (msg)); \
    } while (0)

}  // namespace corround
