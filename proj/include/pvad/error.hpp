#pragma once

#include <stdexcept>
#include <string>

namespace pvad {

enum class ErrorKind {
    IndexOutOfRange,
    HelmholtzViolation,
    NonPolynomialInput,
    DenominatorVanishes,
    DimensionMismatch,
    Degenerate,
    NotInvertible,
    NotSpecialForm,
    NotCentral,
    NoWitness,
    Mismatch,
    SyntaxError,
    UnknownSymbol,
    NotSkewadjoint,
    Unsupported,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind k, const std::string& msg)
        : std::runtime_error(std::string(kind_name(k)) + ": " + msg), kind_(k), msg_(msg) {}
    ErrorKind kind() const { return kind_; }
    const std::string& message() const { return msg_; }

private:
    ErrorKind kind_;
    std::string msg_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

} // namespace pvad
