#include "pvad/rational.hpp"
#include "pvad/error.hpp"

namespace pvad {

const char* kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::HelmholtzViolation: return "HelmholtzViolation";
    case ErrorKind::NonPolynomialInput: return "NonPolynomialInput";
    case ErrorKind::DenominatorVanishes: return "DenominatorVanishes";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::NotSpecialForm: return "NotSpecialForm";
    case ErrorKind::NotCentral: return "NotCentral";
    case ErrorKind::NoWitness: return "NoWitness";
    case ErrorKind::Mismatch: return "Mismatch";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownSymbol: return "UnknownSymbol";
    case ErrorKind::NotSkewadjoint: return "NotSkewadjoint";
    case ErrorKind::Unsupported: return "Unsupported";
    }
    return "Error";
}

Integer binomial(long s, unsigned long r) {
    Integer n = s;
    Integer out;
    mpz_bin_ui(out.get_mpz_t(), n.get_mpz_t(), r);
    return out;
}

std::string to_string(const Rational& q) { return q.get_str(); }

} // namespace pvad
