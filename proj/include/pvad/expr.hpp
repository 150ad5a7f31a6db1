#pragma once

#include "algebra.hpp"
#include "nonlocal.hpp"

#include <string>

namespace pvad {

// Result of evaluating an operator expression: exact weakly non-local form
// when one exists, and the normal form at the requested depth.
struct OperatorValue {
    std::optional<ScalarForm> form;
    PseudoOp normal;
};

DiffFrac parse_function(const std::string& text, const AlgebraDescriptor& alg);
DiffPoly parse_poly(const std::string& text, const AlgebraDescriptor& alg);
OperatorValue parse_operator(const std::string& text, const AlgebraDescriptor& alg, int depth = -1);

} // namespace pvad
