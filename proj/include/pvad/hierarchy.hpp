#pragma once

#include "pva.hpp"

#include <string>
#include <vector>

namespace pvad {

using FracVec = std::vector<DiffFrac>;

// ∫h ↔_H P witnessed by F: δh/δu = B F and P = A F
struct Association {
    DiffPoly h;
    FracVec P, F;
    FractionPair pair;
};

// the declared pair, or (H, 1) for a local structure
FractionPair pair_of(const PVAStructure& s);
// δh/δu over the structure's algebra (modified derivatives when constrained)
FracVec gradient(const PVAStructure& s, const DiffPoly& h);

// Solves B F = rhs when B can be brought to triangular form by reordering
// rows and columns; pivots of order 0, or a∂ + k a' with constant k.
// NoWitness otherwise.
FracVec solve_witness(const MatrixOp& b, const FracVec& rhs);

// NoWitness or Mismatch on failure
Association check_associated(const PVAStructure& s, const DiffPoly& h, const FracVec& P);

struct LenardStep {
    DiffPoly g_prev, g_next;
    FracVec P;
    Association h1; // ∫g_prev ↔_{S1} P
    Association h0; // ∫g_next ↔_{S0} P
    std::vector<CheckLine> checks;
};

// P from S1 and g_prev, then g_next with S0 δg_next = P
LenardStep lenard_step(const PVAStructure& s0, const PVAStructure& s1, const DiffPoly& g_prev);

struct HierarchyState {
    std::vector<DiffPoly> densities; // g_0 .. g_n
    std::vector<LenardStep> steps;   // steps[n] carries P_n
    std::vector<CheckLine> involution;
    bool pass() const;
};

HierarchyState run_hierarchy(const PVAStructure& s0, const PVAStructure& s1, const DiffPoly& seed, int steps,
                             bool parallel = true);

struct LeadingSymbol {
    int order = -1;
    Rational coeff;
};

// highest u_i^(n) occurring linearly in P_i, and its coefficient
LeadingSymbol leading_symbol(const FracVec& P, int component);

std::vector<std::string> hierarchy_report(const HierarchyState& h, const AlgebraDescriptor& alg);

} // namespace pvad
