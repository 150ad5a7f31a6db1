#pragma once

#include "pva.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pvad {

// Constraints θ_1..θ_m. Special form θ_α = u_{ℓ-m+α} + p_α is detected on
// construction.
struct ConstraintSet {
    std::string name;
    std::vector<DiffPoly> thetas;
    std::optional<std::vector<DiffPoly>> p;
    MatrixOp D; // Frechet derivative, m×ℓ

    int size() const { return static_cast<int>(thetas.size()); }
    bool special() const { return p.has_value(); }
};

ConstraintSet make_constraints(std::string name, std::vector<DiffPoly> thetas, const AlgebraDescriptor& alg);
// algebra with the constraint context attached (requires special form)
AlgebraPtr constrained_algebra(const ConstraintSet& c, const AlgebraPtr& alg);

struct DiracResult {
    MatrixOp C, C_inv;
    MatrixOp H_tilde;
    std::optional<NonlocalForm> tilde_form;
    std::optional<MatrixOp> A_D;
    std::optional<NonlocalForm> AD_form;
    std::optional<MatrixOp> H_D;
    std::optional<NonlocalForm> HD_form;
    AlgebraPtr tilde_alg;    // constraint context attached
    AlgebraPtr quotient_alg; // reduced generators only
    std::vector<CheckLine> checks;
    bool checks_pass() const;
};

// C = D_θ ∘ H ∘ D_θ^*
MatrixOp constraint_matrix(const PVAStructure& s, const ConstraintSet& c, int depth = -1);
// H - H D^* C^{-1} D H; NotInvertible when C is degenerate
DiracResult dirac_modify(const PVAStructure& s, const ConstraintSet& c, int depth = -1);
// {f_λ g}^D by the bracket-level definition
LambdaSeries dirac_bracket(const PVAStructure& s, const ConstraintSet& c, const DiffFrac& f, const DiffFrac& g,
                           int depth = -1);
// modification plus A^D, quotient projection and the block identity check
DiracResult dirac_reduce(const PVAStructure& s, const ConstraintSet& c, int depth = -1);
// A-block of H projected to the quotient; NotCentral unless D_θ ∘ H = 0
MatrixOp central_reduce(const PVAStructure& s, const ConstraintSet& c);
std::optional<NonlocalForm> central_reduce_form(const PVAStructure& s, const ConstraintSet& c);

// structure views of a result
PVAStructure tilde_structure(const DiracResult& r, const PVAStructure& s, int depth = -1);
PVAStructure AD_structure(const DiracResult& r, const std::string& name, int depth = -1);
PVAStructure reduced_structure(const DiracResult& r, const std::string& name, int depth = -1);

} // namespace pvad
