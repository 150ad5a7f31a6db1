#pragma once

#include "psdo.hpp"

#include <optional>
#include <vector>

namespace pvad {

// p ∘ ∂^{-1} ∘ q
struct ScalarTail {
    DiffFrac left, right;
};

// Exact weakly non-local scalar operator: local + Σ p ∂^{-1} q.
struct ScalarForm {
    PseudoOp local;
    std::vector<ScalarTail> tails;
};

// Σ_α a_α ∂^{-1} b_α^T with column vectors a_α (rows) and b_α (cols)
struct VecTail {
    std::vector<DiffFrac> left, right;
};

// Exact weakly non-local matrix operator L + Σ_α a_α ∂^{-1} b_α^T.
struct NonlocalForm {
    MatrixOp local;
    std::vector<VecTail> tails;

    int rows() const { return local.rows(); }
    int cols() const { return local.cols(); }
    MatrixOp normal(int depth) const;
    NonlocalForm operator+(const NonlocalForm& o) const;
    NonlocalForm operator-() const;
    NonlocalForm transpose_adjoint() const; // H*
};

// P = P1 ∘ ∂ + p0 for differential P
std::pair<PseudoOp, DiffFrac> split_right(const PseudoOp& p);
// Q = ∂ ∘ Q1 + y for differential Q
std::pair<PseudoOp, DiffFrac> split_left(const PseudoOp& q);

PseudoOp normal_form(const ScalarForm& f, int depth);
PseudoOp tail_normal(const DiffFrac& p, const DiffFrac& q, int depth);

// X ∘ (p∂^{-1}q) and (p∂^{-1}q) ∘ Y with X, Y differential
ScalarForm compose_local_tail(const PseudoOp& x, const ScalarTail& t);
ScalarForm compose_tail_local(const ScalarTail& t, const PseudoOp& y);

// builds the matrix form from per-entry scalar forms
NonlocalForm assemble(const std::vector<std::vector<ScalarForm>>& entries);

// X ∘ κ∂^{-1} ∘ Y for differential X (r×m), Y (m×c) and constant κ (m×m)
NonlocalForm sandwich_dinv(const MatrixOp& x, const std::vector<std::vector<Rational>>& kappa, const MatrixOp& y);

NonlocalForm project_form(const NonlocalForm& f, const struct AlgebraDescriptor& alg);

} // namespace pvad
