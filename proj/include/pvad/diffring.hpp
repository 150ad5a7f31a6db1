#pragma once

#include "algebra.hpp"
#include "difffrac.hpp"
#include "psdo.hpp"

#include <vector>

namespace pvad {

enum class VarMode { Ordinary, Tilde };

// ∂f/∂u_gen^(order); modified derivative when the algebra carries constraints
DiffPoly partial_derivative(const DiffPoly& f, const AlgebraDescriptor& alg, int gen, int order);
DiffFrac partial_derivative(const DiffFrac& f, const AlgebraDescriptor& alg, int gen, int order);

// (D_F)_{αi} = Σ_n ∂F_α/∂u_i^(n) ∂^n over all ℓ generators
MatrixOp frechet(const std::vector<DiffPoly>& F, const AlgebraDescriptor& alg);
// same, restricted to the first ncols generators
MatrixOp frechet(const std::vector<DiffPoly>& F, int ncols);

// ordinary: ℓ components; tilde: (ℓ-m) components of (1, -D_p*) ∘ δ/δu
std::vector<DiffPoly> variational_derivative(const DiffPoly& f, const AlgebraDescriptor& alg,
                                             VarMode mode = VarMode::Ordinary);
// Σ_n (-∂)^n ∂f/∂u_gen^(n) with ordinary partials
DiffPoly euler_operator(const DiffPoly& f, int gen);

// f ∈ ∂V: every Euler operator (over all jet variables) vanishes and no
// jet-free term survives
bool is_total_derivative(const DiffPoly& f);
// g with ∂g = f; throws NoWitness when f is not exact or not polynomial
DiffPoly antiderivative(const DiffPoly& f);
DiffFrac antiderivative(const DiffFrac& f);

// Helmholtz check then homotopy integration; ξ indexed by the first ξ.size()
// generators
DiffPoly homotopy_reconstruct(const std::vector<DiffPoly>& xi);
bool helmholtz_holds(const std::vector<DiffPoly>& xi);

// densities equal modulo ∂V + quasiconstants
bool equal_mod_derivatives(const DiffPoly& a, const DiffPoly& b, int ngen);

// substitute u_{ℓ-m+α}^(n) -> -∂^n p_α
DiffPoly quotient_project(const DiffPoly& f, const AlgebraDescriptor& alg);
DiffFrac quotient_project(const DiffFrac& f, const AlgebraDescriptor& alg);
PseudoOp quotient_project(const PseudoOp& p, const AlgebraDescriptor& alg);
MatrixOp quotient_project(const MatrixOp& m, const AlgebraDescriptor& alg);

// polynomial part check helper
DiffPoly require_polynomial(const DiffFrac& f, const char* what);

} // namespace pvad
