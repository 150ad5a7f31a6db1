#pragma once

#include "algebra.hpp"
#include "nonlocal.hpp"
#include "series.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pvad {

// A (possibly non-local) Poisson structure H, ℓ×ℓ over the generators of alg.
// When the exact weakly non-local form is known it is the source of truth;
// H then caches its normal form at build depth.
struct PVAStructure {
    std::string name;
    AlgebraPtr alg;
    std::optional<NonlocalForm> form;
    MatrixOp H;
    std::optional<FractionPair> frac;

    int size() const { return H.rows(); }
    bool is_local() const { return H.is_differential(); }
    MatrixOp normal(int depth) const;
    // exact form, synthesized from H when H is differential
    std::optional<NonlocalForm> exact_form() const;
};

PVAStructure make_structure(std::string name, AlgebraPtr alg, const MatrixOp& h);
PVAStructure make_structure(std::string name, AlgebraPtr alg, const NonlocalForm& f, int depth = -1);
PVAStructure sum_structure(const PVAStructure& a, const PVAStructure& b, int depth = -1);

// {f_λ g}_H by the Master Formula, known to λ-power -K
LambdaSeries master_bracket(const PVAStructure& s, const DiffFrac& f, const DiffFrac& g, int depth = -1);

// X(-λ-∂) with the ∂ acting on the coefficients, expanded leftward
LambdaSeries reflect(const LambdaSeries& x, int depth);

struct CheckLine {
    std::string text;
    bool pass = false;
};

struct SkewReport {
    bool structural = false;
    bool pass = false;
    std::vector<CheckLine> lines;
};

SkewReport check_skewsymmetry(const PVAStructure& s, const std::vector<std::pair<DiffFrac, DiffFrac>>& samples,
                              int depth = -1);
bool is_skewadjoint(const MatrixOp& h, int depth);

// {a_λ{b_μ c}} in the |μ|>|λ| expansion; local structures only
DoubleSeries triple_bracket(const PVAStructure& s, const DiffFrac& a, const DiffFrac& b, const DiffFrac& c,
                            int klambda, int kmu);

struct TripleResult {
    int i = 0, j = 0, k = 0;
    bool pass = false;
    std::string detail; // first nonzero coefficient on failure
};

struct JacobiReport {
    bool supported = true;
    bool pass = false;
    int klambda = 6, kmu = 6;
    std::vector<TripleResult> triples;
    std::vector<std::string> lines() const;
};

// Jacobi identity on generator triples; parallel over triples unless serial
JacobiReport check_jacobi(const PVAStructure& s, int klambda = 6, int kmu = 6, bool parallel = true);
// one triple, the Jacobi combination itself
DoubleSeries jacobi_combination(const PVAStructure& s, int i, int j, int k, int klambda, int kmu);

struct CompatReport {
    JacobiReport sum;
    bool pass = false;
};
CompatReport check_compatibility(const PVAStructure& s0, const PVAStructure& s1, int klambda = 6, int kmu = 6,
                                 bool parallel = true);

struct InverseIdentityReport {
    bool pass = false;
    std::vector<CheckLine> lines;
};
// {a_λ (C^{-1})_{ij}(μ)} against the formula through {a_λ C}
InverseIdentityReport verify_inverse_identity(const PVAStructure& s, const MatrixOp& c, const std::vector<DiffFrac>& samples,
                                              int klambda = 4, int kmu = 4);

} // namespace pvad
