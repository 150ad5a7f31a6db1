#include "pvad/hierarchy.hpp"
#include "pvad/diffring.hpp"
#include "pvad/error.hpp"

#include <sstream>

namespace pvad {

namespace {

DiffFrac tidy(const DiffFrac& f) {
    if (f.is_polynomial() || f.is_zero()) return f;
    if (auto q = f.num().exact_div(f.den())) return DiffFrac(*q);
    return f;
}

FracVec tidy(FracVec v) {
    for (auto& x : v) x = tidy(x);
    return v;
}

DiffFrac power(const DiffFrac& a, int e) {
    DiffFrac base = e < 0 ? a.inverse() : a, out(1);
    for (int i = 0; i < std::abs(e); ++i) out = out * base;
    return out;
}

// p F = r for a scalar pivot of order <= 1; zero integration constant
DiffFrac solve_scalar(const PseudoOp& p, const DiffFrac& r) {
    if (!p.is_differential() || p.is_zero() || p.order() > 1)
        fail(ErrorKind::NoWitness, "pivot is not of order 0 or 1");
    if (r.is_zero()) return {};
    if (p.order() == 0) return tidy(r / p.coeff(0));
    DiffFrac a = p.coeff(1), b = p.coeff(0), da = a.derivative();
    // a∂ + k a' = a^{1-k} ∘ ∂ ∘ a^k
    int k = 0;
    if (!b.is_zero()) {
        if (da.is_zero()) fail(ErrorKind::NoWitness, "pivot has no integrating factor");
        DiffFrac q = b / da;
        Rational c = q.num().leading().coeff / q.den().leading().coeff;
        if (b != DiffFrac(c) * da || c.get_den() != 1 || !c.get_num().fits_sint_p())
            fail(ErrorKind::NoWitness, "pivot has no integrating factor");
        k = static_cast<int>(c.get_num().get_si());
    }
    DiffFrac integrand = tidy(power(a, k - 1) * r);
    return tidy(antiderivative(integrand) * power(a, -k));
}

bool nonzero(const PseudoOp& p) { return !p.is_zero(); }

// Fills unknown x_j from rows with a single unknown column. Rows without
// unknowns must be satisfied. Returns the columns left undetermined.
std::vector<int> solve_rows(const MatrixOp& b, const FracVec& rhs, FracVec& x, std::vector<bool>& known) {
    int nr = b.rows(), nc = b.cols();
    std::vector<bool> done(static_cast<std::size_t>(nr), false);
    auto residual = [&](int i) {
        DiffFrac r = rhs[i];
        for (int j = 0; j < nc; ++j)
            if (known[j] && nonzero(b(i, j)) && !x[j].is_zero()) r -= pvad::apply(b(i, j), x[j]);
        return tidy(r);
    };
    bool progress = true;
    while (progress) {
        progress = false;
        for (int i = 0; i < nr; ++i) {
            if (done[i]) continue;
            int col = -1, unknown = 0;
            for (int j = 0; j < nc; ++j)
                if (!known[j] && nonzero(b(i, j))) {
                    ++unknown;
                    col = j;
                }
            if (unknown > 1) continue;
            DiffFrac r = residual(i);
            if (unknown == 0) {
                if (!r.is_zero()) fail(ErrorKind::NoWitness, "row " + std::to_string(i + 1) + " is inconsistent");
            } else {
                x[col] = solve_scalar(b(i, col), r);
                known[col] = true;
            }
            done[i] = true;
            progress = true;
        }
    }
    for (int i = 0; i < nr; ++i)
        if (!done[i]) fail(ErrorKind::NoWitness, "matrix is not triangular up to reordering");
    std::vector<int> free;
    for (int j = 0; j < nc; ++j)
        if (!known[j]) free.push_back(j);
    return free;
}

bool same(const FracVec& a, const FracVec& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

CheckLine check(const std::string& what, bool ok) { return {what + ": " + (ok ? "PASS" : "FAIL"), ok}; }

FracVec as_frac(const std::vector<DiffPoly>& v) { return FracVec(v.begin(), v.end()); }

} // namespace

FractionPair pair_of(const PVAStructure& s) {
    if (s.frac) return *s.frac;
    if (s.is_local()) return {s.H, MatrixOp::identity(s.size())};
    fail(ErrorKind::NoWitness, "structure " + s.name + " has no fractional decomposition");
}

FracVec gradient(const PVAStructure& s, const DiffPoly& h) {
    return as_frac(variational_derivative(h, *s.alg, s.alg->constraint ? VarMode::Tilde : VarMode::Ordinary));
}

FracVec solve_witness(const MatrixOp& b, const FracVec& rhs) {
    if (b.rows() != static_cast<int>(rhs.size()) || b.rows() != b.cols())
        fail(ErrorKind::DimensionMismatch, "witness system has the wrong shape");
    if (!b.is_differential()) fail(ErrorKind::NoWitness, "denominator matrix is not differential");
    FracVec x(rhs.size());
    std::vector<bool> known(rhs.size(), false);
    if (!solve_rows(b, rhs, x, known).empty()) fail(ErrorKind::NoWitness, "denominator matrix is degenerate");
    if (!same(tidy(pvad::apply(b, x)), rhs)) fail(ErrorKind::NoWitness, "forward substitution did not close");
    return x;
}

Association check_associated(const PVAStructure& s, const DiffPoly& h, const FracVec& P) {
    Association a;
    a.h = h;
    a.pair = pair_of(s);
    if (static_cast<int>(P.size()) != a.pair.A.rows())
        fail(ErrorKind::DimensionMismatch, "flow has " + std::to_string(P.size()) + " components");
    a.F = solve_witness(a.pair.B, gradient(s, h));
    a.P = tidy(pvad::apply(a.pair.A, a.F));
    for (std::size_t i = 0; i < P.size(); ++i)
        if (a.P[i] != P[i]) fail(ErrorKind::Mismatch, "A F differs from P in component " + std::to_string(i + 1));
    return a;
}

LenardStep lenard_step(const PVAStructure& s0, const PVAStructure& s1, const DiffPoly& g_prev) {
    LenardStep st;
    st.g_prev = g_prev;
    FractionPair p1 = pair_of(s1);
    st.P = tidy(pvad::apply(p1.A, solve_witness(p1.B, gradient(s1, g_prev))));

    // S0 ξ = P through A0 G = P, ξ = B0 G
    FractionPair p0 = pair_of(s0);
    int n = p0.A.cols();
    FracVec g(static_cast<std::size_t>(n));
    std::vector<bool> known(static_cast<std::size_t>(n), false);
    auto free = solve_rows(p0.A, st.P, g, known);
    if (!free.empty()) {
        // kernel of S0: the flow generated by g_next must again lie in the
        // image of S0, so its components on the zero rows of S0 vanish
        if (s0.frac || !s1.is_local() || s1.size() != n)
            fail(ErrorKind::NoWitness, "degenerate S0 needs a local S1 to fix its kernel");
        std::vector<int> zero_rows;
        for (int i = 0; i < p0.A.rows(); ++i) {
            bool z = true;
            for (int j = 0; j < n; ++j) z = z && p0.A(i, j).is_zero();
            if (z) zero_rows.push_back(i);
        }
        MatrixOp rows(static_cast<int>(zero_rows.size()), n);
        for (std::size_t r = 0; r < zero_rows.size(); ++r)
            for (int j = 0; j < n; ++j) rows(static_cast<int>(r), j) = s1.H(zero_rows[r], j);
        FracVec zero(zero_rows.size());
        if (!solve_rows(rows, zero, g, known).empty())
            fail(ErrorKind::NoWitness, "kernel of S0 is not fixed by the next flow");
    }
    FracVec xi = tidy(pvad::apply(p0.B, g));
    std::vector<DiffPoly> grad;
    for (const auto& c : xi) {
        if (!c.is_polynomial()) fail(ErrorKind::NonPolynomialInput, "candidate gradient is not polynomial");
        grad.push_back(c.num());
    }
    st.g_next = homotopy_reconstruct(grad);

    st.checks.push_back(check("GRADIENT of g_next", same(gradient(s0, st.g_next), xi)));
    st.h1 = check_associated(s1, g_prev, st.P);
    st.checks.push_back(check("ASSOCIATED S1 g_prev", true));
    st.h0 = check_associated(s0, st.g_next, st.P);
    st.checks.push_back(check("ASSOCIATED S0 g_next", true));
    return st;
}

bool HierarchyState::pass() const {
    for (const auto& s : steps)
        for (const auto& c : s.checks)
            if (!c.pass) return false;
    for (const auto& c : involution)
        if (!c.pass) return false;
    return true;
}

HierarchyState run_hierarchy(const PVAStructure& s0, const PVAStructure& s1, const DiffPoly& seed, int steps,
                             bool parallel) {
    HierarchyState h;
    h.densities.push_back(seed);
    for (int n = 0; n < steps; ++n) {
        try {
            h.steps.push_back(lenard_step(s0, s1, h.densities.back()));
        } catch (const Error& e) {
            fail(e.kind(), "step " + std::to_string(n) + ": " + e.message());
        }
        h.densities.push_back(h.steps.back().g_next);
    }
    int nd = static_cast<int>(h.densities.size()), nf = static_cast<int>(h.steps.size());
    std::vector<FracVec> grads(static_cast<std::size_t>(nd));
    for (int m = 0; m < nd; ++m) grads[m] = gradient(s0, h.densities[m]);
    std::vector<CheckLine> lines(static_cast<std::size_t>(nd * nf));
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int idx = 0; idx < nd * nf; ++idx) {
        int m = idx / nf, n = idx % nf;
        DiffFrac integrand;
        for (std::size_t i = 0; i < grads[m].size(); ++i) integrand += grads[m][i] * h.steps[n].P[i];
        integrand = tidy(integrand);
        bool ok = integrand.is_polynomial() && is_total_derivative(integrand.num());
        lines[idx] = check("INVOLUTION g_" + std::to_string(m) + " P_" + std::to_string(n), ok);
    }
    h.involution = std::move(lines);
    return h;
}

LeadingSymbol leading_symbol(const FracVec& P, int component) {
    LeadingSymbol out;
    if (component < 0 || component >= static_cast<int>(P.size()))
        fail(ErrorKind::IndexOutOfRange, "component " + std::to_string(component + 1));
    DiffFrac f = tidy(P[component]);
    if (!f.den().is_number()) fail(ErrorKind::NonPolynomialInput, "leading symbol of a fraction");
    Rational scale = f.den().number_value();
    for (const auto& t : f.num().terms()) {
        if (t.mono.size() != 1 || t.mono[0].exp != 1 || !is_jet(t.mono[0].var)) continue;
        if (key_gen(t.mono[0].var) != component) continue;
        int ord = key_order(t.mono[0].var);
        if (ord > out.order) {
            out.order = ord;
            out.coeff = t.coeff / scale;
        }
    }
    return out;
}

std::vector<std::string> hierarchy_report(const HierarchyState& h, const AlgebraDescriptor& alg) {
    std::vector<std::string> out;
    auto vec = [&](const std::string& label, const FracVec& v) {
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back("  " + label + "[" + alg.names[i] + "] = " + v[i].str(alg));
    };
    for (std::size_t n = 0; n < h.steps.size(); ++n) {
        const auto& s = h.steps[n];
        std::string k = std::to_string(n);
        out.push_back("STEP " + k);
        out.push_back("  g_" + k + " = " + s.g_prev.str(alg));
        vec("P_" + k, s.P);
        vec("F_" + k, s.h1.F);
        out.push_back("  g_" + std::to_string(n + 1) + " = " + s.g_next.str(alg));
        for (const auto& c : s.checks) out.push_back("  " + c.text);
    }
    if (h.steps.empty()) out.push_back("SEED g_0 = " + h.densities.front().str(alg));
    for (const auto& c : h.involution) out.push_back(c.text);
    return out;
}

} // namespace pvad
