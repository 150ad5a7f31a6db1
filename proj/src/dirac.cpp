#include "pvad/dirac.hpp"
#include "pvad/diffring.hpp"
#include "pvad/error.hpp"

#include <sstream>

namespace pvad {

namespace {

int resolve(int k) { return k < 0 ? default_depth() : k; }

int working_depth(const PVAStructure& s, const ConstraintSet& c, int k) {
    return k + 2 * std::max(0, s.H.max_order()) + 2 * std::max(0, c.D.max_order()) + 4;
}

using RMat = std::vector<std::vector<Rational>>;

// C = K∂ with K a constant matrix
std::optional<RMat> constant_times_d(const MatrixOp& c) {
    RMat k(static_cast<std::size_t>(c.rows()), std::vector<Rational>(static_cast<std::size_t>(c.cols())));
    for (int i = 0; i < c.rows(); ++i)
        for (int j = 0; j < c.cols(); ++j) {
            const PseudoOp& e = c(i, j);
            if (!e.exact()) return std::nullopt;
            for (const auto& [p, v] : e.coeffs()) {
                if (p != 1 || !v.is_number()) return std::nullopt;
                k[i][j] = v.number_value();
            }
        }
    return k;
}

std::optional<RMat> rational_inverse(RMat a) {
    int n = static_cast<int>(a.size());
    RMat inv(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i) inv[i][i] = 1;
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (sgn(a[r][col]) != 0) {
                piv = r;
                break;
            }
        if (piv < 0) return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        Rational d = a[col][col];
        for (int j = 0; j < n; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || sgn(a[r][col]) == 0) continue;
            Rational f = a[r][col];
            for (int j = 0; j < n; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

bool vanishes(const MatrixOp& m, int k) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            for (const auto& [p, c] : m(i, j).coeffs())
                if (p >= -k && !c.is_zero()) return false;
    return true;
}

CheckLine line(const std::string& what, bool ok, int k) {
    return {what + ": " + (ok ? "PASS" : "FAIL") + " depth=" + std::to_string(k), ok};
}

MatrixOp invert_or_fail(const MatrixOp& c, int k) {
    if (c.is_zero()) fail(ErrorKind::NotInvertible, "constraint matrix is zero");
    try {
        return invert(c, k);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Degenerate) fail(ErrorKind::NotInvertible, e.message());
        throw;
    }
}

NonlocalForm drop_empty_tails(NonlocalForm f) {
    std::vector<VecTail> keep;
    for (auto& t : f.tails) {
        bool l = false, r = false;
        for (const auto& a : t.left) l = l || !a.is_zero();
        for (const auto& b : t.right) r = r || !b.is_zero();
        if (l && r) keep.push_back(std::move(t));
    }
    f.tails = std::move(keep);
    return f;
}

} // namespace

bool DiracResult::checks_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

ConstraintSet make_constraints(std::string name, std::vector<DiffPoly> thetas, const AlgebraDescriptor& alg) {
    ConstraintSet c;
    c.name = std::move(name);
    c.thetas = std::move(thetas);
    c.D = frechet(c.thetas, alg.ell());
    int m = c.size(), first = alg.ell() - m;
    if (m == 0 || first < 0) return c;
    std::vector<DiffPoly> p;
    for (int a = 0; a < m; ++a) {
        DiffPoly r = c.thetas[a] - DiffPoly::jet(first + a);
        for (int b = first; b < alg.ell(); ++b)
            if (r.depends_on_gen(b)) return c;
        p.push_back(std::move(r));
    }
    c.p = std::move(p);
    return c;
}

AlgebraPtr constrained_algebra(const ConstraintSet& c, const AlgebraPtr& alg) {
    if (!c.special()) fail(ErrorKind::NotSpecialForm, "constraints " + c.name + " are not of the form u + p");
    return with_constraint(alg, ConstraintContext{c.size(), *c.p});
}

MatrixOp constraint_matrix(const PVAStructure& s, const ConstraintSet& c, int depth) {
    int k = resolve(depth);
    int kw = working_depth(s, c, k);
    MatrixOp h = s.normal(kw);
    MatrixOp r = compose(c.D, compose(h, adjoint(c.D), kw), kw);
    return r.is_differential() ? r : r.truncated(k);
}

DiracResult dirac_modify(const PVAStructure& s, const ConstraintSet& c, int depth) {
    int k = resolve(depth);
    int kw = working_depth(s, c, k);
    DiracResult r;
    r.C = constraint_matrix(s, c, kw);
    r.C_inv = invert_or_fail(r.C, kw);
    MatrixOp h = s.normal(kw);
    MatrixOp x = compose(h, adjoint(c.D), kw);
    MatrixOp y = compose(c.D, h, kw);
    MatrixOp ht;
    auto kd = constant_times_d(r.C);
    if (s.is_local() && kd) {
        auto kinv = rational_inverse(*kd);
        if (!kinv) fail(ErrorKind::NotInvertible, "constraint matrix has a singular leading coefficient");
        NonlocalForm corr = sandwich_dinv(x, *kinv, y);
        r.tilde_form = drop_empty_tails(NonlocalForm{h, {}} + -corr);
        ht = r.tilde_form->normal(kw);
    } else {
        ht = h - compose(x, compose(r.C_inv, y, kw), kw);
    }
    r.H_tilde = ht.is_differential() ? ht : ht.truncated(k);
    r.C_inv = r.C_inv.truncated(k);
    r.checks.push_back(line("CENTRAL D*Htilde", vanishes(compose(c.D, ht, kw), k), k));
    r.checks.push_back(line("CENTRAL Htilde*D^*", vanishes(compose(ht, adjoint(c.D), kw), k), k));
    r.checks.push_back(line("SKEWADJOINT Htilde", is_skewadjoint(ht, k), k));
    return r;
}

LambdaSeries dirac_bracket(const PVAStructure& s, const ConstraintSet& c, const DiffFrac& f, const DiffFrac& g,
                           int depth) {
    int k = resolve(depth);
    int kw = working_depth(s, c, k);
    MatrixOp ci = invert_or_fail(constraint_matrix(s, c, kw), kw);
    int m = c.size();
    std::vector<LambdaSeries> x(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) x[a] = master_bracket(s, f, DiffFrac(c.thetas[a]), kw);
    LambdaSeries out = master_bracket(s, f, g, kw);
    for (int b = 0; b < m; ++b) {
        LambdaSeries yb;
        for (int a = 0; a < m; ++a)
            if (!ci(b, a).is_zero()) yb += symbol_shift_apply(ci(b, a), x[a], kw);
        LambdaSeries z = master_bracket(s, DiffFrac(c.thetas[b]), g, kw);
        PseudoOp zop;
        for (const auto& [p, v] : z.coeffs()) zop.set(p, v);
        if (!z.exact()) zop.with_depth(z.depth());
        out -= symbol_shift_apply(zop, yb, kw);
    }
    return out.with_depth(std::min(out.depth(), k));
}

DiracResult dirac_reduce(const PVAStructure& s, const ConstraintSet& c, int depth) {
    if (!c.special()) fail(ErrorKind::NotSpecialForm, "constraints " + c.name + " are not of the form u + p");
    int k = resolve(depth);
    int kw = working_depth(s, c, k);
    DiracResult r = dirac_modify(s, c, k);
    int l = s.size(), m = c.size(), n = l - m;
    MatrixOp h = s.normal(kw);
    MatrixOp A = h.block(0, 0, n, n), B = h.block(0, n, n, m);
    MatrixOp dp = frechet(*c.p, n);
    MatrixOp x = B + compose(A, adjoint(dp), kw);
    MatrixOp y = adjoint(B, kw) - compose(dp, A, kw);
    MatrixOp ci = invert_or_fail(r.C, kw);
    MatrixOp ad;
    auto kd = constant_times_d(r.C);
    if (A.is_differential() && B.is_differential() && kd) {
        auto kinv = rational_inverse(*kd);
        if (!kinv) fail(ErrorKind::NotInvertible, "constraint matrix has a singular leading coefficient");
        r.AD_form = drop_empty_tails(NonlocalForm{A, {}} + sandwich_dinv(x, *kinv, y));
        ad = r.AD_form->normal(kw);
    } else {
        ad = A + compose(x, compose(ci, y, kw), kw);
    }
    r.A_D = ad.is_differential() ? ad : ad.truncated(k);
    r.tilde_alg = constrained_algebra(c, s.alg);
    r.quotient_alg = quotient_algebra(r.tilde_alg);
    r.H_D = quotient_project(*r.A_D, *r.tilde_alg);
    if (r.AD_form) r.HD_form = drop_empty_tails(project_form(*r.AD_form, *r.tilde_alg));

    // H̃ = (1, -D_p)^T ∘ A^D ∘ (1, -D_p^*)
    MatrixOp left(l, n), right(n, l);
    MatrixOp dps = adjoint(dp);
    for (int i = 0; i < n; ++i) {
        left(i, i) = PseudoOp(DiffFrac(1));
        right(i, i) = PseudoOp(DiffFrac(1));
    }
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i) {
            left(n + a, i) = -dp(a, i);
            right(i, n + a) = -dps(i, a);
        }
    MatrixOp rebuilt = compose(left, compose(ad, right, kw), kw);
    MatrixOp ht = r.tilde_form ? r.tilde_form->normal(kw) : r.H_tilde;
    r.checks.push_back(line("BLOCK IDENTITY", vanishes(rebuilt - ht, k), k));
    return r;
}

MatrixOp central_reduce(const PVAStructure& s, const ConstraintSet& c) {
    if (!c.special()) fail(ErrorKind::NotSpecialForm, "constraints " + c.name + " are not of the form u + p");
    int k = default_depth();
    MatrixOp h = s.normal(k + 4);
    MatrixOp dh = compose(c.D, h, k + 4);
    if (!vanishes(dh, k)) fail(ErrorKind::NotCentral, "D_theta o H is not zero for " + c.name);
    int n = s.size() - c.size();
    auto talg = constrained_algebra(c, s.alg);
    return quotient_project(h.block(0, 0, n, n), *talg);
}

std::optional<NonlocalForm> central_reduce_form(const PVAStructure& s, const ConstraintSet& c) {
    central_reduce(s, c);
    auto f = s.exact_form();
    if (!f) return std::nullopt;
    int n = s.size() - c.size();
    auto talg = constrained_algebra(c, s.alg);
    NonlocalForm a{f->local.block(0, 0, n, n), {}};
    for (const auto& t : f->tails)
        a.tails.push_back({std::vector<DiffFrac>(t.left.begin(), t.left.begin() + n),
                           std::vector<DiffFrac>(t.right.begin(), t.right.begin() + n)});
    return drop_empty_tails(project_form(a, *talg));
}

PVAStructure tilde_structure(const DiracResult& r, const PVAStructure& s, int depth) {
    if (r.tilde_form) return make_structure(s.name + "~", s.alg, *r.tilde_form, depth);
    PVAStructure t;
    t.name = s.name + "~";
    t.alg = s.alg;
    t.H = r.H_tilde;
    return t;
}

PVAStructure AD_structure(const DiracResult& r, const std::string& name, int depth) {
    if (!r.A_D) fail(ErrorKind::NotSpecialForm, "no reduced block");
    if (r.AD_form) return make_structure(name, r.tilde_alg, *r.AD_form, depth);
    PVAStructure t;
    t.name = name;
    t.alg = r.tilde_alg;
    t.H = *r.A_D;
    return t;
}

PVAStructure reduced_structure(const DiracResult& r, const std::string& name, int depth) {
    if (!r.H_D) fail(ErrorKind::NotSpecialForm, "no reduced structure");
    if (r.HD_form) return make_structure(name, r.quotient_alg, *r.HD_form, depth);
    PVAStructure t;
    t.name = name;
    t.alg = r.quotient_alg;
    t.H = *r.H_D;
    return t;
}

} // namespace pvad
