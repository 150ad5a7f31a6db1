#include "pvad/diffring.hpp"
#include "pvad/error.hpp"

#include <map>

namespace pvad {

namespace {

void check_gen(const AlgebraDescriptor& alg, int gen, int order) {
    if (gen < 0 || gen >= alg.ngen() || order < 0)
        fail(ErrorKind::IndexOutOfRange, "generator " + std::to_string(gen + 1) + " order " + std::to_string(order));
}

template <class T>
T modified_partial(const T& f, const AlgebraDescriptor& alg, int gen, int order) {
    T out = f.partial(gen, order);
    if (!alg.constraint) return out;
    const auto& ctx = *alg.constraint;
    int first = alg.ell() - ctx.m;
    for (int a = 0; a < ctx.m; ++a) {
        int cg = first + a;
        int top = f.max_order(cg);
        DiffPoly dp = ctx.p[static_cast<std::size_t>(a)];
        for (int n = 0; n <= top; ++n) {
            if (n > 0) dp = dp.derivative();
            DiffPoly coef = dp.partial(gen, order);
            if (coef.is_zero()) continue;
            T fp = f.partial(cg, n);
            if (fp.is_zero()) continue;
            out = out - T(coef) * fp;
        }
    }
    return out;
}

} // namespace

DiffPoly partial_derivative(const DiffPoly& f, const AlgebraDescriptor& alg, int gen, int order) {
    check_gen(alg, gen, order);
    return modified_partial(f, alg, gen, order);
}

DiffFrac partial_derivative(const DiffFrac& f, const AlgebraDescriptor& alg, int gen, int order) {
    check_gen(alg, gen, order);
    return modified_partial(f, alg, gen, order);
}

MatrixOp frechet(const std::vector<DiffPoly>& F, int ncols) {
    MatrixOp m(static_cast<int>(F.size()), ncols);
    for (int a = 0; a < static_cast<int>(F.size()); ++a)
        for (int i = 0; i < ncols; ++i) {
            int top = F[a].max_order(i);
            for (int n = 0; n <= top; ++n) m(a, i).set(n, DiffFrac(F[a].partial(i, n)));
        }
    return m;
}

MatrixOp frechet(const std::vector<DiffPoly>& F, const AlgebraDescriptor& alg) { return frechet(F, alg.ell()); }

DiffPoly euler_operator(const DiffPoly& f, int gen) {
    int top = f.max_order(gen);
    DiffPoly acc;
    // Horner form: Σ (-∂)^n a_n = a_0 - ∂(a_1 - ∂(a_2 - ...))
    for (int n = top; n >= 0; --n) {
        acc = f.partial(gen, n) - acc.derivative();
    }
    return acc;
}

std::vector<DiffPoly> variational_derivative(const DiffPoly& f, const AlgebraDescriptor& alg, VarMode mode) {
    std::vector<DiffPoly> full(static_cast<std::size_t>(alg.ell()));
    for (int i = 0; i < alg.ell(); ++i) full[i] = euler_operator(f, i);
    if (mode == VarMode::Ordinary) return full;
    if (!alg.constraint) fail(ErrorKind::NotSpecialForm, "tilde variational derivative needs a constraint context");
    const auto& ctx = *alg.constraint;
    int k = alg.ngen();
    std::vector<DiffPoly> out(full.begin(), full.begin() + k);
    MatrixOp dpstar = adjoint(frechet(ctx.p, k));
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < ctx.m; ++a) {
            const DiffPoly& v = full[static_cast<std::size_t>(k + a)];
            if (v.is_zero() || dpstar(i, a).is_zero()) continue;
            out[i] -= require_polynomial(apply(dpstar(i, a), DiffFrac(v)), "tilde variational derivative");
        }
    return out;
}

DiffPoly require_polynomial(const DiffFrac& f, const char* what) {
    if (!f.is_polynomial()) fail(ErrorKind::NonPolynomialInput, what);
    return f.num();
}

bool is_total_derivative(const DiffPoly& f) {
    for (const auto& t : f.terms())
        if (jet_degree(t.mono) == 0) return false;
    std::vector<int> gens;
    for (VarKey v : f.variables())
        if (is_jet(v)) gens.push_back(key_gen(v));
    for (int g : gens)
        if (!euler_operator(f, g).is_zero()) return false;
    return true;
}

namespace {
// H(r) = Σ_i Σ_{k>=1} Σ_{j<k} u_i^(j) (-∂)^{k-1-j} ∂r/∂u_i^(k); ∂H(r_d) = d·r_d
DiffPoly total_homotopy(const DiffPoly& r) {
    std::map<int, int> tops;
    for (VarKey v : r.variables())
        if (is_jet(v)) {
            int g = key_gen(v);
            tops[g] = std::max(tops[g], key_order(v));
        }
    DiffPoly out;
    for (const auto& [g, top] : tops) {
        for (int k = 1; k <= top; ++k) {
            DiffPoly pk = r.partial(g, k);
            if (pk.is_zero()) continue;
            DiffPoly cur = pk; // (-∂)^{k-1-j} applied, j from k-1 down to 0
            for (int j = k - 1; j >= 0; --j) {
                out += DiffPoly::jet(g, j) * cur;
                cur = -cur.derivative();
            }
        }
    }
    return out;
}
} // namespace

DiffPoly antiderivative(const DiffPoly& f) {
    if (f.is_zero()) return {};
    std::map<unsigned, DiffPolyBuilder> parts;
    for (const auto& t : f.terms()) {
        unsigned d = jet_degree(t.mono);
        if (d == 0) fail(ErrorKind::NoWitness, "integrand has a jet-free term");
        parts[d].add(t.mono, t.coeff);
    }
    DiffPoly g;
    for (auto& [d, b] : parts) g += total_homotopy(b.build()) * Rational(1, d);
    if (g.derivative() != f) fail(ErrorKind::NoWitness, "integrand is not a total derivative");
    return g;
}

DiffFrac antiderivative(const DiffFrac& f) {
    if (!f.den().is_quasiconstant()) {
        if (auto q = f.num().exact_div(f.den())) return DiffFrac(antiderivative(*q));
        fail(ErrorKind::NoWitness, "antiderivative of a non-polynomial fraction");
    }
    DiffPoly g = antiderivative(f.num());
    return DiffFrac(g, f.den());
}

bool helmholtz_holds(const std::vector<DiffPoly>& xi) {
    int n = static_cast<int>(xi.size());
    MatrixOp d = frechet(xi, n);
    for (const auto& x : xi)
        for (VarKey v : x.variables())
            if (is_jet(v) && key_gen(v) >= n) return false;
    return d == adjoint(d);
}

DiffPoly homotopy_reconstruct(const std::vector<DiffPoly>& xi) {
    int n = static_cast<int>(xi.size());
    for (const auto& x : xi)
        for (VarKey v : x.variables())
            if (is_jet(v) && key_gen(v) >= n) fail(ErrorKind::NonPolynomialInput, "gradient depends on extra variables");
    if (!helmholtz_holds(xi)) fail(ErrorKind::HelmholtzViolation, "Frechet derivative is not self-adjoint");
    // g = ∫_0^1 Σ u_i ξ_i[t u] dt, a term of jet degree d contributes 1/(d+1)
    DiffPolyBuilder b;
    for (int i = 0; i < n; ++i)
        for (const auto& t : xi[i].terms()) {
            unsigned d = jet_degree(t.mono);
            b.add(mono_mul(t.mono, {{jet_key(i, 0), 1}}), t.coeff / (d + 1));
        }
    return b.build();
}

bool equal_mod_derivatives(const DiffPoly& a, const DiffPoly& b, int ngen) {
    DiffPoly d = a - b;
    for (int i = 0; i < ngen; ++i)
        if (!euler_operator(d, i).is_zero()) return false;
    return true;
}

DiffPoly quotient_project(const DiffPoly& f, const AlgebraDescriptor& alg) {
    if (!alg.constraint) fail(ErrorKind::NotSpecialForm, "projection needs a constraint context");
    const auto& ctx = *alg.constraint;
    int first = alg.ell() - ctx.m;
    std::vector<std::vector<DiffPoly>> cache(static_cast<std::size_t>(ctx.m));
    return f.substitute([&](int g, int n) -> std::optional<DiffPoly> {
        if (g < first || g >= alg.ell()) return std::nullopt;
        auto& c = cache[static_cast<std::size_t>(g - first)];
        if (c.empty()) c.push_back(-ctx.p[static_cast<std::size_t>(g - first)]);
        while (static_cast<int>(c.size()) <= n) c.push_back(c.back().derivative());
        return c[static_cast<std::size_t>(n)];
    });
}

DiffFrac quotient_project(const DiffFrac& f, const AlgebraDescriptor& alg) {
    DiffPoly d = quotient_project(f.den(), alg);
    if (d.is_zero()) fail(ErrorKind::DenominatorVanishes, "denominator vanishes on the quotient");
    return DiffFrac(quotient_project(f.num(), alg), d);
}

PseudoOp quotient_project(const PseudoOp& p, const AlgebraDescriptor& alg) {
    PseudoOp r;
    for (const auto& [k, c] : p.coeffs()) r.set(k, quotient_project(c, alg));
    return r.with_depth(p.depth());
}

MatrixOp quotient_project(const MatrixOp& m, const AlgebraDescriptor& alg) {
    MatrixOp r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = quotient_project(m(i, j), alg);
    return r;
}

} // namespace pvad
