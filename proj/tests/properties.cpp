#include "properties.hpp"

#include "pvad/diffring.hpp"
#include "pvad/expr.hpp"
#include "pvad/model.hpp"

#include <functional>
#include <sstream>

namespace pvad::props {

namespace {

DiffFrac F(const DiffPoly& p) { return DiffFrac(p); }

// P(∂) with the coefficients of a λ-series
PseudoOp as_symbol(const LambdaSeries& x) {
    PseudoOp p;
    for (const auto& [s, c] : x.coeffs()) p.set(s, c);
    if (!x.exact()) p.with_depth(x.depth());
    return p;
}

PseudoOp random_diff(std::mt19937& rng, int ngen, int maxorder) {
    PseudoOp p;
    std::uniform_int_distribution<int> o(0, maxorder);
    int top = o(rng);
    for (int k = 0; k <= top; ++k)
        if (rng() % 3) p.set(k, F(random_poly(rng, ngen, 1, 2)));
    return p;
}

PseudoOp random_pseudo(std::mt19937& rng, int ngen, int lo, int hi, int maxdeg = 2) {
    PseudoOp p;
    for (int k = lo; k <= hi; ++k)
        if (rng() % 3) p.set(k, F(random_poly(rng, ngen, 2, 2, maxdeg)));
    return p;
}

// runs fn(rng, k) and fn(rng', k+2) from the same seed
struct Runner {
    SuiteResult r;
    void run(unsigned seed, int cases, int k, const std::function<std::string(std::mt19937&, int)>& fn) {
        for (int c = 0; c < cases; ++c) {
            std::mt19937 a(seed * 7919u + static_cast<unsigned>(c)), b(seed * 7919u + static_cast<unsigned>(c));
            std::string v0 = fn(a, k), v2 = fn(b, k + 2);
            ++r.cases;
            if (!v0.empty()) {
                ++r.failures;
                if (r.first_failure.empty()) r.first_failure = "case " + std::to_string(c) + ": " + v0;
            }
            if (v0.empty() != v2.empty()) {
                r.stable = false;
                if (r.first_failure.empty()) r.first_failure = "case " + std::to_string(c) + " changes verdict at K+2";
            }
        }
    }
};

} // namespace

std::string SuiteResult::line() const {
    std::ostringstream os;
    os << name << ": " << cases - failures << "/" << cases << (stable ? "" : " unstable at K+2") << " "
       << (pass() ? "PASS" : "FAIL");
    if (!first_failure.empty()) os << " (" << first_failure << ")";
    return os.str();
}

DiffPoly random_poly(std::mt19937& rng, int ngen, int maxord, int terms, int maxdeg) {
    std::uniform_int_distribution<int> g(0, ngen - 1), o(0, maxord), c(-3, 3), deg(0, maxdeg);
    DiffPolyBuilder b;
    for (int t = 0; t < terms; ++t) {
        DiffPoly m(c(rng));
        int d = deg(rng);
        for (int i = 0; i < d; ++i) m *= DiffPoly::jet(g(rng), o(rng));
        b.add(m);
    }
    return b.build();
}

PVAStructure random_structure(std::mt19937& rng, const AlgebraPtr& alg, bool nonlocal, int depth) {
    int n = alg->ngen();
    MatrixOp x(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x(i, j) = random_diff(rng, n, 2);
    NonlocalForm f;
    f.local = x - adjoint(x);
    if (nonlocal) {
        VecTail t;
        for (int i = 0; i < n; ++i) {
            t.left.push_back(F(random_poly(rng, n, 1, 2, 1)));
            t.right.push_back(F(random_poly(rng, n, 1, 2, 1)));
        }
        f.tails.push_back(t);
        f.tails.push_back(VecTail{t.right, t.left});
    }
    return make_structure("R", alg, f, depth);
}

SuiteResult bracket_axioms(unsigned seed, int cases, int k) {
    auto alg = make_algebra({"u", "v"});
    Runner run;
    run.r.name = "bracket axioms";
    run.run(seed, cases, k, [&](std::mt19937& rng, int kk) -> std::string {
        int kin = kk + 6;
        PVAStructure s = random_structure(rng, alg, rng() % 2, kin + 4);
        DiffFrac f = F(random_poly(rng, 2, 2, 2)), g = F(random_poly(rng, 2, 2, 2)), h = F(random_poly(rng, 2, 1, 2));
        auto br = [&](const DiffFrac& a, const DiffFrac& b) { return master_bracket(s, a, b, kin); };
        LambdaSeries fg = br(f, g), fh = br(f, h), gh = br(g, h);
        if (!br(f.derivative(), g).agrees(-fg.times_power(1), kk)) return "left sesquilinearity";
        if (!br(f, g.derivative()).agrees(fg.shift(1, kin), kk)) return "right sesquilinearity";
        if (!br(f, g * h).agrees(fg.scaled(h) + fh.scaled(g), kk)) return "left Leibniz";
        LambdaSeries rl = symbol_shift_apply(as_symbol(fh), g, kin) + symbol_shift_apply(as_symbol(gh), f, kin);
        if (!br(f * g, h).agrees(rl, kk)) return "right Leibniz";
        if (!br(g, f).agrees(-reflect(fg, kin), kk)) return "skewsymmetry";
        return {};
    });
    return run.r;
}

SuiteResult psdo_roundtrips(unsigned seed, int cases, int k) {
    Runner run;
    run.r.name = "psdo round-trips";
    run.run(seed, cases, k, [&](std::mt19937& rng, int kk) -> std::string {
        int kin = kk + 2;
        PseudoOp p = random_pseudo(rng, 2, -2, 2), q = random_pseudo(rng, 2, -1, 2), r = random_pseudo(rng, 2, 0, 2);
        PseudoOp lhs = compose(compose(p, q, kin), r, kin), rhs = compose(p, compose(q, r, kin), kin);
        if (!lhs.agrees(rhs, kk)) return "associativity";
        if (!adjoint(compose(p, q, kin), kin).agrees(compose(adjoint(q, kin), adjoint(p, kin), kin), kk))
            return "adjoint of a product";
        if (adjoint(adjoint(r)) != r) return "adjoint involution";
        // invertible: monomial leading coefficient (sums make the fraction
        // arithmetic of the inverse grow quickly)
        PseudoOp m = random_pseudo(rng, 2, -2, 1, 1);
        DiffPoly lead = random_poly(rng, 2, 1, 1);
        if (lead.is_zero()) lead = DiffPoly(2);
        m.set(2, F(lead));
        PseudoOp mi = invert(m, kin);
        if (!compose(m, mi, kin).agrees(PseudoOp(DiffFrac(1)), kk)) return "right inverse";
        if (!compose(mi, m, kin).agrees(PseudoOp(DiffFrac(1)), kk)) return "left inverse";
        return {};
    });
    return run.r;
}

SuiteResult homotopy_identity(unsigned seed, int cases) {
    auto alg = make_algebra({"u", "v"});
    Runner run;
    run.r.name = "homotopy identity";
    run.run(seed, cases, 0, [&](std::mt19937& rng, int) -> std::string {
        DiffPoly f = random_poly(rng, 2, 3, 4, 3);
        auto xi = variational_derivative(f, *alg);
        DiffPoly h = homotopy_reconstruct(xi);
        if (variational_derivative(h, *alg) != xi) return "variational derivative not recovered";
        if (!equal_mod_derivatives(h, f, 2)) return "density differs by more than a total derivative";
        return {};
    });
    return run.r;
}

SuiteResult inverse_identity(unsigned seed, int cases, int k) {
    auto u = make_algebra({"u"});
    auto scalar = [&](const std::string& e) {
        auto v = parse_operator(e, *u, 8);
        std::vector<std::vector<ScalarForm>> rows{{*v.form}};
        return make_structure(e, u, assemble(rows));
    };
    std::vector<PVAStructure> hs = {scalar("d"), scalar("u*d + d*u - 1/2*d^3")};
    std::vector<std::string> cs = {"u + d", "u*d + d*u", "d + u'", "u^2 + d^2", "u", "6*d"};
    auto mf = load_model("sl3min", 8);
    const PVAStructure& h1 = mf.structure("H1");
    MatrixOp six(1, 1);
    six(0, 0) = PseudoOp::term(DiffFrac(6), 1);

    Runner run;
    run.r.name = "inverse identity";
    run.run(seed, cases, k, [&](std::mt19937& rng, int kk) -> std::string {
        if (rng() % 5 == 0) {
            DiffFrac a = F(random_poly(rng, 4, 1, 3));
            return verify_inverse_identity(h1, six, {a}, kk, kk).pass ? "" : "C = 6d on H1";
        }
        const PVAStructure& h = hs[rng() % hs.size()];
        const std::string& ce = cs[rng() % cs.size()];
        MatrixOp c(1, 1);
        c(0, 0) = parse_operator(ce, *u, 8).normal;
        DiffFrac a = F(random_poly(rng, 1, 2, 3));
        if (a.is_zero()) a = F(DiffPoly::jet(0, 1));
        return verify_inverse_identity(h, c, {a}, kk, kk).pass ? "" : "C = " + ce + " on " + h.name;
    });
    return run.r;
}

} // namespace pvad::props
