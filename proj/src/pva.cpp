#include "pvad/pva.hpp"
#include "pvad/diffring.hpp"
#include "pvad/error.hpp"

#include <algorithm>
#include <sstream>

namespace pvad {

namespace {

int resolve(int k) { return k < 0 ? default_depth() : k; }

// highest order of u_gen that a (modified) partial can see in f
int active_order(const DiffFrac& f, const AlgebraDescriptor& alg, int gen) {
    int top = f.max_order(gen);
    if (!alg.constraint) return top;
    int first = alg.ell() - alg.constraint->m;
    for (int a = 0; a < alg.constraint->m; ++a) {
        int c = f.max_order(first + a);
        if (c < 0) continue;
        int p = alg.constraint->p[static_cast<std::size_t>(a)].max_order(gen);
        if (p >= 0) top = std::max(top, p + c);
    }
    return top;
}

int active_order(const DoubleSeries& z, const AlgebraDescriptor& alg, int gen) {
    int top = -1;
    for (const auto& [k, c] : z.coeffs()) top = std::max(top, active_order(c, alg, gen));
    return top;
}

DoubleSeries partial_series(const DoubleSeries& z, const AlgebraDescriptor& alg, int gen, int order) {
    return z.map_coeffs([&](const DiffFrac& c) { return partial_derivative(c, alg, gen, order); });
}

// Master Formula against a precomputed normal form hn
LambdaSeries bracket_with(const MatrixOp& hn, const AlgebraDescriptor& alg, const DiffFrac& f, const DiffFrac& g,
                          int k) {
    int n = hn.rows();
    if (n != alg.ngen()) fail(ErrorKind::DimensionMismatch, "structure size differs from the generator count");
    int cap = k + 2;
    std::vector<LambdaSeries> inner(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        int top = active_order(f, alg, i);
        for (int m = 0; m <= top; ++m) {
            DiffFrac p = partial_derivative(f, alg, i, m);
            if (p.is_zero()) continue;
            LambdaSeries t = LambdaSeries::constant(p).shift(m);
            inner[i] += (m % 2) ? -t : t;
        }
    }
    LambdaSeries out;
    for (int j = 0; j < n; ++j) {
        int top = active_order(g, alg, j);
        if (top < 0) continue;
        LambdaSeries h;
        for (int i = 0; i < n; ++i)
            if (!inner[i].is_zero() && !hn(j, i).is_zero()) h += symbol_shift_apply(hn(j, i), inner[i], cap + top);
        for (int m = 0; m <= top; ++m) {
            DiffFrac p = partial_derivative(g, alg, j, m);
            if (p.is_zero()) continue;
            out += h.shift(m, cap + top).scaled(p);
        }
    }
    if (!hn.is_differential()) out.with_depth(k);
    return out;
}

int max_active(const DiffFrac& f, const AlgebraDescriptor& alg) {
    int top = 0;
    for (int i = 0; i < alg.ngen(); ++i) top = std::max(top, active_order(f, alg, i));
    return top;
}

std::string cell_text(const DoubleSeries& z, const AlgebraDescriptor& alg) {
    if (z.is_zero()) return "";
    auto it = z.coeffs().rbegin();
    std::ostringstream os;
    os << "lambda^" << it->first.first << " mu^" << it->first.second << ": " << it->second.str(alg);
    return os.str();
}

} // namespace

MatrixOp PVAStructure::normal(int depth) const {
    if (form) return form->normal(resolve(depth));
    if (H.is_differential()) return H;
    return H.truncated(resolve(depth));
}

std::optional<NonlocalForm> PVAStructure::exact_form() const {
    if (form) return form;
    if (H.is_differential()) return NonlocalForm{H, {}};
    return std::nullopt;
}

PVAStructure make_structure(std::string name, AlgebraPtr alg, const MatrixOp& h) {
    PVAStructure s;
    s.name = std::move(name);
    s.alg = std::move(alg);
    s.H = h;
    if (h.is_differential()) s.form = NonlocalForm{h, {}};
    return s;
}

PVAStructure make_structure(std::string name, AlgebraPtr alg, const NonlocalForm& f, int depth) {
    PVAStructure s;
    s.name = std::move(name);
    s.alg = std::move(alg);
    s.form = f;
    s.H = f.normal(resolve(depth));
    return s;
}

PVAStructure sum_structure(const PVAStructure& a, const PVAStructure& b, int depth) {
    std::string name = a.name + "+" + b.name;
    auto fa = a.exact_form(), fb = b.exact_form();
    if (fa && fb) return make_structure(name, a.alg, *fa + *fb, depth);
    PVAStructure s;
    s.name = name;
    s.alg = a.alg;
    s.H = a.normal(depth) + b.normal(depth);
    return s;
}

LambdaSeries master_bracket(const PVAStructure& s, const DiffFrac& f, const DiffFrac& g, int depth) {
    int k = resolve(depth);
    const auto& alg = *s.alg;
    int need = k + max_active(f, alg) + max_active(g, alg) + 2;
    return bracket_with(s.normal(need), alg, f, g, k);
}

LambdaSeries reflect(const LambdaSeries& x, int depth) {
    LambdaSeries out;
    out.with_depth(std::min(x.depth(), depth));
    for (const auto& [n, c] : x.coeffs()) {
        LambdaSeries t = LambdaSeries::constant(c).shift(n, depth);
        out += (n % 2) ? -t : t;
    }
    return out.with_depth(std::min(x.depth(), depth));
}

bool is_skewadjoint(const MatrixOp& h, int depth) {
    MatrixOp s = h + adjoint(h, depth);
    int k = std::min(depth, s.depth());
    for (int i = 0; i < s.rows(); ++i)
        for (int j = 0; j < s.cols(); ++j)
            for (const auto& [p, c] : s(i, j).coeffs())
                if (p >= -k && !c.is_zero()) return false;
    return true;
}

SkewReport check_skewsymmetry(const PVAStructure& s, const std::vector<std::pair<DiffFrac, DiffFrac>>& samples,
                              int depth) {
    int k = resolve(depth);
    SkewReport r;
    MatrixOp hn = s.normal(k + s.H.max_order() + 2);
    r.structural = is_skewadjoint(hn, k);
    r.lines.push_back({std::string("SKEWADJOINT ") + s.name + ": " + (r.structural ? "PASS" : "FAIL") +
                           " depth=" + std::to_string(k),
                       r.structural});
    r.pass = r.structural;
    const auto& alg = *s.alg;
    for (const auto& [f, g] : samples) {
        LambdaSeries lhs = master_bracket(s, g, f, k);
        LambdaSeries rhs = -reflect(master_bracket(s, f, g, k), k);
        bool ok = !(lhs - rhs).first_nonzero(k).has_value();
        r.pass = r.pass && ok;
        r.lines.push_back({"SKEW (" + f.str(alg) + "," + g.str(alg) + "): " + (ok ? "PASS" : "FAIL") +
                               " depth=" + std::to_string(k),
                           ok});
    }
    return r;
}

// ----------------------------------------------------------- Jacobi engine

namespace {

struct JacobiEngine {
    const AlgebraDescriptor& alg;
    NonlocalForm F;
    int n;
    int kin;
    Window target, cap;
    MatrixOp hn;
    std::vector<DoubleSeries> el, em; // H_ti symbols as λ- and μ-series, index t*n+i

    // working window = target enlarged by slack; series inputs known to that depth
    JacobiEngine(const PVAStructure& s, const NonlocalForm& f, int klambda, int kmu, int slack)
        : alg(*s.alg), F(f), n(f.rows()), kin(klambda + kmu + slack), target{klambda + kmu, kmu},
          cap{klambda + kmu + slack, kmu + slack} {
        int extra = 2;
        for (const auto& t : F.tails)
            for (int i = 0; i < n; ++i)
                extra = std::max({extra, max_active(t.left[i], alg) + 2, max_active(t.right[i], alg) + 2});
        hn = F.normal(kin + 2 * extra);
        el.resize(static_cast<std::size_t>(n * n));
        em.resize(static_cast<std::size_t>(n * n));
        for (int t = 0; t < n; ++t)
            for (int i = 0; i < n; ++i) {
                LambdaSeries e = LambdaSeries::symbol(hn(t, i));
                if (!e.exact()) e.with_depth(kin);
                el[t * n + i] = DoubleSeries::from_lambda(e);
                em[t * n + i] = DoubleSeries::from_mu(e);
            }
    }

    const DoubleSeries& E(Var x, int t, int i) const { return (x == Var::Lambda ? el : em)[t * n + i]; }

    // {u_i x G} for G depending on the other variable
    DoubleSeries gen_bracket(int i, const DoubleSeries& g, Var x) const {
        DoubleSeries out;
        for (int t = 0; t < n; ++t) {
            int top = active_order(g, alg, t);
            for (int q = 0; q <= top; ++q) {
                DoubleSeries p = partial_series(g, alg, t, q);
                if (p.is_zero()) continue;
                out += multiply(p, shift_apply(E(x, t, i), x, q, cap));
            }
        }
        return out;
    }

    // H_kt(ν+∂) Z
    DoubleSeries happly(int k, int t, const DoubleSeries& z) const {
        DoubleSeries out(z.window());
        for (const auto& [p, c] : F.local(k, t).coeffs()) out += shift_apply(z, Var::Nu, p, cap).scaled(c);
        for (const auto& tl : F.tails) {
            const DiffFrac& a = tl.left[k];
            const DiffFrac& b = tl.right[t];
            if (a.is_zero() || b.is_zero()) continue;
            out += shift_apply(z.scaled(b), Var::Nu, -1, cap).scaled(a);
        }
        return out;
    }

    // {W_ν u_k} for W a λ-series (local in the variables it carries)
    DoubleSeries right_bracket(const DoubleSeries& w, int k) const {
        DoubleSeries out;
        for (int t = 0; t < n; ++t) {
            int top = active_order(w, alg, t);
            for (int m = 0; m <= top; ++m) {
                DoubleSeries p = partial_series(w, alg, t, m);
                if (p.is_zero()) continue;
                DoubleSeries term = happly(k, t, shift_apply(p, Var::Nu, m, cap));
                if (m % 2) out -= term;
                else out += term;
            }
        }
        return out;
    }

    DoubleSeries inv_shift(const DiffFrac& b, Var x) const {
        LambdaSeries y = tail_shift_apply(DiffFrac(1), b, kin);
        return x == Var::Lambda ? DoubleSeries::from_lambda(y) : DoubleSeries::from_mu(y);
    }

    DoubleSeries combination(int i, int j, int k) const {
        // T1 = {u_i λ {u_j μ u_k}}
        DoubleSeries t1 = gen_bracket(i, E(Var::Mu, k, j), Var::Lambda);

        // T2 = {u_j μ {u_i λ u_k}}
        DoubleSeries t2 = gen_bracket(j, DoubleSeries::from_lambda(LambdaSeries::symbol(F.local(k, i))), Var::Mu);
        for (const auto& tl : F.tails) {
            const DiffFrac& a = tl.left[k];
            const DiffFrac& b = tl.right[i];
            if (a.is_zero() || b.is_zero()) continue;
            t2 += multiply(gen_bracket(j, DoubleSeries::constant(a), Var::Mu), inv_shift(b, Var::Lambda));
            t2 += shift_apply(gen_bracket(j, DoubleSeries::constant(b), Var::Mu), Var::Nu, -1, cap).scaled(a);
        }

        // T3 = {{u_i λ u_j} λ+μ u_k}
        DoubleSeries t3 = right_bracket(DoubleSeries::from_lambda(LambdaSeries::symbol(F.local(j, i))), k);
        for (const auto& tl : F.tails) {
            const DiffFrac& a = tl.left[j];
            const DiffFrac& b = tl.right[i];
            if (a.is_zero() || b.is_zero()) continue;
            DoubleSeries y = inv_shift(b, Var::Lambda);
            for (int t = 0; t < n; ++t) {
                int top = active_order(a, alg, t);
                for (int m = 0; m <= top; ++m) {
                    DiffFrac p = partial_derivative(a, alg, t, m);
                    if (p.is_zero()) continue;
                    DoubleSeries term = happly(k, t, shift_apply(y.scaled(p), Var::Nu, m, cap));
                    if (m % 2) t3 -= term;
                    else t3 += term;
                }
            }
            LambdaSeries c = bracket_with(hn, alg, b, DiffFrac(DiffPoly::jet(k)), kin);
            t3 -= series_at_shift(c, Var::Nu, inv_shift(a, Var::Mu), cap);
        }

        DoubleSeries j3 = t1;
        j3 -= t2;
        j3 -= t3;
        return j3;
    }

    bool covers(const DoubleSeries& z) const {
        return z.window().tot >= target.tot && z.window().kmu >= target.kmu;
    }
};

int start_slack(const NonlocalForm& f) { return 3 * std::max(0, f.local.max_order()) + 4; }

} // namespace

DoubleSeries jacobi_combination(const PVAStructure& s, int i, int j, int k, int klambda, int kmu) {
    auto f = s.exact_form();
    if (!f) fail(ErrorKind::Unsupported, "Jacobi check needs an exact weakly non-local form");
    int slack = start_slack(*f);
    for (int attempt = 0; attempt < 6; ++attempt, slack += 4) {
        JacobiEngine eng(s, *f, klambda, kmu, slack);
        DoubleSeries z = eng.combination(i, j, k);
        if (eng.covers(z)) {
            z.restrict(eng.target);
            return z;
        }
    }
    fail(ErrorKind::Unsupported, "Jacobi window did not reach the requested depth");
}

std::vector<std::string> JacobiReport::lines() const {
    std::vector<std::string> out;
    if (!supported) {
        out.push_back("JACOBI: UNSUPPORTED (no exact weakly non-local form)");
        return out;
    }
    for (const auto& t : triples) {
        std::ostringstream os;
        os << "JACOBI (" << t.i + 1 << "," << t.j + 1 << "," << t.k + 1 << "): " << (t.pass ? "PASS" : "FAIL")
           << " depth=(" << klambda << "," << kmu << ")";
        if (!t.pass && !t.detail.empty()) os << " first=" << t.detail;
        out.push_back(os.str());
    }
    return out;
}

JacobiReport check_jacobi(const PVAStructure& s, int klambda, int kmu, bool parallel) {
    JacobiReport r;
    r.klambda = klambda;
    r.kmu = kmu;
    auto f = s.exact_form();
    if (!f) {
        r.supported = false;
        return r;
    }
    int n = f->rows();
    int total = n * n * n;
    r.triples.resize(static_cast<std::size_t>(total));
    std::vector<char> covered(static_cast<std::size_t>(total), 0);
    int slack = start_slack(*f);
    for (int attempt = 0; attempt < 6; ++attempt, slack += 4) {
        JacobiEngine eng(s, *f, klambda, kmu, slack);
        auto run = [&](int idx) {
            if (covered[idx]) return;
            int i = idx / (n * n), j = (idx / n) % n, k = idx % n;
            TripleResult& t = r.triples[idx];
            t.i = i;
            t.j = j;
            t.k = k;
            try {
                DoubleSeries z = eng.combination(i, j, k);
                if (!eng.covers(z)) return;
                covered[idx] = 1;
                t.pass = z.is_zero();
                if (!t.pass) t.detail = cell_text(z, *s.alg);
            } catch (const Error& e) {
                covered[idx] = 1;
                t.pass = false;
                t.detail = e.what();
            }
        };
        if (parallel) {
#pragma omp parallel for schedule(dynamic)
            for (int idx = 0; idx < total; ++idx) run(idx);
        } else {
            for (int idx = 0; idx < total; ++idx) run(idx);
        }
        if (std::all_of(covered.begin(), covered.end(), [](char c) { return c != 0; })) break;
    }
    r.pass = true;
    for (int idx = 0; idx < total; ++idx) {
        if (!covered[idx]) {
            r.triples[idx].pass = false;
            r.triples[idx].detail = "window did not reach the requested depth";
        }
        r.pass = r.pass && r.triples[idx].pass;
    }
    return r;
}

CompatReport check_compatibility(const PVAStructure& s0, const PVAStructure& s1, int klambda, int kmu,
                                 bool parallel) {
    CompatReport r;
    r.sum = check_jacobi(sum_structure(s0, s1), klambda, kmu, parallel);
    r.pass = r.sum.supported && r.sum.pass;
    return r;
}

DoubleSeries triple_bracket(const PVAStructure& s, const DiffFrac& a, const DiffFrac& b, const DiffFrac& c,
                            int klambda, int kmu) {
    const auto& alg = *s.alg;
    Window cap{klambda + kmu, kmu};
    int kin = klambda + kmu + max_active(a, alg) + max_active(b, alg) + max_active(c, alg) + 4;
    DoubleSeries g = DoubleSeries::from_mu(master_bracket(s, b, c, kin));
    DoubleSeries out;
    for (int t = 0; t < s.size(); ++t) {
        int top = active_order(g, alg, t);
        if (top < 0) continue;
        DoubleSeries at = DoubleSeries::from_lambda(master_bracket(s, a, DiffFrac(DiffPoly::jet(t)), kin));
        for (int q = 0; q <= top; ++q) {
            DoubleSeries p = partial_series(g, alg, t, q);
            if (p.is_zero()) continue;
            out += multiply(p, shift_apply(at, Var::Lambda, q, cap));
        }
    }
    out.restrict(cap);
    return out;
}

InverseIdentityReport verify_inverse_identity(const PVAStructure& s, const MatrixOp& c, const std::vector<DiffFrac>& samples,
                                              int klambda, int kmu) {
    const auto& alg = *s.alg;
    InverseIdentityReport r;
    r.pass = true;
    Window cap{klambda + kmu, kmu};
    int kin = klambda + kmu + 2 * c.max_order() + 6;
    MatrixOp ci = invert(c, kin);
    int m = c.rows();
    for (const auto& a : samples) {
        // {a_λ c_{rt;n}} for every coefficient of C
        std::vector<std::map<int, DoubleSeries>> bc(static_cast<std::size_t>(m * m));
        for (int rr = 0; rr < m; ++rr)
            for (int t = 0; t < m; ++t)
                for (const auto& [p, cf] : c(rr, t).coeffs())
                    bc[rr * m + t][p] = DoubleSeries::from_lambda(master_bracket(s, a, cf, kin));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const PseudoOp& d = ci(i, j);
                Window lw = meet(cap, {s.is_local() ? kExact : kin - std::max(0, d.order()), d.depth()});
                DoubleSeries lhs(lw);
                for (const auto& [p, cf] : d.coeffs()) {
                    LambdaSeries b = master_bracket(s, a, cf, kin);
                    for (const auto& [q, v] : b.coeffs()) lhs.add_to(q, p, v);
                }
                DoubleSeries rhs;
                for (int rr = 0; rr < m; ++rr) {
                    LambdaSeries outer = LambdaSeries::symbol(ci(i, rr));
                    for (int t = 0; t < m; ++t) {
                        DoubleSeries cj = DoubleSeries::from_mu(LambdaSeries::symbol(ci(t, j)));
                        DoubleSeries inner;
                        for (const auto& [p, z] : bc[rr * m + t]) inner += multiply(z, shift_apply(cj, Var::Mu, p, cap));
                        rhs += series_at_shift(outer, Var::Nu, inner, cap);
                    }
                }
                DoubleSeries diff = lhs;
                diff += rhs;
                bool covered = diff.window().tot >= cap.tot && diff.window().kmu >= cap.kmu;
                bool ok = covered && diff.is_zero();
                r.pass = r.pass && ok;
                std::ostringstream os;
                os << "INVERSE (" << a.str(alg) << ";" << i + 1 << "," << j + 1 << "): " << (ok ? "PASS" : "FAIL")
                   << " depth=(" << klambda << "," << kmu << ")";
                if (!covered) os << " window=(" << diff.window().tot << "," << diff.window().kmu << ")";
                else if (!ok) os << " first=" << cell_text(diff, alg);
                r.lines.push_back({os.str(), ok});
            }
    }
    return r;
}

} // namespace pvad
