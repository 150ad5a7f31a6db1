#include "pvad/nonlocal.hpp"
#include "pvad/diffring.hpp"
#include "pvad/error.hpp"

namespace pvad {

std::pair<PseudoOp, DiffFrac> split_right(const PseudoOp& p) {
    if (!p.is_differential()) fail(ErrorKind::Unsupported, "split of a non-differential operator");
    PseudoOp p1;
    for (const auto& [n, c] : p.coeffs())
        if (n >= 1) p1.set(n - 1, c);
    return {p1, p.coeff(0)};
}

std::pair<PseudoOp, DiffFrac> split_left(const PseudoOp& q) {
    if (!q.is_differential()) fail(ErrorKind::Unsupported, "split of a non-differential operator");
    PseudoOp q1;
    int top = q.order();
    if (top <= 0) return {q1, q.coeff(0)};
    // ∂∘(r∂^k) = r'∂^k + r∂^{k+1}; peel from the top
    std::vector<DiffFrac> r(static_cast<std::size_t>(top));
    r[top - 1] = q.coeff(top);
    for (int k = top - 1; k >= 1; --k) r[k - 1] = q.coeff(k) - r[k].derivative();
    DiffFrac y = q.coeff(0) - r[0].derivative();
    for (int k = 0; k < top; ++k) q1.set(k, r[k]);
    return {q1, y};
}

PseudoOp tail_normal(const DiffFrac& p, const DiffFrac& q, int depth) {
    PseudoOp inner = compose(PseudoOp::d(-1), PseudoOp(q), depth);
    return compose(PseudoOp(p), inner, depth);
}

PseudoOp normal_form(const ScalarForm& f, int depth) {
    PseudoOp r = f.local;
    for (const auto& t : f.tails) r += tail_normal(t.left, t.right, depth);
    return r;
}

ScalarForm compose_local_tail(const PseudoOp& x, const ScalarTail& t) {
    PseudoOp xp = compose(x, PseudoOp(t.left));
    auto [p1, p0] = split_right(xp);
    ScalarForm out;
    out.local = compose(p1, PseudoOp(t.right));
    if (!p0.is_zero() && !t.right.is_zero()) out.tails.push_back({p0, t.right});
    return out;
}

ScalarForm compose_tail_local(const ScalarTail& t, const PseudoOp& y) {
    PseudoOp qy = compose(PseudoOp(t.right), y);
    auto [q1, y0] = split_left(qy);
    ScalarForm out;
    out.local = compose(PseudoOp(t.left), q1);
    if (!y0.is_zero() && !t.left.is_zero()) out.tails.push_back({t.left, y0});
    return out;
}

MatrixOp NonlocalForm::normal(int depth) const {
    MatrixOp m = local;
    for (const auto& t : tails)
        for (int i = 0; i < rows(); ++i) {
            if (t.left[i].is_zero()) continue;
            for (int j = 0; j < cols(); ++j) {
                if (t.right[j].is_zero()) continue;
                m(i, j) += tail_normal(t.left[i], t.right[j], depth);
            }
        }
    return m;
}

NonlocalForm NonlocalForm::operator+(const NonlocalForm& o) const {
    NonlocalForm r{local + o.local, tails};
    r.tails.insert(r.tails.end(), o.tails.begin(), o.tails.end());
    return r;
}

NonlocalForm NonlocalForm::operator-() const {
    NonlocalForm r{-local, tails};
    for (auto& t : r.tails)
        for (auto& a : t.left) a = -a;
    return r;
}

NonlocalForm NonlocalForm::transpose_adjoint() const {
    // (a ∂^{-1} b^T)* = -b ∂^{-1} a^T
    NonlocalForm r{adjoint(local), {}};
    for (const auto& t : tails) {
        VecTail v{t.right, t.left};
        for (auto& a : v.left) a = -a;
        r.tails.push_back(std::move(v));
    }
    return r;
}

NonlocalForm assemble(const std::vector<std::vector<ScalarForm>>& entries) {
    int n = static_cast<int>(entries.size());
    int m = n ? static_cast<int>(entries[0].size()) : 0;
    NonlocalForm f{MatrixOp(n, m), {}};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            f.local(i, j) = entries[i][j].local;
            for (const auto& t : entries[i][j].tails) {
                VecTail v{std::vector<DiffFrac>(static_cast<std::size_t>(n)), std::vector<DiffFrac>(static_cast<std::size_t>(m))};
                v.left[i] = t.left;
                v.right[j] = t.right;
                f.tails.push_back(std::move(v));
            }
        }
    return f;
}

NonlocalForm sandwich_dinv(const MatrixOp& x, const std::vector<std::vector<Rational>>& kappa, const MatrixOp& y) {
    // X ∂^{-1} Y with X = X1∂ + x0, Y = ∂Y1 + y0:
    // X1∂Y1 + X1 y0 + x0 Y1 + x0 ∂^{-1} y0
    int r = x.rows(), m = x.cols(), c = y.cols();
    NonlocalForm out{MatrixOp(r, c), {}};
    std::vector<std::vector<std::pair<PseudoOp, DiffFrac>>> xs(static_cast<std::size_t>(r)), ys(static_cast<std::size_t>(m));
    for (int i = 0; i < r; ++i)
        for (int a = 0; a < m; ++a) xs[i].push_back(split_right(x(i, a)));
    for (int b = 0; b < m; ++b)
        for (int j = 0; j < c; ++j) ys[b].push_back(split_left(y(b, j)));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            const Rational& k = kappa[a][b];
            if (sgn(k) == 0) continue;
            VecTail t{std::vector<DiffFrac>(static_cast<std::size_t>(r)), std::vector<DiffFrac>(static_cast<std::size_t>(c))};
            bool any_l = false, any_r = false;
            for (int i = 0; i < r; ++i) {
                t.left[i] = xs[i][a].second * DiffFrac(k);
                any_l |= !t.left[i].is_zero();
            }
            for (int j = 0; j < c; ++j) {
                t.right[j] = ys[b][j].second;
                any_r |= !t.right[j].is_zero();
            }
            if (any_l && any_r) out.tails.push_back(std::move(t));
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < c; ++j) {
                    const auto& [x1, x0] = xs[i][a];
                    const auto& [y1, y0] = ys[b][j];
                    PseudoOp s = compose(compose(x1, PseudoOp::d(1)), y1) + compose(x1, PseudoOp(y0)) +
                                 compose(PseudoOp(x0), y1);
                    out.local(i, j) += s.scaled(DiffFrac(k));
                }
        }
    return out;
}

NonlocalForm project_form(const NonlocalForm& f, const AlgebraDescriptor& alg) {
    NonlocalForm r{quotient_project(f.local, alg), {}};
    for (const auto& t : f.tails) {
        VecTail v;
        for (const auto& a : t.left) v.left.push_back(quotient_project(a, alg));
        for (const auto& b : t.right) v.right.push_back(quotient_project(b, alg));
        r.tails.push_back(std::move(v));
    }
    return r;
}

} // namespace pvad
