#include "pvad/psdo.hpp"
#include "pvad/error.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <sstream>

namespace pvad {

namespace {
std::atomic<int> g_default_depth{8};

int resolve_cap(int cap) { return cap < 0 ? g_default_depth.load() : cap; }

Rational binom_q(long s, long r) { return Rational(binomial(s, static_cast<unsigned long>(r))); }

// derivatives of a coefficient, computed on demand
struct DerivCache {
    explicit DerivCache(const DiffFrac& f) { d.push_back(f); }
    const DiffFrac& get(std::size_t r) {
        while (d.size() <= r) d.push_back(d.back().is_zero() ? DiffFrac() : d.back().derivative());
        return d[r];
    }
    std::vector<DiffFrac> d;
};

bool all_constant(const PseudoOp& q) {
    for (const auto& [k, c] : q.coeffs())
        if (!c.derivative().is_zero()) return false;
    return true;
}
} // namespace

int default_depth() { return g_default_depth.load(); }
void set_default_depth(int k) { g_default_depth.store(k); }

PseudoOp::PseudoOp(const DiffFrac& f) {
    if (!f.is_zero()) c_[0] = f;
}

PseudoOp PseudoOp::d(int k) { return term(DiffFrac(1), k); }

PseudoOp PseudoOp::term(const DiffFrac& c, int k) {
    PseudoOp p;
    if (!c.is_zero()) p.c_[k] = c;
    return p;
}

bool PseudoOp::is_differential() const { return exact() && !has_negative(); }

int PseudoOp::order() const { return c_.empty() ? INT_MIN / 2 : c_.rbegin()->first; }
int PseudoOp::lowest() const { return c_.empty() ? INT_MAX / 2 : c_.begin()->first; }

DiffFrac PseudoOp::coeff(int k) const {
    auto it = c_.find(k);
    return it == c_.end() ? DiffFrac() : it->second;
}

void PseudoOp::set(int k, const DiffFrac& v) {
    if (v.is_zero()) c_.erase(k);
    else c_[k] = v;
}

void PseudoOp::add_to(int k, const DiffFrac& v) {
    if (v.is_zero()) return;
    auto it = c_.find(k);
    if (it == c_.end()) c_.emplace(k, v);
    else {
        it->second += v;
        if (it->second.is_zero()) c_.erase(it);
    }
}

PseudoOp& PseudoOp::with_depth(int k) {
    if (k < depth_) {
        depth_ = k;
        c_.erase(c_.begin(), c_.lower_bound(-k));
    }
    return *this;
}

PseudoOp PseudoOp::truncated(int k) const {
    PseudoOp r = *this;
    return r.with_depth(k);
}

PseudoOp PseudoOp::operator-() const {
    PseudoOp r = *this;
    for (auto& [k, c] : r.c_) c = -c;
    return r;
}

PseudoOp& PseudoOp::operator+=(const PseudoOp& o) {
    for (const auto& [k, c] : o.c_) add_to(k, c);
    with_depth(o.depth_);
    return *this;
}

PseudoOp& PseudoOp::operator-=(const PseudoOp& o) {
    for (const auto& [k, c] : o.c_) add_to(k, -c);
    with_depth(o.depth_);
    return *this;
}

PseudoOp PseudoOp::scaled(const DiffFrac& f) const {
    PseudoOp r;
    r.depth_ = depth_;
    if (f.is_zero()) return r;
    for (const auto& [k, c] : c_) r.set(k, f * c);
    return r;
}

bool PseudoOp::agrees(const PseudoOp& o, int k) const {
    if (depth_ < k || o.depth_ < k) return false;
    auto a = c_.lower_bound(-k), b = o.c_.lower_bound(-k);
    while (a != c_.end() || b != o.c_.end()) {
        if (a == c_.end() || b == o.c_.end() || a->first != b->first) return false;
        if (a->second != b->second) return false;
        ++a, ++b;
    }
    return true;
}

bool PseudoOp::operator==(const PseudoOp& o) const { return agrees(o, std::min(depth_, o.depth_)); }

std::string PseudoOp::str(const AlgebraDescriptor& alg) const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        int k = it->first;
        const DiffFrac& c = it->second;
        std::string s = c.str(alg);
        bool wrap = c.is_polynomial() && c.num().size() > 1;
        if (wrap) s = "(" + s + ")";
        bool neg = !wrap && !s.empty() && s[0] == '-';
        if (!first) os << (neg ? " - " : " + ");
        else if (neg) os << "-";
        first = false;
        std::string body = neg ? s.substr(1) : s;
        if (k == 0) {
            os << body;
            continue;
        }
        if (body != "1") os << body << "*";
        if (k == 1) os << "d";
        else if (k > 1) os << "d^" << k;
        else if (k == -1) os << "dinv";
        else os << "dinv^" << -k;
    }
    return os.str();
}

PseudoOp compose(const PseudoOp& p, const PseudoOp& q, int cap) {
    PseudoOp r;
    if (p.is_zero() || q.is_zero()) {
        int dd = kExact;
        if (!p.exact() && !q.is_zero()) dd = p.depth() - q.order();
        if (!q.exact() && !p.is_zero()) dd = std::min(dd, q.depth() - p.order());
        return r.with_depth(std::min(dd, kExact));
    }
    long kr = kExact;
    if (!p.exact()) kr = std::min<long>(kr, static_cast<long>(p.depth()) - q.order());
    if (!q.exact()) kr = std::min<long>(kr, static_cast<long>(q.depth()) - p.order());
    if (kr >= kExact && p.has_negative() && !all_constant(q)) kr = resolve_cap(cap);
    bool finite = kr < kExact;
    std::map<int, DiffFrac> out;
    for (const auto& [j, b] : q.coeffs()) {
        DerivCache db(b);
        for (const auto& [i, a] : p.coeffs()) {
            long rmax = i >= 0 ? i : LONG_MAX;
            if (finite) rmax = std::min<long>(rmax, static_cast<long>(i) + j + kr);
            for (long rr = 0; rr <= rmax; ++rr) {
                const DiffFrac& bd = db.get(static_cast<std::size_t>(rr));
                if (bd.is_zero()) break;
                Rational cb = binom_q(i, rr);
                if (sgn(cb) == 0) continue;
                DiffFrac t = a * bd * DiffFrac(cb);
                int pw = static_cast<int>(i + j - rr);
                auto it = out.find(pw);
                if (it == out.end()) out.emplace(pw, std::move(t));
                else it->second += t;
            }
        }
    }
    for (auto& [k, c] : out) r.set(k, c);
    if (finite) r.with_depth(static_cast<int>(kr));
    return r;
}

PseudoOp adjoint(const PseudoOp& p, int cap) {
    long kd = p.depth();
    if (p.exact() && p.has_negative() && !all_constant(p)) kd = resolve_cap(cap);
    bool finite = kd < kExact;
    PseudoOp r;
    for (const auto& [n, a] : p.coeffs()) {
        DerivCache da(a);
        long rmax = n >= 0 ? n : LONG_MAX;
        if (finite) rmax = std::min<long>(rmax, static_cast<long>(n) + kd);
        Rational sign = (n % 2 == 0) ? 1 : -1;
        for (long rr = 0; rr <= rmax; ++rr) {
            const DiffFrac& ad = da.get(static_cast<std::size_t>(rr));
            if (ad.is_zero()) break;
            r.add_to(static_cast<int>(n - rr), ad * DiffFrac(Rational(sign * binom_q(n, rr))));
        }
    }
    if (finite) r.with_depth(static_cast<int>(kd));
    return r;
}

namespace {
// P∘(c∂^m), powers >= lowest only, added into acc with the given sign
void compose_term_into(std::map<int, DiffFrac>& acc, const PseudoOp& p, const DiffFrac& c, int m, int lowest,
                       int sign) {
    DerivCache dc(c);
    for (const auto& [i, a] : p.coeffs()) {
        long rmax = static_cast<long>(i) + m - lowest;
        if (i >= 0) rmax = std::min<long>(rmax, i);
        for (long rr = 0; rr <= rmax; ++rr) {
            const DiffFrac& cd = dc.get(static_cast<std::size_t>(rr));
            if (cd.is_zero()) break;
            Rational cb = binom_q(i, rr) * sign;
            if (sgn(cb) == 0) continue;
            int pw = static_cast<int>(i + m - rr);
            DiffFrac t = a * cd * DiffFrac(cb);
            auto it = acc.find(pw);
            if (it == acc.end()) acc.emplace(pw, std::move(t));
            else {
                it->second += t;
                if (it->second.is_zero()) acc.erase(it);
            }
        }
    }
}
} // namespace

PseudoOp invert(const PseudoOp& p, int k) {
    if (p.is_zero()) fail(ErrorKind::Degenerate, "inverse of zero operator");
    int n = p.order();
    if (!p.exact() && n < -p.depth()) fail(ErrorKind::Degenerate, "no known leading term");
    DiffFrac ainv = p.coeff(n).inverse();
    int kq = k;
    if (!p.exact()) kq = std::min(k, p.depth() + 2 * n);
    PseudoOp q;
    int steps = kq - n;
    std::map<int, DiffFrac> res;
    res.emplace(0, DiffFrac(1));
    for (int kk = 0; kk <= steps; ++kk) {
        auto it = res.find(-kk);
        if (it == res.end()) continue;
        DiffFrac c = it->second * ainv;
        q.set(-n - kk, c);
        compose_term_into(res, p, c, -n - kk, -steps, -1);
        res.erase(-kk);
    }
    q.with_depth(kq);
    return q;
}

DiffFrac apply(const PseudoOp& p, const DiffFrac& f) {
    if (!p.is_differential()) fail(ErrorKind::Unsupported, "applying a non-differential operator to a function");
    DiffFrac out;
    DerivCache df(f);
    for (const auto& [n, a] : p.coeffs()) out += a * df.get(static_cast<std::size_t>(n));
    return out;
}

// ---------------------------------------------------------------- matrices

MatrixOp MatrixOp::identity(int n) {
    MatrixOp m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = PseudoOp(DiffFrac(1));
    return m;
}

int MatrixOp::depth() const {
    int d = kExact;
    for (const auto& e : e_) d = std::min(d, e.depth());
    return d;
}

bool MatrixOp::is_differential() const {
    for (const auto& e : e_)
        if (!e.is_differential()) return false;
    return true;
}

bool MatrixOp::is_zero() const {
    for (const auto& e : e_)
        if (!e.is_zero()) return false;
    return true;
}

int MatrixOp::max_order() const {
    int o = 0;
    for (const auto& e : e_)
        if (!e.is_zero()) o = std::max(o, e.order());
    return o;
}

MatrixOp MatrixOp::truncated(int k) const {
    MatrixOp r = *this;
    for (auto& e : r.e_) e.with_depth(k);
    return r;
}

MatrixOp MatrixOp::transpose() const {
    MatrixOp r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(j, i) = at(i, j);
    return r;
}

MatrixOp MatrixOp::block(int r0, int c0, int nr, int nc) const {
    MatrixOp r(nr, nc);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) r(i, j) = at(r0 + i, c0 + j);
    return r;
}

MatrixOp MatrixOp::operator-() const {
    MatrixOp r = *this;
    for (auto& e : r.e_) e = -e;
    return r;
}

MatrixOp& MatrixOp::operator+=(const MatrixOp& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) fail(ErrorKind::DimensionMismatch, "matrix sum");
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
    return *this;
}

MatrixOp& MatrixOp::operator-=(const MatrixOp& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) fail(ErrorKind::DimensionMismatch, "matrix difference");
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] -= o.e_[i];
    return *this;
}

bool MatrixOp::agrees(const MatrixOp& o, int k) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) return false;
    for (std::size_t i = 0; i < e_.size(); ++i)
        if (!e_[i].agrees(o.e_[i], k)) return false;
    return true;
}

bool MatrixOp::operator==(const MatrixOp& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) return false;
    for (std::size_t i = 0; i < e_.size(); ++i)
        if (!(e_[i] == o.e_[i])) return false;
    return true;
}

MatrixOp compose(const MatrixOp& p, const MatrixOp& q, int cap, bool parallel) {
    if (p.cols() != q.rows()) fail(ErrorKind::DimensionMismatch, "matrix composition");
    MatrixOp r(p.rows(), q.cols());
    int n = p.rows() * q.cols();
    cap = resolve_cap(cap);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int idx = 0; idx < n; ++idx) {
        int i = idx / q.cols(), j = idx % q.cols();
        PseudoOp acc;
        for (int k = 0; k < p.cols(); ++k) acc += compose(p(i, k), q(k, j), cap);
        r(i, j) = std::move(acc);
    }
    return r;
}

MatrixOp adjoint(const MatrixOp& p, int cap) {
    MatrixOp r(p.cols(), p.rows());
    for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.cols(); ++j) r(j, i) = adjoint(p(i, j), cap);
    return r;
}

namespace {
bool known_nonzero(const PseudoOp& e) { return !e.is_zero(); }

MatrixOp gauss_jordan(const MatrixOp& m, int kw) {
    int n = m.rows();
    // rows of [A | I]
    std::vector<std::vector<PseudoOp>> a(static_cast<std::size_t>(n), std::vector<PseudoOp>(static_cast<std::size_t>(2 * n)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a[i][j] = m(i, j);
        a[i][n + i] = PseudoOp(DiffFrac(1));
    }
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (known_nonzero(a[r][c])) {
                piv = r;
                break;
            }
        if (piv < 0) fail(ErrorKind::Degenerate, "no pivot in column " + std::to_string(c + 1));
        std::swap(a[c], a[piv]);
        PseudoOp inv = invert(a[c][c], kw);
        for (int j = 0; j < 2 * n; ++j)
            if (j == c) a[c][j] = PseudoOp(DiffFrac(1)).with_depth(inv.depth());
            else if (!a[c][j].is_zero() || !a[c][j].exact()) a[c][j] = compose(inv, a[c][j], kw);
        for (int r = 0; r < n; ++r) {
            if (r == c || a[r][c].is_zero()) continue;
            PseudoOp f = a[r][c];
            for (int j = 0; j < 2 * n; ++j) {
                if (j == c) {
                    a[r][j] = PseudoOp().with_depth(std::min(a[r][j].depth(), a[c][j].depth()));
                    continue;
                }
                if (a[c][j].is_zero() && a[c][j].exact()) continue;
                a[r][j] -= compose(f, a[c][j], kw);
            }
        }
    }
    MatrixOp inv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv(i, j) = a[i][n + j];
    return inv;
}
} // namespace

MatrixOp invert(const MatrixOp& m, int k) {
    if (m.rows() != m.cols()) fail(ErrorKind::DimensionMismatch, "invert needs a square matrix");
    int slack = m.max_order() + 1;
    for (int attempt = 0; attempt < 6; ++attempt) {
        MatrixOp r = gauss_jordan(m, k + slack);
        if (r.depth() >= k) return r.truncated(k);
        slack += (k - r.depth()) + 2;
    }
    fail(ErrorKind::Degenerate, "inverse not resolved to the requested depth");
}

std::vector<DiffFrac> apply(const MatrixOp& m, const std::vector<DiffFrac>& v) {
    if (static_cast<int>(v.size()) != m.cols()) fail(ErrorKind::DimensionMismatch, "apply");
    std::vector<DiffFrac> out(static_cast<std::size_t>(m.rows()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (!m(i, j).is_zero()) out[i] += apply(m(i, j), v[j]);
    return out;
}

FractionCheck verify_fractional(const FractionPair& pair, const MatrixOp& m, int k) {
    FractionCheck out;
    out.depth = k;
    if (!pair.A.is_differential() || !pair.B.is_differential()) {
        out.detail = "pair entries must be differential";
        return out;
    }
    int slack = pair.A.max_order() + 2;
    MatrixOp binv = invert(pair.B, k + slack);
    MatrixOp prod = compose(pair.A, binv);
    if (prod.depth() < k) {
        out.detail = "insufficient depth";
        return out;
    }
    out.ok = prod.agrees(m, k);
    if (!out.ok) {
        for (int i = 0; i < m.rows() && out.detail.empty(); ++i)
            for (int j = 0; j < m.cols(); ++j)
                if (!prod(i, j).agrees(m(i, j), k)) {
                    out.detail = "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") differs";
                    break;
                }
    }
    return out;
}

} // namespace pvad
