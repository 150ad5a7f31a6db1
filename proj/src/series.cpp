#include "pvad/series.hpp"
#include "pvad/error.hpp"

#include <algorithm>
#include <climits>
#include <sstream>

namespace pvad {

namespace {
Rational binom_q(long s, long r) { return Rational(binomial(s, static_cast<unsigned long>(r))); }

// a - b keeping "exact" sticky
int dsub(int a, int b) { return a >= kExact ? kExact : std::min(kExact, a - b); }

struct Derivs {
    explicit Derivs(const DiffFrac& f) { d.push_back(f); }
    const DiffFrac& get(std::size_t r) {
        while (d.size() <= r) d.push_back(d.back().is_zero() ? DiffFrac() : d.back().derivative());
        return d[r];
    }
    std::vector<DiffFrac> d;
};

void acc_add(std::map<int, DiffFrac>& m, int k, const DiffFrac& v) {
    if (v.is_zero()) return;
    auto it = m.find(k);
    if (it == m.end()) m.emplace(k, v);
    else {
        it->second += v;
        if (it->second.is_zero()) m.erase(it);
    }
}

int resolve(int cap) { return cap < 0 ? default_depth() : cap; }
} // namespace

// ------------------------------------------------------------ LambdaSeries

LambdaSeries LambdaSeries::constant(const DiffFrac& f) {
    LambdaSeries s;
    s.add_to(0, f);
    return s;
}

LambdaSeries LambdaSeries::symbol(const PseudoOp& p) {
    LambdaSeries s;
    for (const auto& [k, c] : p.coeffs()) s.c_[k] = c;
    s.depth_ = p.depth();
    return s;
}

DiffFrac LambdaSeries::coeff(int k) const {
    auto it = c_.find(k);
    return it == c_.end() ? DiffFrac() : it->second;
}

void LambdaSeries::add_to(int k, const DiffFrac& v) {
    if (k < -depth_) return;
    acc_add(c_, k, v);
}

LambdaSeries& LambdaSeries::with_depth(int k) {
    if (k < depth_) {
        depth_ = k;
        c_.erase(c_.begin(), c_.lower_bound(-k));
    }
    return *this;
}

LambdaSeries LambdaSeries::operator-() const {
    LambdaSeries r = *this;
    for (auto& [k, c] : r.c_) c = -c;
    return r;
}

LambdaSeries& LambdaSeries::operator+=(const LambdaSeries& o) {
    with_depth(o.depth_);
    for (const auto& [k, c] : o.c_) add_to(k, c);
    return *this;
}

LambdaSeries& LambdaSeries::operator-=(const LambdaSeries& o) {
    with_depth(o.depth_);
    for (const auto& [k, c] : o.c_) add_to(k, -c);
    return *this;
}

LambdaSeries LambdaSeries::scaled(const DiffFrac& f) const {
    LambdaSeries r;
    r.depth_ = depth_;
    if (f.is_zero()) return r;
    for (const auto& [k, c] : c_) r.add_to(k, f * c);
    return r;
}

LambdaSeries LambdaSeries::times_power(int e) const {
    LambdaSeries r;
    r.depth_ = dsub(depth_, e);
    for (const auto& [k, c] : c_) r.c_[k + e] = c;
    return r;
}

LambdaSeries LambdaSeries::shift(int s, int cap) const {
    LambdaSeries r;
    long d = exact() ? (s >= 0 ? kExact : resolve(cap)) : static_cast<long>(depth_) - s;
    if (!exact() && d > kExact) d = kExact;
    bool finite = d < kExact;
    r.depth_ = static_cast<int>(d);
    for (const auto& [e, c] : c_) {
        Derivs dc(c);
        long rmax = s >= 0 ? s : LONG_MAX;
        if (finite) rmax = std::min<long>(rmax, e + s + d);
        for (long rr = 0; rr <= rmax; ++rr) {
            const DiffFrac& x = dc.get(static_cast<std::size_t>(rr));
            if (x.is_zero()) break;
            r.add_to(static_cast<int>(e + s - rr), x * DiffFrac(binom_q(s, rr)));
        }
    }
    return r;
}

bool LambdaSeries::agrees(const LambdaSeries& o, int k) const {
    if (depth_ < k || o.depth_ < k) return false;
    return !(*this - o).first_nonzero(k).has_value();
}

std::optional<std::pair<int, DiffFrac>> LambdaSeries::first_nonzero(int k) const {
    for (auto it = c_.rbegin(); it != c_.rend(); ++it)
        if (it->first >= -k && !it->second.is_zero()) return *it;
    return std::nullopt;
}

std::string LambdaSeries::str(const AlgebraDescriptor& alg) const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        if (!first) os << " + ";
        first = false;
        os << "(" << it->second.str(alg) << ")";
        if (it->first != 0) os << "*lambda^" << it->first;
    }
    if (!exact()) os << " + O(lambda^" << -depth_ - 1 << ")";
    return os.str();
}

LambdaSeries symbol_shift_apply(const PseudoOp& p, const DiffFrac& f, int cap) {
    LambdaSeries r;
    if (f.is_zero() || p.is_zero()) {
        if (!p.exact()) r.with_depth(p.depth());
        return r;
    }
    int d = kExact;
    if (!p.exact()) d = p.depth();
    else if (p.has_negative()) d = resolve(cap);
    r.with_depth(d);
    bool finite = d < kExact;
    Derivs df(f);
    for (const auto& [n, a] : p.coeffs()) {
        long rmax = n >= 0 ? n : LONG_MAX;
        if (finite) rmax = std::min<long>(rmax, static_cast<long>(n) + d);
        for (long rr = 0; rr <= rmax; ++rr) {
            const DiffFrac& x = df.get(static_cast<std::size_t>(rr));
            if (x.is_zero()) break;
            Rational b = binom_q(n, rr);
            r.add_to(static_cast<int>(n - rr), a * x * DiffFrac(b));
        }
    }
    return r;
}

LambdaSeries symbol_shift_apply(const PseudoOp& p, const LambdaSeries& x, int cap) {
    LambdaSeries r;
    if (p.is_zero() || x.is_zero()) {
        int d = kExact;
        if (!x.exact() && !p.is_zero()) d = dsub(x.depth(), p.order());
        if (!p.exact() && !x.is_zero()) d = std::min(d, dsub(p.depth(), x.top()));
        return r.with_depth(d);
    }
    int dt = kExact;
    if (!x.exact()) dt = dsub(x.depth(), p.order());
    if (!p.exact()) dt = std::min(dt, dsub(p.depth(), x.top()));
    else if (p.has_negative()) dt = std::min(dt, resolve(cap));
    r.with_depth(dt);
    for (const auto& [e, c] : x.coeffs()) {
        int inner = dt >= kExact ? resolve(cap) : dt + e;
        if (inner < -p.order() - 1 && dt < kExact) continue;
        LambdaSeries s = symbol_shift_apply(p, c, std::max(inner, 0));
        if (!p.exact()) s.with_depth(std::min(s.depth(), p.depth()));
        for (const auto& [k, v] : s.coeffs()) r.add_to(k + e, v);
    }
    return r;
}

LambdaSeries tail_shift_apply(const DiffFrac& a, const DiffFrac& f, int k) {
    LambdaSeries r;
    r.with_depth(k);
    if (a.is_zero() || f.is_zero()) return r;
    Derivs df(f);
    for (int rr = 0; rr + 1 <= k; ++rr) {
        const DiffFrac& x = df.get(static_cast<std::size_t>(rr));
        if (x.is_zero()) break;
        r.add_to(-1 - rr, (rr % 2 ? -a : a) * x);
    }
    return r;
}

// ------------------------------------------------------------ DoubleSeries

Window meet(Window a, Window b) { return {std::min(a.tot, b.tot), std::min(a.kmu, b.kmu)}; }

DoubleSeries DoubleSeries::from_lambda(const LambdaSeries& s) {
    DoubleSeries r(Window{s.depth(), kExact});
    for (const auto& [k, c] : s.coeffs()) r.add_to(k, 0, c);
    return r;
}

DoubleSeries DoubleSeries::from_mu(const LambdaSeries& s) {
    // only cells (0,b) are present; everything else is an exact zero
    DoubleSeries r(Window{kExact, s.depth()});
    for (const auto& [k, c] : s.coeffs()) r.add_to(0, k, c);
    return r;
}

DoubleSeries DoubleSeries::constant(const DiffFrac& f) {
    DoubleSeries r;
    r.add_to(0, 0, f);
    return r;
}

int DoubleSeries::max_mu() const {
    int m = INT_MIN / 2;
    for (const auto& [k, c] : c_) m = std::max(m, k.second);
    return m;
}

int DoubleSeries::max_deg() const {
    int m = INT_MIN / 2;
    for (const auto& [k, c] : c_) m = std::max(m, k.first + k.second);
    return m;
}

void DoubleSeries::add_to(int a, int b, const DiffFrac& v) {
    if (v.is_zero() || !valid(a, b)) return;
    auto it = c_.find({a, b});
    if (it == c_.end()) c_.emplace(Key{a, b}, v);
    else {
        it->second += v;
        if (it->second.is_zero()) c_.erase(it);
    }
}

void DoubleSeries::restrict(Window w) {
    win_ = meet(win_, w);
    for (auto it = c_.begin(); it != c_.end();)
        if (!valid(it->first.first, it->first.second)) it = c_.erase(it);
        else ++it;
}

DoubleSeries& DoubleSeries::operator+=(const DoubleSeries& o) {
    restrict(o.win_);
    for (const auto& [k, c] : o.c_) add_to(k.first, k.second, c);
    return *this;
}

DoubleSeries& DoubleSeries::operator-=(const DoubleSeries& o) {
    restrict(o.win_);
    for (const auto& [k, c] : o.c_) add_to(k.first, k.second, -c);
    return *this;
}

DoubleSeries DoubleSeries::scaled(const DiffFrac& f) const {
    DoubleSeries r(win_);
    if (f.is_zero()) return r;
    for (const auto& [k, c] : c_) r.add_to(k.first, k.second, f * c);
    return r;
}

DoubleSeries DoubleSeries::map_coeffs(const std::function<DiffFrac(const DiffFrac&)>& fn) const {
    DoubleSeries r(win_);
    for (const auto& [k, c] : c_) r.add_to(k.first, k.second, fn(c));
    return r;
}

std::string DoubleSeries::str(const AlgebraDescriptor& alg) const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        if (!first) os << " + ";
        first = false;
        os << "(" << it->second.str(alg) << ")*lambda^" << it->first.first << "*mu^" << it->first.second;
    }
    return os.str();
}

namespace {
int max_mu_or0(const DoubleSeries& s) { return s.is_zero() ? 0 : s.max_mu(); }
int max_deg_or0(const DoubleSeries& s) { return s.is_zero() ? 0 : s.max_deg(); }

void require_finite(Window w) {
    if (w.tot >= kExact / 2 || w.kmu >= kExact / 2) fail(ErrorKind::Unsupported, "double series window is unbounded");
}
} // namespace

DoubleSeries multiply(const DoubleSeries& x, const DoubleSeries& y) {
    Window wx = x.window(), wy = y.window();
    Window w;
    // unknown cells of one factor only reach totals shifted by the other's top degree
    w.tot = std::min(dsub(wx.tot, max_deg_or0(y)), dsub(wy.tot, max_deg_or0(x)));
    w.kmu = std::min(dsub(wx.kmu, max_mu_or0(y)), dsub(wy.kmu, max_mu_or0(x)));
    DoubleSeries r(w);
    for (const auto& [kx, cx] : x.coeffs())
        for (const auto& [ky, cy] : y.coeffs()) {
            int a = kx.first + ky.first, b = kx.second + ky.second;
            if (!r.valid(a, b)) continue;
            r.add_to(a, b, cx * cy);
        }
    return r;
}

DoubleSeries shift_apply(const DoubleSeries& z, Var x, int s, Window cap) {
    Window w = z.window();
    w.tot = dsub(w.tot, s);
    if (x != Var::Lambda) w.kmu = dsub(w.kmu, s);
    // negative powers expand to infinite series: only generate inside cap
    if (s < 0) w = meet(w, cap);
    DoubleSeries r(w);
    if (z.is_zero()) return r;
    if (s < 0) require_finite(w);
    for (const auto& [k, c] : z.coeffs()) {
        auto [a0, b0] = k;
        Derivs dc(c);
        if (x == Var::Lambda) {
            // Σ_r C(s,r) λ^{s-r} ∂^r
            long rmax = static_cast<long>(a0) + b0 + s + w.tot;
            if (s >= 0) rmax = std::min<long>(rmax, s);
            for (long rr = 0; rr <= rmax; ++rr) {
                const DiffFrac& d = dc.get(static_cast<std::size_t>(rr));
                if (d.is_zero()) break;
                r.add_to(static_cast<int>(a0 + s - rr), b0, d * DiffFrac(binom_q(s, rr)));
            }
        } else if (x == Var::Mu) {
            long rmax = std::min<long>(static_cast<long>(b0) + s + w.kmu, static_cast<long>(a0) + b0 + s + w.tot);
            if (s >= 0) rmax = std::min<long>(rmax, s);
            for (long rr = 0; rr <= rmax; ++rr) {
                const DiffFrac& d = dc.get(static_cast<std::size_t>(rr));
                if (d.is_zero()) break;
                r.add_to(a0, static_cast<int>(b0 + s - rr), d * DiffFrac(binom_q(s, rr)));
            }
        } else {
            // (λ+μ+∂)^s = Σ_r C(s,r) μ^{s-r} Σ_k C(r,k) λ^k ∂^{r-k}
            long rmax = static_cast<long>(b0) + s + w.kmu;
            if (s >= 0) rmax = std::min<long>(rmax, s);
            for (long rr = 0; rr <= rmax; ++rr) {
                Rational bs = binom_q(s, rr);
                int b = static_cast<int>(b0 + s - rr);
                // a0 + k + b >= -tot
                long kmin = std::max<long>(0, -static_cast<long>(w.tot) - a0 - b);
                for (long kk = kmin; kk <= rr; ++kk) {
                    const DiffFrac& d = dc.get(static_cast<std::size_t>(rr - kk));
                    if (d.is_zero()) continue;
                    r.add_to(static_cast<int>(a0 + kk), b, d * DiffFrac(Rational(bs * binom_q(rr, kk))));
                }
            }
        }
    }
    return r;
}

DoubleSeries series_at_shift(const LambdaSeries& c, Var x, const DoubleSeries& z, Window cap) {
    Window w = cap;
    if (!c.exact() && !z.is_zero()) {
        int dm = z.max_deg(), mm = z.max_mu();
        w.tot = std::min(w.tot, c.depth() - dm);
        if (x != Var::Lambda) w.kmu = std::min(w.kmu, c.depth() - mm);
    }
    DoubleSeries r(meet(w, z.window()));
    for (const auto& [s, cs] : c.coeffs()) {
        DoubleSeries t = shift_apply(z, x, s, w).scaled(cs);
        r += t;
    }
    return r;
}

} // namespace pvad
