#include "pvad/diffpoly.hpp"
#include "pvad/algebra.hpp"

#include <algorithm>
#include <sstream>

namespace pvad {

unsigned total_degree(const Monomial& m) {
    unsigned d = 0;
    for (const auto& f : m) d += f.exp;
    return d;
}

unsigned jet_degree(const Monomial& m) {
    unsigned d = 0;
    for (const auto& f : m)
        if (is_jet(f.var)) d += f.exp;
    return d;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].var < b[j].var) r.push_back(a[i++]);
        else if (b[j].var < a[i].var) r.push_back(b[j++]);
        else {
            r.push_back({a[i].var, a[i].exp + b[j].exp});
            ++i, ++j;
        }
    }
    while (i < a.size()) r.push_back(a[i++]);
    while (j < b.size()) r.push_back(b[j++]);
    return r;
}

int mono_cmp(const Monomial& a, const Monomial& b) {
    unsigned da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db ? -1 : 1;
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].var != b[i].var) return a[i].var < b[i].var ? 1 : -1;
        if (a[i].exp != b[i].exp) return a[i].exp < b[i].exp ? -1 : 1;
    }
    if (a.size() == b.size()) return 0;
    return a.size() < b.size() ? -1 : 1;
}

bool mono_divides(const Monomial& d, const Monomial& m) {
    std::size_t j = 0;
    for (const auto& f : d) {
        while (j < m.size() && m[j].var < f.var) ++j;
        if (j == m.size() || m[j].var != f.var || m[j].exp < f.exp) return false;
    }
    return true;
}

Monomial mono_div(const Monomial& m, const Monomial& d) {
    Monomial r;
    std::size_t j = 0;
    for (const auto& f : m) {
        while (j < d.size() && d[j].var < f.var) ++j;
        std::uint32_t e = f.exp;
        if (j < d.size() && d[j].var == f.var) e -= d[j].exp;
        if (e) r.push_back({f.var, e});
    }
    return r;
}

Monomial mono_gcd(const Monomial& a, const Monomial& b) {
    Monomial r;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].var < b[j].var) ++i;
        else if (b[j].var < a[i].var) ++j;
        else {
            r.push_back({a[i].var, std::min(a[i].exp, b[j].exp)});
            ++i, ++j;
        }
    }
    return r;
}

namespace {
bool mono_desc(const Term& x, const Term& y) { return mono_cmp(x.mono, y.mono) > 0; }
} // namespace

DiffPoly DiffPoly::from_unsorted(std::vector<Term> ts) {
    std::sort(ts.begin(), ts.end(), mono_desc);
    DiffPoly p;
    for (auto& t : ts) {
        if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
            p.terms_.back().coeff += t.coeff;
            continue;
        }
        if (!p.terms_.empty() && sgn(p.terms_.back().coeff) == 0) p.terms_.pop_back();
        p.terms_.push_back(std::move(t));
    }
    if (!p.terms_.empty() && sgn(p.terms_.back().coeff) == 0) p.terms_.pop_back();
    return p;
}

DiffPoly DiffPoly::from_sorted(std::vector<Term> ts) {
    DiffPoly p;
    p.terms_ = std::move(ts);
    return p;
}

void DiffPolyBuilder::add(Monomial m, Rational c) {
    if (sgn(c) != 0) ts_.push_back({std::move(m), std::move(c)});
}

void DiffPolyBuilder::add(const DiffPoly& p, const Rational& scale) {
    if (sgn(scale) == 0) return;
    for (const auto& t : p.terms()) ts_.push_back({t.mono, t.coeff * scale});
}

DiffPoly DiffPolyBuilder::build() { return DiffPoly::from_unsorted(std::move(ts_)); }

DiffPoly::DiffPoly(long c) {
    if (c != 0) terms_.push_back({{}, Rational(c)});
}

DiffPoly::DiffPoly(const Rational& c) {
    if (sgn(c) != 0) terms_.push_back({{}, c});
}

DiffPoly DiffPoly::jet(int gen, int order) { return monomial({{jet_key(gen, order), 1}}, 1); }

DiffPoly DiffPoly::symbol(int idx) { return monomial({{const_key(idx), 1}}, 1); }

DiffPoly DiffPoly::monomial(Monomial m, Rational c) {
    DiffPoly p;
    if (sgn(c) != 0) p.terms_.push_back({std::move(m), std::move(c)});
    return p;
}

bool DiffPoly::is_number() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.empty()); }

bool DiffPoly::is_one() const { return terms_.size() == 1 && terms_[0].mono.empty() && terms_[0].coeff == 1; }

bool DiffPoly::is_quasiconstant() const {
    for (const auto& t : terms_)
        for (const auto& f : t.mono)
            if (is_jet(f.var)) return false;
    return true;
}

Rational DiffPoly::number_value() const { return terms_.empty() ? Rational(0) : terms_[0].coeff; }

DiffPoly DiffPoly::operator-() const {
    DiffPoly r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
}

namespace {
DiffPoly merge(const std::vector<Term>& a, const std::vector<Term>& b, int sign) {
    std::vector<Term> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        int c;
        if (i == a.size()) c = -1;
        else if (j == b.size()) c = 1;
        else c = mono_cmp(a[i].mono, b[j].mono);
        if (c > 0) out.push_back(a[i++]);
        else if (c < 0) {
            out.push_back(b[j++]);
            if (sign < 0) out.back().coeff = -out.back().coeff;
        } else {
            Rational s = sign > 0 ? Rational(a[i].coeff + b[j].coeff) : Rational(a[i].coeff - b[j].coeff);
            if (sgn(s) != 0) out.push_back({a[i].mono, s});
            ++i, ++j;
        }
    }
    return DiffPoly::from_sorted(std::move(out));
}
} // namespace

DiffPoly& DiffPoly::operator+=(const DiffPoly& o) {
    if (o.terms_.empty()) return *this;
    if (terms_.empty()) return *this = o;
    *this = merge(terms_, o.terms_, 1);
    return *this;
}

DiffPoly& DiffPoly::operator-=(const DiffPoly& o) {
    if (o.terms_.empty()) return *this;
    *this = merge(terms_, o.terms_, -1);
    return *this;
}

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
    if (a.terms_.empty() || b.terms_.empty()) return {};
    if (b.is_number()) return a * b.terms_[0].coeff;
    if (a.is_number()) return b * a.terms_[0].coeff;
    std::vector<Term> ts;
    ts.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& x : a.terms_)
        for (const auto& y : b.terms_) ts.push_back({mono_mul(x.mono, y.mono), x.coeff * y.coeff});
    return DiffPoly::from_unsorted(std::move(ts));
}

DiffPoly& DiffPoly::operator*=(const DiffPoly& o) { return *this = *this * o; }

DiffPoly& DiffPoly::operator*=(const Rational& q) {
    if (sgn(q) == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& t : terms_) t.coeff *= q;
    return *this;
}

bool DiffPoly::operator==(const DiffPoly& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].coeff != o.terms_[i].coeff || !(terms_[i].mono == o.terms_[i].mono)) return false;
    return true;
}

DiffPoly DiffPoly::pow(unsigned e) const {
    DiffPoly r(1), b = *this;
    while (e) {
        if (e & 1) r *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return r;
}

DiffPoly DiffPoly::derivative() const {
    std::vector<Term> ts;
    for (const auto& t : terms_) {
        for (std::size_t k = 0; k < t.mono.size(); ++k) {
            const Factor& f = t.mono[k];
            if (!is_jet(f.var)) continue;
            Monomial m = t.mono;
            if (f.exp == 1) m.erase(m.begin() + static_cast<long>(k));
            else m[k].exp -= 1;
            m = mono_mul(m, {{f.var + 1, 1}});
            ts.push_back({std::move(m), t.coeff * f.exp});
        }
    }
    return from_unsorted(std::move(ts));
}

DiffPoly DiffPoly::derivative(unsigned n) const {
    DiffPoly r = *this;
    for (unsigned i = 0; i < n && !r.is_zero(); ++i) r = r.derivative();
    return r;
}

DiffPoly DiffPoly::partial(VarKey v) const {
    std::vector<Term> ts;
    for (const auto& t : terms_) {
        for (std::size_t k = 0; k < t.mono.size(); ++k) {
            if (t.mono[k].var != v) continue;
            Monomial m = t.mono;
            std::uint32_t e = m[k].exp;
            if (e == 1) m.erase(m.begin() + static_cast<long>(k));
            else m[k].exp -= 1;
            ts.push_back({std::move(m), t.coeff * e});
        }
    }
    // partial derivative preserves relative order only up to ties; resort
    return from_unsorted(std::move(ts));
}

int DiffPoly::max_order(int gen) const {
    int best = -1;
    for (const auto& t : terms_)
        for (const auto& f : t.mono)
            if (is_jet(f.var) && key_gen(f.var) == gen) best = std::max(best, key_order(f.var));
    return best;
}

int DiffPoly::max_order() const {
    int best = -1;
    for (const auto& t : terms_)
        for (const auto& f : t.mono)
            if (is_jet(f.var)) best = std::max(best, key_order(f.var));
    return best;
}

bool DiffPoly::depends_on_gen(int gen) const { return max_order(gen) >= 0; }

std::vector<VarKey> DiffPoly::variables() const {
    std::vector<VarKey> vs;
    for (const auto& t : terms_)
        for (const auto& f : t.mono) vs.push_back(f.var);
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
}

Monomial DiffPoly::monomial_content() const {
    if (terms_.empty()) return {};
    Monomial g = terms_[0].mono;
    for (std::size_t i = 1; i < terms_.size() && !g.empty(); ++i) g = mono_gcd(g, terms_[i].mono);
    return g;
}

DiffPoly DiffPoly::div_monomial(const Monomial& m) const {
    if (m.empty()) return *this;
    DiffPoly r;
    r.terms_.reserve(terms_.size());
    for (const auto& t : terms_) r.terms_.push_back({mono_div(t.mono, m), t.coeff});
    // dividing every term by the same monomial keeps the graded order
    return r;
}

std::optional<DiffPoly> DiffPoly::exact_div(const DiffPoly& d) const {
    if (d.is_zero()) return std::nullopt;
    if (d.is_number()) return *this * Rational(1 / d.terms_[0].coeff);
    DiffPoly r = *this;
    DiffPolyBuilder q;
    const Term& lt = d.terms_[0];
    std::size_t guard = 0;
    while (!r.is_zero()) {
        const Term& rt = r.terms_[0];
        if (!mono_divides(lt.mono, rt.mono)) return std::nullopt;
        Monomial m = mono_div(rt.mono, lt.mono);
        Rational c = rt.coeff / lt.coeff;
        q.add(m, c);
        r -= d * monomial(m, c);
        if (++guard > 100000) return std::nullopt;
    }
    return q.build();
}

DiffPoly DiffPoly::filter(const std::function<bool(const Monomial&)>& pred) const {
    DiffPoly r;
    for (const auto& t : terms_)
        if (pred(t.mono)) r.terms_.push_back(t);
    return r;
}

DiffPoly DiffPoly::substitute(const std::function<std::optional<DiffPoly>(int, int)>& sub) const {
    DiffPolyBuilder out;
    for (const auto& t : terms_) {
        Monomial keep;
        DiffPoly factor(1);
        for (const auto& f : t.mono) {
            std::optional<DiffPoly> s;
            if (is_jet(f.var)) s = sub(key_gen(f.var), key_order(f.var));
            if (s) factor *= s->pow(f.exp);
            else keep.push_back(f);
        }
        out.add(factor * monomial(keep, t.coeff));
    }
    return out.build();
}

std::string var_name(VarKey v, const AlgebraDescriptor& alg) {
    if (!is_jet(v)) {
        int i = key_order(v);
        return i < static_cast<int>(alg.constants.size()) ? alg.constants[static_cast<std::size_t>(i)]
                                                          : "c" + std::to_string(i);
    }
    int g = key_gen(v), n = key_order(v);
    std::string s = g < alg.ell() ? alg.names[static_cast<std::size_t>(g)] : "u" + std::to_string(g + 1);
    if (n <= 3) s += std::string(static_cast<std::size_t>(n), '\'');
    else s += "^(" + std::to_string(n) + ")";
    return s;
}

std::string DiffPoly::str(const AlgebraDescriptor& alg) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
        Rational c = t.coeff;
        if (!first) os << (sgn(c) < 0 ? " - " : " + ");
        else if (sgn(c) < 0) os << "-";
        first = false;
        Rational a = abs(c);
        bool unit = a == 1;
        if (t.mono.empty() || !unit) {
            os << a.get_str();
            if (!t.mono.empty()) os << "*";
        }
        bool firstf = true;
        for (const auto& f : t.mono) {
            if (!firstf) os << "*";
            firstf = false;
            os << var_name(f.var, alg);
            if (f.exp > 1) os << "^" << f.exp;
        }
    }
    return os.str();
}

} // namespace pvad
