#include "pvad/difffrac.hpp"
#include "pvad/error.hpp"

namespace pvad {

DiffFrac::DiffFrac(DiffPoly n, DiffPoly d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

void DiffFrac::normalize() {
    if (den_.is_zero()) fail(ErrorKind::DenominatorVanishes, "zero denominator");
    if (num_.is_zero()) {
        den_ = DiffPoly(1);
        return;
    }
    if (den_.is_one()) return;
    Rational lc = den_.leading().coeff;
    if (lc != 1) {
        Rational inv = 1 / lc;
        num_ *= inv;
        den_ *= inv;
    }
    if (den_.is_number()) {
        den_ = DiffPoly(1);
        return;
    }
    Monomial g = mono_gcd(num_.monomial_content(), den_.monomial_content());
    if (!g.empty()) {
        num_ = num_.div_monomial(g);
        den_ = den_.div_monomial(g);
    }
    if (den_.is_one()) return;
    if (!den_.is_monomial()) {
        if (auto q = num_.exact_div(den_)) {
            num_ = std::move(*q);
            den_ = DiffPoly(1);
        } else if (auto r = den_.exact_div(num_)) {
            // num divides den: 1 / (den/num)
            DiffPoly d = std::move(*r);
            num_ = DiffPoly(1);
            den_ = std::move(d);
            Rational l = den_.leading().coeff;
            if (l != 1) {
                num_ *= 1 / l;
                den_ *= 1 / l;
            }
        }
    }
}

DiffFrac DiffFrac::operator-() const {
    DiffFrac r = *this;
    r.num_ = -r.num_;
    return r;
}

DiffFrac operator+(const DiffFrac& a, const DiffFrac& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den_ == b.den_) {
        DiffFrac r;
        r.num_ = a.num_ + b.num_;
        r.den_ = a.den_;
        if (!r.den_.is_one()) r.normalize();
        else if (r.num_.is_zero()) r.den_ = DiffPoly(1);
        return r;
    }
    if (a.den_.is_monomial() && b.den_.is_monomial()) {
        const Monomial& ma = a.den_.leading().mono;
        const Monomial& mb = b.den_.leading().mono;
        Monomial g = mono_gcd(ma, mb);
        Monomial fa = mono_div(mb, g), fb = mono_div(ma, g);
        DiffPoly n = a.num_ * DiffPoly::monomial(fa, 1) + b.num_ * DiffPoly::monomial(fb, 1);
        return DiffFrac(std::move(n), DiffPoly::monomial(mono_mul(ma, fa), 1));
    }
    if (auto q = b.den_.exact_div(a.den_)) return DiffFrac(a.num_ * *q + b.num_, b.den_);
    if (auto q = a.den_.exact_div(b.den_)) return DiffFrac(a.num_ + b.num_ * *q, a.den_);
    return DiffFrac(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

DiffFrac operator-(const DiffFrac& a, const DiffFrac& b) { return a + (-b); }

DiffFrac operator*(const DiffFrac& a, const DiffFrac& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (a.den_.is_one() && b.den_.is_one()) return DiffFrac(a.num_ * b.num_);
    return DiffFrac(a.num_ * b.num_, a.den_ * b.den_);
}

DiffFrac operator/(const DiffFrac& a, const DiffFrac& b) { return a * b.inverse(); }

bool DiffFrac::operator==(const DiffFrac& o) const {
    if (den_ == o.den_) return num_ == o.num_;
    return num_ * o.den_ == o.num_ * den_;
}

DiffFrac DiffFrac::inverse() const {
    if (is_zero()) fail(ErrorKind::DenominatorVanishes, "inverse of zero");
    return DiffFrac(den_, num_);
}

DiffFrac DiffFrac::derivative() const {
    if (den_.is_one()) return DiffFrac(num_.derivative());
    return DiffFrac(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
}

DiffFrac DiffFrac::derivative(unsigned n) const {
    DiffFrac r = *this;
    for (unsigned i = 0; i < n && !r.is_zero(); ++i) r = r.derivative();
    return r;
}

DiffFrac DiffFrac::partial(VarKey v) const {
    if (den_.is_one()) return DiffFrac(num_.partial(v));
    return DiffFrac(num_.partial(v) * den_ - num_ * den_.partial(v), den_ * den_);
}

std::string DiffFrac::str(const AlgebraDescriptor& alg) const {
    if (den_.is_one()) return num_.str(alg);
    std::string n = num_.str(alg), d = den_.str(alg);
    if (num_.size() > 1) n = "(" + n + ")";
    const Term& t = den_.leading();
    bool single = den_.size() == 1 && ((t.mono.empty()) || (t.mono.size() == 1 && t.coeff == 1));
    if (!single) d = "(" + d + ")";
    return n + "/" + d;
}

} // namespace pvad
