#pragma once

#include "diffpoly.hpp"

namespace pvad {

// Element of the fraction field. Reduced opportunistically: the denominator is
// made monic, common monomial content is cancelled and exact polynomial
// division is attempted. Equality is decided by cross-multiplication.
class DiffFrac {
public:
    DiffFrac() : den_(1) {}
    DiffFrac(long c) : num_(c), den_(1) {}
    DiffFrac(const Rational& c) : num_(c), den_(1) {}
    DiffFrac(DiffPoly p) : num_(std::move(p)), den_(1) {}
    DiffFrac(DiffPoly n, DiffPoly d);

    const DiffPoly& num() const { return num_; }
    const DiffPoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_one(); }
    bool is_quasiconstant() const { return num_.is_quasiconstant() && den_.is_quasiconstant(); }
    bool is_number() const { return num_.is_number() && den_.is_one(); }
    Rational number_value() const { return num_.number_value(); }

    DiffFrac operator-() const;
    friend DiffFrac operator+(const DiffFrac& a, const DiffFrac& b);
    friend DiffFrac operator-(const DiffFrac& a, const DiffFrac& b);
    friend DiffFrac operator*(const DiffFrac& a, const DiffFrac& b);
    friend DiffFrac operator/(const DiffFrac& a, const DiffFrac& b);
    DiffFrac& operator+=(const DiffFrac& o) { return *this = *this + o; }
    DiffFrac& operator-=(const DiffFrac& o) { return *this = *this - o; }
    DiffFrac& operator*=(const DiffFrac& o) { return *this = *this * o; }
    bool operator==(const DiffFrac& o) const;
    bool operator!=(const DiffFrac& o) const { return !(*this == o); }

    DiffFrac inverse() const;
    DiffFrac derivative() const;
    DiffFrac derivative(unsigned n) const;
    DiffFrac partial(VarKey v) const;
    DiffFrac partial(int gen, int order) const { return partial(jet_key(gen, order)); }
    int max_order(int gen) const { return std::max(num_.max_order(gen), den_.max_order(gen)); }
    int max_order() const { return std::max(num_.max_order(), den_.max_order()); }

    std::string str(const AlgebraDescriptor& alg) const;

private:
    DiffPoly num_, den_;
    void normalize();
};

} // namespace pvad
