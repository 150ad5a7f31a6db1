#pragma once

#include "rational.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pvad {

struct AlgebraDescriptor;

// Variable key: (generator << 16) | order for jet variables; generator 0xFFFF
// marks quasiconstant symbols so they sort after every jet variable.
using VarKey = std::uint32_t;

constexpr std::uint32_t kConstGen = 0xFFFFu;

inline VarKey jet_key(int gen, int order) {
    return (static_cast<std::uint32_t>(gen) << 16) | static_cast<std::uint32_t>(order);
}
inline VarKey const_key(int idx) { return (kConstGen << 16) | static_cast<std::uint32_t>(idx); }
inline int key_gen(VarKey k) { return static_cast<int>(k >> 16); }
inline int key_order(VarKey k) { return static_cast<int>(k & 0xFFFFu); }
inline bool is_jet(VarKey k) { return (k >> 16) != kConstGen; }

struct Factor {
    VarKey var;
    std::uint32_t exp;
    bool operator==(const Factor&) const = default;
};

// Sorted by var, exponents > 0.
using Monomial = std::vector<Factor>;

unsigned total_degree(const Monomial& m);
unsigned jet_degree(const Monomial& m);
Monomial mono_mul(const Monomial& a, const Monomial& b);
// graded lex; returns <0, 0, >0
int mono_cmp(const Monomial& a, const Monomial& b);
bool mono_divides(const Monomial& d, const Monomial& m);
Monomial mono_div(const Monomial& m, const Monomial& d);
Monomial mono_gcd(const Monomial& a, const Monomial& b);

struct Term {
    Monomial mono;
    Rational coeff;
};

class DiffPoly {
public:
    DiffPoly() = default;
    DiffPoly(long c);
    DiffPoly(const Rational& c);

    static DiffPoly jet(int gen, int order = 0);
    static DiffPoly symbol(int idx);
    static DiffPoly monomial(Monomial m, Rational c);
    // caller guarantees descending order and nonzero coefficients
    static DiffPoly from_sorted(std::vector<Term> ts);

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_number() const;
    bool is_one() const;
    // no jet variables at all (numbers and quasiconstant symbols)
    bool is_quasiconstant() const;
    bool is_monomial() const { return terms_.size() == 1; }
    std::size_t size() const { return terms_.size(); }
    const Term& leading() const { return terms_.front(); }
    Rational number_value() const;

    DiffPoly operator-() const;
    DiffPoly& operator+=(const DiffPoly& o);
    DiffPoly& operator-=(const DiffPoly& o);
    DiffPoly& operator*=(const DiffPoly& o);
    DiffPoly& operator*=(const Rational& q);
    friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
    friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }
    friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);
    friend DiffPoly operator*(DiffPoly a, const Rational& q) { return a *= q; }
    friend DiffPoly operator*(const Rational& q, DiffPoly a) { return a *= q; }
    bool operator==(const DiffPoly& o) const;
    bool operator!=(const DiffPoly& o) const { return !(*this == o); }

    DiffPoly pow(unsigned e) const;
    DiffPoly derivative() const;
    DiffPoly derivative(unsigned n) const;
    DiffPoly partial(VarKey v) const;
    DiffPoly partial(int gen, int order) const { return partial(jet_key(gen, order)); }

    // highest derivative order of generator gen present, -1 if absent
    int max_order(int gen) const;
    int max_order() const;
    bool depends_on_gen(int gen) const;
    std::vector<VarKey> variables() const;

    Monomial monomial_content() const;
    DiffPoly div_monomial(const Monomial& m) const;
    std::optional<DiffPoly> exact_div(const DiffPoly& d) const;

    // keep terms for which pred(mono) holds
    DiffPoly filter(const std::function<bool(const Monomial&)>& pred) const;
    // replace each jet variable by sub(gen, order) when it returns a value
    DiffPoly substitute(const std::function<std::optional<DiffPoly>(int, int)>& sub) const;

    std::string str(const AlgebraDescriptor& alg) const;

private:
    std::vector<Term> terms_; // descending monomial order, no zero coefficients
    static DiffPoly from_unsorted(std::vector<Term> ts);
    friend class DiffPolyBuilder;
};

// Accumulates terms and canonicalises once.
class DiffPolyBuilder {
public:
    void add(Monomial m, Rational c);
    void add(const DiffPoly& p, const Rational& scale = 1);
    DiffPoly build();

private:
    std::vector<Term> ts_;
};

std::string var_name(VarKey v, const AlgebraDescriptor& alg);

} // namespace pvad
