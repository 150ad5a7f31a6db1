#pragma once

#include "algebra.hpp"
#include "psdo.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>

namespace pvad {

// Σ_k c_k λ^k, exactly known for powers >= -depth.
class LambdaSeries {
public:
    LambdaSeries() = default;
    static LambdaSeries constant(const DiffFrac& f);
    // symbol P(λ): coefficients copied verbatim
    static LambdaSeries symbol(const PseudoOp& p);

    const std::map<int, DiffFrac>& coeffs() const { return c_; }
    int depth() const { return depth_; }
    bool exact() const { return depth_ >= kExact; }
    bool is_zero() const { return c_.empty(); }
    int top() const { return c_.empty() ? 0 : c_.rbegin()->first; }
    DiffFrac coeff(int k) const;

    void add_to(int k, const DiffFrac& v);
    LambdaSeries& with_depth(int k);
    LambdaSeries operator-() const;
    LambdaSeries& operator+=(const LambdaSeries& o);
    LambdaSeries& operator-=(const LambdaSeries& o);
    friend LambdaSeries operator+(LambdaSeries a, const LambdaSeries& b) { return a += b; }
    friend LambdaSeries operator-(LambdaSeries a, const LambdaSeries& b) { return a -= b; }
    LambdaSeries scaled(const DiffFrac& f) const;
    LambdaSeries times_power(int e) const; // λ^e · X
    // (λ+∂)^s X, ∂ acting on the coefficients
    LambdaSeries shift(int s, int cap = -1) const;
    bool agrees(const LambdaSeries& o, int k) const;
    // first coefficient (power >= -k) that is nonzero
    std::optional<std::pair<int, DiffFrac>> first_nonzero(int k) const;

    std::string str(const AlgebraDescriptor& alg) const;

private:
    std::map<int, DiffFrac> c_;
    int depth_ = kExact;
};

// P(λ+∂) f with (λ+∂)^k expanded in non-negative powers of ∂
LambdaSeries symbol_shift_apply(const PseudoOp& p, const DiffFrac& f, int cap = -1);
// P(λ+∂) applied to a λ-series, coefficientwise
LambdaSeries symbol_shift_apply(const PseudoOp& p, const LambdaSeries& x, int cap = -1);
// a (λ+∂)^{-1} f, exact to depth k
LambdaSeries tail_shift_apply(const DiffFrac& a, const DiffFrac& f, int k);

enum class Var { Lambda, Mu, Nu };

// Validity window of a double series: cell (a,b) = coefficient of λ^a μ^b is
// exactly known iff b >= -kmu and a + b >= -tot.
struct Window {
    int tot = kExact;
    int kmu = kExact;
};

Window meet(Window a, Window b);

// Truncated image of V_{λ,μ} in V((λ^{-1}))((μ^{-1})). ν = λ+μ.
class DoubleSeries {
public:
    DoubleSeries() = default;
    explicit DoubleSeries(Window w) : win_(w) {}
    static DoubleSeries from_lambda(const LambdaSeries& s);
    static DoubleSeries from_mu(const LambdaSeries& s);
    static DoubleSeries constant(const DiffFrac& f);

    using Key = std::pair<int, int>;
    const std::map<Key, DiffFrac>& coeffs() const { return c_; }
    Window window() const { return win_; }
    bool is_zero() const { return c_.empty(); }
    bool valid(int a, int b) const { return b >= -win_.kmu && a + b >= -win_.tot; }
    int max_mu() const;
    int max_deg() const;

    void add_to(int a, int b, const DiffFrac& v);
    void restrict(Window w);
    DoubleSeries& operator+=(const DoubleSeries& o);
    DoubleSeries& operator-=(const DoubleSeries& o);
    DoubleSeries scaled(const DiffFrac& f) const;
    DoubleSeries map_coeffs(const std::function<DiffFrac(const DiffFrac&)>& fn) const;

    std::string str(const AlgebraDescriptor& alg) const;

private:
    std::map<Key, DiffFrac> c_;
    Window win_;
};

DoubleSeries multiply(const DoubleSeries& x, const DoubleSeries& y);
// (x+∂)^s Z; for s < 0 the expansion is only generated inside cap
DoubleSeries shift_apply(const DoubleSeries& z, Var x, int s, Window cap);
// Σ_s c_s (x+∂)^s Z for a one-variable series c
DoubleSeries series_at_shift(const LambdaSeries& c, Var x, const DoubleSeries& z, Window cap);

} // namespace pvad
