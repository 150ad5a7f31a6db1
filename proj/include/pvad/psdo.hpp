#pragma once

#include "difffrac.hpp"

#include <map>
#include <vector>

namespace pvad {

// Depth value meaning "no truncation": the operator is known exactly.
constexpr int kExact = 1 << 28;

int default_depth();
void set_default_depth(int k);

// Σ_k c_k ∂^k, exactly known for every power >= -depth.
class PseudoOp {
public:
    PseudoOp() = default;
    PseudoOp(const DiffFrac& f);
    static PseudoOp d(int k = 1);
    static PseudoOp term(const DiffFrac& c, int k);

    const std::map<int, DiffFrac>& coeffs() const { return c_; }
    int depth() const { return depth_; }
    bool exact() const { return depth_ >= kExact; }
    bool is_zero() const { return c_.empty(); }
    // exactly known and no negative powers
    bool is_differential() const;
    bool has_negative() const { return !c_.empty() && c_.begin()->first < 0; }
    // highest power present; INT_MIN/2 for zero
    int order() const;
    int lowest() const;
    DiffFrac coeff(int k) const;

    void set(int k, const DiffFrac& v);
    void add_to(int k, const DiffFrac& v);
    PseudoOp& with_depth(int k);
    PseudoOp truncated(int k) const;

    PseudoOp operator-() const;
    PseudoOp& operator+=(const PseudoOp& o);
    PseudoOp& operator-=(const PseudoOp& o);
    friend PseudoOp operator+(PseudoOp a, const PseudoOp& b) { return a += b; }
    friend PseudoOp operator-(PseudoOp a, const PseudoOp& b) { return a -= b; }
    PseudoOp scaled(const DiffFrac& f) const; // f·P

    // coefficients of powers >= -k coincide; both must be known that deep
    bool agrees(const PseudoOp& o, int k) const;
    // equal where both are known
    bool operator==(const PseudoOp& o) const;

    std::string str(const AlgebraDescriptor& alg) const;

private:
    std::map<int, DiffFrac> c_;
    int depth_ = kExact;
};

PseudoOp compose(const PseudoOp& p, const PseudoOp& q, int cap = -1);
PseudoOp adjoint(const PseudoOp& p, int cap = -1);
PseudoOp invert(const PseudoOp& p, int k);
// P applied to f; P must be differential
DiffFrac apply(const PseudoOp& p, const DiffFrac& f);

class MatrixOp {
public:
    MatrixOp() = default;
    MatrixOp(int rows, int cols) : rows_(rows), cols_(cols), e_(static_cast<std::size_t>(rows * cols)) {}
    static MatrixOp identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    PseudoOp& at(int i, int j) { return e_[static_cast<std::size_t>(i * cols_ + j)]; }
    const PseudoOp& at(int i, int j) const { return e_[static_cast<std::size_t>(i * cols_ + j)]; }
    PseudoOp& operator()(int i, int j) { return at(i, j); }
    const PseudoOp& operator()(int i, int j) const { return at(i, j); }

    int depth() const;
    bool is_differential() const;
    bool is_zero() const;
    int max_order() const;
    MatrixOp truncated(int k) const;
    MatrixOp transpose() const;
    MatrixOp block(int r0, int c0, int nr, int nc) const;

    MatrixOp operator-() const;
    MatrixOp& operator+=(const MatrixOp& o);
    MatrixOp& operator-=(const MatrixOp& o);
    friend MatrixOp operator+(MatrixOp a, const MatrixOp& b) { return a += b; }
    friend MatrixOp operator-(MatrixOp a, const MatrixOp& b) { return a -= b; }

    bool agrees(const MatrixOp& o, int k) const;
    bool operator==(const MatrixOp& o) const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<PseudoOp> e_;
};

// parallel over entries unless serial
MatrixOp compose(const MatrixOp& p, const MatrixOp& q, int cap = -1, bool parallel = true);
MatrixOp adjoint(const MatrixOp& p, int cap = -1);
// Gaussian elimination over the truncated skewfield; result known to depth k
MatrixOp invert(const MatrixOp& m, int k);
std::vector<DiffFrac> apply(const MatrixOp& m, const std::vector<DiffFrac>& v);

// M = A B^{-1} with A, B differential, B square and non-degenerate
struct FractionPair {
    MatrixOp A, B;
};

struct FractionCheck {
    bool ok = false;
    int depth = 0;
    std::string detail;
};

FractionCheck verify_fractional(const FractionPair& pair, const MatrixOp& m, int k);

} // namespace pvad
