#include "pvad/expr.hpp"
#include "pvad/error.hpp"

#include <cctype>

namespace pvad {

namespace {

struct Value {
    bool is_op = false;
    DiffFrac f;
    std::optional<ScalarForm> form; // exact form when is_op
    PseudoOp normal;                // normal form when is_op
};

class Parser {
public:
    Parser(const std::string& s, const AlgebraDescriptor& alg, int depth) : s_(s), alg_(alg), depth_(depth) {}

    Value run() {
        Value v = expr();
        skip();
        if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
        return v;
    }

private:
    const std::string& s_;
    const AlgebraDescriptor& alg_;
    int depth_;
    std::size_t pos_ = 0;

    [[noreturn]] void error(const std::string& m) const {
        fail(ErrorKind::SyntaxError, m + " at column " + std::to_string(pos_ + 1) + " in '" + s_ + "'");
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool eat(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }
    long integer() {
        skip();
        std::size_t st = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (st == pos_) error("expected integer");
        return std::stol(s_.substr(st, pos_ - st));
    }

    Value op_of(const Value& v) {
        if (v.is_op) return v;
        Value r;
        r.is_op = true;
        r.form = ScalarForm{PseudoOp(v.f), {}};
        r.normal = PseudoOp(v.f);
        return r;
    }

    Value add(const Value& a, const Value& b, int sign) {
        if (!a.is_op && !b.is_op) {
            Value r;
            r.f = sign > 0 ? a.f + b.f : a.f - b.f;
            return r;
        }
        Value x = op_of(a), y = op_of(b);
        Value r;
        r.is_op = true;
        r.normal = sign > 0 ? x.normal + y.normal : x.normal - y.normal;
        if (x.form && y.form) {
            ScalarForm f = *x.form;
            f.local = sign > 0 ? f.local + y.form->local : f.local - y.form->local;
            for (auto t : y.form->tails) {
                if (sign < 0) t.left = -t.left;
                f.tails.push_back(t);
            }
            r.form = f;
        }
        return r;
    }

    static ScalarForm form_compose(const ScalarForm& a, const ScalarForm& b, bool& ok) {
        ScalarForm out;
        out.local = compose(a.local, b.local);
        for (const auto& t : b.tails) {
            ScalarForm s = compose_local_tail(a.local, t);
            out.local += s.local;
            out.tails.insert(out.tails.end(), s.tails.begin(), s.tails.end());
        }
        for (const auto& t : a.tails) {
            ScalarForm s = compose_tail_local(t, b.local);
            out.local += s.local;
            out.tails.insert(out.tails.end(), s.tails.begin(), s.tails.end());
        }
        if (!a.tails.empty() && !b.tails.empty()) ok = false;
        return out;
    }

    Value mul(const Value& a, const Value& b) {
        if (!a.is_op && !b.is_op) {
            Value r;
            r.f = a.f * b.f;
            return r;
        }
        Value x = op_of(a), y = op_of(b);
        Value r;
        r.is_op = true;
        r.normal = compose(x.normal, y.normal, depth_);
        if (x.form && y.form) {
            bool ok = true;
            ScalarForm f = form_compose(*x.form, *y.form, ok);
            if (ok) r.form = f;
        }
        return r;
    }

    Value expr() {
        Value v = term();
        for (;;) {
            if (eat('+')) v = add(v, term(), 1);
            else if (eat('-')) v = add(v, term(), -1);
            else return v;
        }
    }

    Value term() {
        Value v = unary();
        for (;;) {
            if (eat('*')) v = mul(v, unary());
            else if (eat('/')) {
                Value d = unary();
                if (d.is_op) error("division by an operator");
                if (d.f.is_zero()) error("division by zero");
                Value inv;
                inv.f = d.f.inverse();
                v = mul(v, inv);
            } else return v;
        }
    }

    Value unary() {
        if (eat('-')) {
            Value v = unary();
            Value z;
            return add(z, v, -1);
        }
        if (eat('+')) return unary();
        return power();
    }

    Value power() {
        Value v = postfix();
        if (!eat('^')) return v;
        bool neg = eat('-');
        long e = integer();
        if (neg) e = -e;
        if (!v.is_op) {
            if (e < 0) {
                if (v.f.is_zero()) error("negative power of zero");
                DiffFrac b = v.f.inverse(), r(1);
                for (long i = 0; i < -e; ++i) r = r * b;
                v.f = r;
            } else {
                DiffFrac r(1);
                for (long i = 0; i < e; ++i) r = r * v.f;
                v.f = r;
            }
            return v;
        }
        if (e < 0) {
            // only ∂^{-k} is meaningful here
            if (!(v.form && v.form->tails.empty() && v.normal.coeffs().size() == 1 && v.normal.coeff(1) == DiffFrac(1)))
                error("negative power of an operator other than d");
            e = -e;
            Value r;
            r.is_op = true;
            r.normal = PseudoOp::d(static_cast<int>(-e));
            if (e == 1) r.form = ScalarForm{PseudoOp(), {{DiffFrac(1), DiffFrac(1)}}};
            return r;
        }
        Value r;
        r.f = DiffFrac(1);
        for (long i = 0; i < e; ++i) r = mul(r, v);
        return r;
    }

    Value postfix() {
        Value v = primary();
        for (;;) {
            if (pos_ < s_.size() && s_[pos_] == '\'') {
                ++pos_;
                if (v.is_op) error("prime applied to an operator");
                v.f = v.f.derivative();
                continue;
            }
            std::size_t save = pos_;
            skip();
            if (pos_ + 1 < s_.size() && s_[pos_] == '^' && s_[pos_ + 1] == '(') {
                pos_ += 2;
                long n = integer();
                if (!eat(')')) error("expected ')'");
                if (v.is_op) error("derivative applied to an operator");
                v.f = v.f.derivative(static_cast<unsigned>(n));
                continue;
            }
            pos_ = save;
            return v;
        }
    }

    Value primary() {
        skip();
        if (pos_ >= s_.size()) error("unexpected end");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Value v = expr();
            if (!eat(')')) error("expected ')'");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t st = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            Value v;
            v.f = DiffFrac(Rational(Integer(s_.substr(st, pos_ - st))));
            return v;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t st = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string id = s_.substr(st, pos_ - st);
            Value v;
            if (id == "d") {
                v.is_op = true;
                v.normal = PseudoOp::d(1);
                v.form = ScalarForm{PseudoOp::d(1), {}};
                return v;
            }
            if (id == "dinv") {
                v.is_op = true;
                v.normal = PseudoOp::d(-1);
                v.form = ScalarForm{PseudoOp(), {{DiffFrac(1), DiffFrac(1)}}};
                return v;
            }
            int g = alg_.find_name(id);
            if (g >= 0) {
                v.f = DiffFrac(DiffPoly::jet(g, 0));
                return v;
            }
            int k = alg_.find_constant(id);
            if (k >= 0) {
                v.f = DiffFrac(DiffPoly::symbol(k));
                return v;
            }
            pos_ = st;
            fail(ErrorKind::UnknownSymbol, "'" + id + "' at column " + std::to_string(st + 1) + " in '" + s_ + "'");
        }
        error("unexpected '" + std::string(1, c) + "'");
    }
};

} // namespace

DiffFrac parse_function(const std::string& text, const AlgebraDescriptor& alg) {
    Value v = Parser(text, alg, default_depth()).run();
    if (v.is_op) fail(ErrorKind::SyntaxError, "expected a function, got an operator: '" + text + "'");
    return v.f;
}

DiffPoly parse_poly(const std::string& text, const AlgebraDescriptor& alg) {
    DiffFrac f = parse_function(text, alg);
    if (!f.is_polynomial()) fail(ErrorKind::NonPolynomialInput, "'" + text + "' is not a polynomial");
    return f.num();
}

OperatorValue parse_operator(const std::string& text, const AlgebraDescriptor& alg, int depth) {
    if (depth < 0) depth = default_depth();
    Value v = Parser(text, alg, depth).run();
    OperatorValue out;
    if (!v.is_op) {
        out.normal = PseudoOp(v.f);
        out.form = ScalarForm{out.normal, {}};
        return out;
    }
    out.normal = v.normal;
    out.form = v.form;
    if (out.form) out.normal = normal_form(*out.form, depth);
    return out;
}

} // namespace pvad
