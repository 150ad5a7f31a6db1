#include "pvad/model.hpp"
#include "pvad/diffring.hpp"
#include "pvad/error.hpp"
#include "pvad/expr.hpp"

#include <fstream>
#include <regex>
#include <sstream>

namespace pvad {

namespace {

const std::string kSl3Min = R"(# W-algebra of sl3 at the minimal nilpotent: a compatible pair of
# local Poisson structures and the constraint phi.
[algebra]
generators = L, psip, psim, phi

[structure H0]
H[1][1] = -2*d
H[2][3] = -1

[structure H1]
H[1][1] = d*L + L*d - 1/2*d^3
H[1][2] = 1/2*d*psip + psip*d
H[1][3] = 1/2*d*psim + psim*d
H[1][4] = phi*d
H[2][3] = -1/2*(d*phi + phi*d) - 1/3*phi^2 + L - d^2
H[2][4] = -3*psip
H[3][4] = 3*psim
H[4][4] = 6*d

[constraints phi]
theta[1] = phi

# A1 + M N^{-1} on the algebra with phi passive
[fraction MN]
over = phi
offset = H1
A[1][3] = phi*d*psim^2
A[2][3] = -3*psip*psim^2
A[3][3] = 3*psim^3
B[1][1] = psip^2
B[2][1] = -1/3*(psip*d + 2*psip')*phi
B[2][2] = psim
B[3][2] = psip
B[3][3] = 2*(psim*d + 2*psim')
)";

struct Assign {
    int line;
    std::string key;
    int i = 0, j = 0;
    std::string value;
};

struct Section {
    int line;
    std::string kind, name;
    std::vector<Assign> items;
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

[[noreturn]] void at_line(int line, ErrorKind k, const std::string& msg) {
    fail(k, "line " + std::to_string(line) + ": " + msg);
}

template <class F>
auto with_line(int line, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.message().rfind("line ", 0) == 0) throw;
        at_line(line, e.kind(), e.message());
    }
}

std::vector<Section> scan(const std::string& text) {
    static const std::regex header(R"(^\[\s*([A-Za-z]+)(?:\s+([^\]\s]+))?\s*\]$)");
    static const std::regex indexed(R"(^([A-Za-z]+)\[(\d+)\](?:\[(\d+)\])?$)");
    std::vector<Section> out;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string s = trim(raw.substr(0, raw.find('#')));
        if (s.empty()) continue;
        std::smatch m;
        if (s.front() == '[' && std::regex_match(s, m, header)) {
            out.push_back({lineno, m[1], m[2], {}});
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) at_line(lineno, ErrorKind::SyntaxError, "expected 'key = value', got '" + s + "'");
        if (out.empty()) at_line(lineno, ErrorKind::SyntaxError, "assignment outside of a section");
        Assign a{lineno, trim(s.substr(0, eq)), 0, 0, trim(s.substr(eq + 1))};
        if (std::regex_match(a.key, m, indexed)) {
            a.key = m[1];
            a.i = std::stoi(m[2]);
            a.j = m[3].matched ? std::stoi(m[3]) : 0;
        }
        if (a.value.empty()) at_line(lineno, ErrorKind::SyntaxError, "empty value for '" + a.key + "'");
        out.back().items.push_back(std::move(a));
    }
    return out;
}

ScalarForm neg_adjoint(const ScalarForm& f) {
    ScalarForm r;
    r.local = -adjoint(f.local);
    for (const auto& t : f.tails) r.tails.push_back({t.right, t.left});
    return r;
}

void check_index(const Assign& a, int n, bool two) {
    if (a.i < 1 || a.i > n || (two && (a.j < 1 || a.j > n)) || (!two && a.j != 0))
        at_line(a.line, ErrorKind::IndexOutOfRange, "index out of range for '" + a.key + "'");
}

std::string coeff_text(const DiffFrac& c, const AlgebraDescriptor& alg) {
    std::string s = c.str(alg);
    bool plain = c.is_polynomial() && c.num().size() == 1;
    return plain ? s : "(" + s + ")";
}

std::string local_text(const PseudoOp& p, const AlgebraDescriptor& alg) {
    std::ostringstream os;
    bool first = true;
    for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) {
        std::string c = coeff_text(it->second, alg);
        bool neg = c.front() == '-';
        if (!first) os << (neg ? " - " : " + ");
        else if (neg) os << "-";
        first = false;
        if (neg) c.erase(0, 1);
        int k = it->first;
        if (k == 0) os << c;
        else {
            if (c != "1") os << c << "*";
            if (k == 1) os << "d";
            else if (k > 1) os << "d^" << k;
            else os << "d^" << k;
        }
    }
    return first ? "0" : os.str();
}

} // namespace

const PVAStructure& ModelFile::structure(const std::string& name) const {
    auto it = structures.find(name);
    if (it == structures.end()) fail(ErrorKind::UnknownSymbol, "no structure named " + name);
    return it->second;
}

const ConstraintSet& ModelFile::constraint(const std::string& name) const {
    auto it = constraints.find(name);
    if (it == constraints.end()) fail(ErrorKind::UnknownSymbol, "no constraint set named " + name);
    return it->second;
}

const FractionDecl& ModelFile::fraction(const std::string& name) const {
    auto it = fractions.find(name);
    if (it == fractions.end()) fail(ErrorKind::UnknownSymbol, "no fraction named " + name);
    return it->second;
}

ModelFile parse_model(const std::string& text, int depth) {
    int k = depth < 0 ? default_depth() : depth;
    auto sections = scan(text);
    ModelFile mf;

    const Section* algsec = nullptr;
    for (const auto& s : sections) {
        if (s.kind == "algebra") {
            if (algsec) at_line(s.line, ErrorKind::SyntaxError, "duplicate [algebra] section");
            algsec = &s;
        } else if (s.kind != "structure" && s.kind != "fraction" && s.kind != "constraints") {
            at_line(s.line, ErrorKind::SyntaxError, "unknown section '" + s.kind + "'");
        } else if (s.name.empty()) {
            at_line(s.line, ErrorKind::SyntaxError, "section [" + s.kind + "] needs a name");
        }
    }
    if (!algsec) fail(ErrorKind::SyntaxError, "missing [algebra] section");
    std::vector<std::string> gens, consts;
    for (const auto& a : algsec->items) {
        if (a.key == "generators") gens = split_list(a.value);
        else if (a.key == "constants") consts = split_list(a.value);
        else at_line(a.line, ErrorKind::SyntaxError, "unknown key '" + a.key + "' in [algebra]");
    }
    if (gens.empty()) at_line(algsec->line, ErrorKind::SyntaxError, "no generators declared");
    static const std::regex ident(R"(^[A-Za-z_][A-Za-z0-9_]*$)");
    for (const auto& g : gens)
        if (!std::regex_match(g, ident) || g == "d" || g == "dinv")
            at_line(algsec->line, ErrorKind::SyntaxError, "bad generator name '" + g + "'");
    mf.alg = make_algebra(gens, consts);
    const AlgebraDescriptor& alg = *mf.alg;

    for (const auto& s : sections) {
        if (s.kind != "constraints") continue;
        std::map<int, DiffPoly> th;
        for (const auto& a : s.items) {
            if (a.key != "theta") at_line(a.line, ErrorKind::SyntaxError, "unknown key '" + a.key + "' in [constraints]");
            th[a.i] = with_line(a.line, [&] { return parse_poly(a.value, alg); });
        }
        std::vector<DiffPoly> list;
        int idx = 1;
        for (auto& [i, p] : th) {
            if (i != idx++) at_line(s.line, ErrorKind::IndexOutOfRange, "theta indices must be 1..m");
            list.push_back(p);
        }
        mf.constraints[s.name] = make_constraints(s.name, list, alg);
    }

    auto algebra_over = [&](const std::string& over, int line) -> AlgebraPtr {
        if (over.empty()) return mf.alg;
        auto it = mf.constraints.find(over);
        if (it == mf.constraints.end()) at_line(line, ErrorKind::UnknownSymbol, "no constraint set named " + over);
        return with_line(line, [&] { return constrained_algebra(it->second, mf.alg); });
    };

    std::map<std::string, std::string> wants_fraction;
    for (const auto& s : sections) {
        if (s.kind != "structure") continue;
        if (mf.structures.count(s.name)) at_line(s.line, ErrorKind::SyntaxError, "duplicate structure " + s.name);
        std::string over;
        for (const auto& a : s.items)
            if (a.key == "over") over = a.value;
        AlgebraPtr salg = algebra_over(over, s.line);
        int n = salg->ngen();
        std::vector<std::vector<std::optional<ScalarForm>>> form(n, std::vector<std::optional<ScalarForm>>(n));
        std::vector<std::vector<PseudoOp>> normal(n, std::vector<PseudoOp>(n));
        std::vector<std::vector<bool>> given(n, std::vector<bool>(n, false));
        for (const auto& a : s.items) {
            if (a.key == "over") continue;
            if (a.key == "fraction") {
                wants_fraction[s.name] = a.value;
                continue;
            }
            if (a.key != "H") at_line(a.line, ErrorKind::SyntaxError, "unknown key '" + a.key + "' in [structure]");
            check_index(a, n, true);
            int i = a.i - 1, j = a.j - 1;
            if (given[i][j]) at_line(a.line, ErrorKind::SyntaxError, "entry given twice");
            auto v = with_line(a.line, [&] { return parse_operator(a.value, *salg, k); });
            given[i][j] = true;
            form[i][j] = v.form;
            normal[i][j] = v.normal;
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (given[i][j]) continue;
                if (given[j][i] && i != j) {
                    if (form[j][i]) {
                        form[i][j] = neg_adjoint(*form[j][i]);
                        normal[i][j] = normal_form(*form[i][j], k);
                    } else {
                        normal[i][j] = -adjoint(normal[j][i], k);
                    }
                } else {
                    form[i][j] = ScalarForm{};
                }
            }
        bool exact = true;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) exact = exact && form[i][j].has_value();
        PVAStructure st;
        if (exact) {
            std::vector<std::vector<ScalarForm>> entries(n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) entries[i].push_back(*form[i][j]);
            st = make_structure(s.name, salg, assemble(entries), k);
        } else {
            MatrixOp h(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) h(i, j) = normal[i][j];
            st = make_structure(s.name, salg, h);
        }
        MatrixOp chk = st.normal(k + std::max(0, st.H.max_order()) + 2);
        if (!is_skewadjoint(chk, k)) at_line(s.line, ErrorKind::NotSkewadjoint, "structure " + s.name + " is not skewadjoint");
        mf.order.push_back(s.name);
        mf.structures[s.name] = std::move(st);
    }

    for (const auto& s : sections) {
        if (s.kind != "fraction") continue;
        FractionDecl d;
        d.name = s.name;
        for (const auto& a : s.items) {
            if (a.key == "over") d.over = a.value;
            if (a.key == "offset") d.offset = a.value;
        }
        d.alg = algebra_over(d.over, s.line);
        int n = d.alg->ngen();
        MatrixOp A(n, n), B(n, n);
        for (const auto& a : s.items) {
            if (a.key == "over" || a.key == "offset") continue;
            if (a.key != "A" && a.key != "B") at_line(a.line, ErrorKind::SyntaxError, "unknown key '" + a.key + "' in [fraction]");
            check_index(a, n, true);
            auto v = with_line(a.line, [&] { return parse_operator(a.value, *d.alg, k); });
            if (!v.normal.is_differential())
                at_line(a.line, ErrorKind::SyntaxError, "fraction entries must be differential operators");
            (a.key == "A" ? A : B)(a.i - 1, a.j - 1) = v.normal;
        }
        if (!d.offset.empty()) {
            auto it = mf.structures.find(d.offset);
            if (it == mf.structures.end()) at_line(s.line, ErrorKind::UnknownSymbol, "no structure named " + d.offset);
            if (!it->second.is_local()) at_line(s.line, ErrorKind::Unsupported, "offset structure must be local");
            A += compose(it->second.H.block(0, 0, n, n), B);
        }
        d.pair = FractionPair{A, B};
        mf.fractions[s.name] = std::move(d);
    }

    for (const auto& [sname, fname] : wants_fraction) {
        auto it = mf.fractions.find(fname);
        if (it == mf.fractions.end()) fail(ErrorKind::UnknownSymbol, "no fraction named " + fname);
        auto& st = mf.structures[sname];
        if (st.size() != it->second.pair.B.rows())
            fail(ErrorKind::DimensionMismatch, "fraction " + fname + " does not fit structure " + sname);
        st.frac = it->second.pair;
    }
    return mf;
}

bool is_builtin_model(const std::string& name) { return name == "sl3min"; }

const std::string& builtin_model(const std::string& name) {
    if (!is_builtin_model(name)) fail(ErrorKind::UnknownSymbol, "no built-in model " + name);
    return kSl3Min;
}

ModelFile load_model(const std::string& source, int depth) {
    std::ifstream in(source);
    if (in) {
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_model(ss.str(), depth);
    }
    if (is_builtin_model(source)) return parse_model(builtin_model(source), depth);
    fail(ErrorKind::UnknownSymbol, "cannot read model '" + source + "'");
}

std::string emit_scalar(const ScalarForm& f, const AlgebraDescriptor& alg) {
    std::string s = f.local.is_zero() ? "" : local_text(f.local, alg);
    for (const auto& t : f.tails) {
        if (t.left.is_zero() || t.right.is_zero()) continue;
        if (!s.empty()) s += " + ";
        s += "(" + t.left.str(alg) + ")*dinv*(" + t.right.str(alg) + ")";
    }
    return s.empty() ? "0" : s;
}

std::string emit_entry(const NonlocalForm& f, int i, int j, const AlgebraDescriptor& alg) {
    ScalarForm s{f.local(i, j), {}};
    for (const auto& t : f.tails)
        if (!t.left[i].is_zero() && !t.right[j].is_zero()) s.tails.push_back({t.left[i], t.right[j]});
    return emit_scalar(s, alg);
}

namespace {
std::string header(const AlgebraDescriptor& alg, std::string& over) {
    std::ostringstream os;
    os << "[algebra]\ngenerators = ";
    for (int i = 0; i < alg.ell(); ++i) os << (i ? ", " : "") << alg.names[i];
    os << "\n";
    if (!alg.constants.empty()) {
        os << "constants = ";
        for (std::size_t i = 0; i < alg.constants.size(); ++i) os << (i ? ", " : "") << alg.constants[i];
        os << "\n";
    }
    if (alg.constraint) {
        over = "passive";
        os << "\n[constraints passive]\n";
        int first = alg.ngen();
        for (int a = 0; a < alg.constraint->m; ++a) {
            DiffPoly th = DiffPoly::jet(first + a) + alg.constraint->p[a];
            os << "theta[" << a + 1 << "] = " << th.str(alg) << "\n";
        }
    }
    return os.str();
}
} // namespace

std::string emit_model(const std::string& name, const NonlocalForm& f, const AlgebraDescriptor& alg) {
    std::string over;
    std::ostringstream os;
    os << header(alg, over) << "\n[structure " << name << "]\n";
    if (!over.empty()) os << "over = " << over << "\n";
    for (int i = 0; i < f.rows(); ++i)
        for (int j = 0; j < f.cols(); ++j) {
            std::string e = emit_entry(f, i, j, alg);
            if (e != "0") os << "H[" << i + 1 << "][" << j + 1 << "] = " << e << "\n";
        }
    return os.str();
}

std::string emit_model(const std::string& name, const MatrixOp& h, const AlgebraDescriptor& alg) {
    std::string over;
    std::ostringstream os;
    os << header(alg, over) << "\n[structure " << name << "]\n";
    if (!over.empty()) os << "over = " << over << "\n";
    for (int i = 0; i < h.rows(); ++i)
        for (int j = 0; j < h.cols(); ++j)
            if (!h(i, j).is_zero()) os << "H[" << i + 1 << "][" << j + 1 << "] = " << local_text(h(i, j), alg) << "\n";
    return os.str();
}

} // namespace pvad
