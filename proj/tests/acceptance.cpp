// Acceptance run: one PASS/FAIL line per criterion, exit 0 iff all pass.

#include "properties.hpp"

#include "pvad/diffring.hpp"
#include "pvad/dirac.hpp"
#include "pvad/error.hpp"
#include "pvad/expr.hpp"
#include "pvad/hierarchy.hpp"
#include "pvad/model.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

using namespace pvad;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string secs(double s) {
    std::ostringstream os;
    os.precision(2);
    os << std::fixed << s << "s";
    return os.str();
}

// shared sl3 data, built once
struct Sl3 {
    ModelFile mf = load_model("sl3min", 8);
    const PVAStructure& h0 = mf.structure("H0");
    const PVAStructure& h1 = mf.structure("H1");
    const ConstraintSet& phi = mf.constraint("phi");
    const AlgebraDescriptor& a = *h1.alg;
    DiracResult d = dirac_reduce(h1, phi, 8);
    const AlgebraDescriptor& q = *d.quotient_alg;
    PVAStructure h0c = make_structure("H0C", d.quotient_alg, *central_reduce_form(h0, phi), 8);
    PVAStructure h1d = reduced_structure(d, "H1D", 8);
    FractionPair mn = mf.fraction("MN").pair;
    FractionPair bar{quotient_project(mn.A, *d.tilde_alg), quotient_project(mn.B, *d.tilde_alg)};
};

bool same_vec(const FracVec& v, const std::vector<std::string>& expect, const AlgebraDescriptor& a) {
    if (v.size() != expect.size()) return false;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != DiffFrac(parse_poly(expect[i], a))) return false;
    return true;
}

Verdict c1(const Sl3& s) {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::ostringstream os;
    for (const auto* h : {&s.h0, &s.h1}) {
        bool skew = is_skewadjoint(h->H, kExact) && h->H.is_differential();
        auto j = check_jacobi(*h, 6, 6);
        int passed = 0;
        for (const auto& t : j.triples) passed += t.pass;
        ok = ok && skew && j.pass && j.triples.size() == 64;
        os << h->name << " skewadjoint=" << skew << " jacobi " << passed << "/" << j.triples.size() << "; ";
    }
    bool compat = check_compatibility(s.h0, s.h1, 6, 6).pass;
    double t = seconds_since(t0);
    ok = ok && compat && t < 60;
    os << "compatible=" << compat << "; " << secs(t);
    return {ok, os.str()};
}

Verdict c2(const Sl3& s) {
    bool six = constraint_matrix(s.h1, s.phi, 8)(0, 0) == PseudoOp::term(DiffFrac(6), 1);
    bool zero = constraint_matrix(s.h0, s.phi, 8).is_zero();
    bool degenerate = false;
    try {
        dirac_modify(s.h0, s.phi, 8);
    } catch (const Error& e) {
        degenerate = e.kind() == ErrorKind::NotInvertible;
    }
    return {six && zero && degenerate, "C(H1)=6d " + std::to_string(six) + ", C(H0)=0 " + std::to_string(zero) +
                                           ", NotInvertible " + std::to_string(degenerate)};
}

Verdict c3(const Sl3& s) {
    // D ∘ H̃ and H̃ ∘ D* entrywise at depth 8
    const MatrixOp& D = s.phi.D;
    MatrixOp ht = s.d.tilde_form->normal(12);
    MatrixOp left = compose(D, ht, 12), right = compose(ht, adjoint(D, 12), 12);
    bool l = left.agrees(MatrixOp(left.rows(), left.cols()), 8);
    bool r = right.agrees(MatrixOp(right.rows(), right.cols()), 8);
    bool lib = s.d.checks_pass();
    return {l && r && lib, "D*Htilde=0 " + std::to_string(l) + ", Htilde*D^*=0 " + std::to_string(r) +
                               ", library checks " + std::to_string(lib)};
}

Verdict c4(const Sl3& s) {
    const auto& q = s.q;
    auto op = [&](const std::string& e) { return parse_operator(e, q, 12).normal; };
    const char* h0c[3][3] = {{"-2*d", "0", "0"}, {"0", "0", "-1"}, {"0", "1", "0"}};
    bool exact = true;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) exact = exact && s.h0c.H(i, j) == op(h0c[i][j]);
    const char* h1d[3][3] = {{"d*L + L*d - 1/2*d^3", "1/2*d*psip + psip*d", "1/2*d*psim + psim*d"},
                             {"d*psip + 1/2*psip*d", "3/2*psip*dinv*psip", "L - d^2 - 3/2*psip*dinv*psim"},
                             {"d*psim + 1/2*psim*d", "-L + d^2 - 3/2*psim*dinv*psip", "3/2*psim*dinv*psim"}};
    MatrixOp hd = s.d.HD_form->normal(12);
    int agree = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) agree += hd(i, j).agrees(op(h1d[i][j]), 8);
    return {exact && agree == 9, "H0C exact " + std::to_string(exact) + ", H1D entries " + std::to_string(agree) +
                                     "/9 at depth 8"};
}

Verdict c5(const Sl3& s) {
    bool a = verify_fractional(s.mn, *s.d.A_D, 8).ok;
    bool b = verify_fractional(s.bar, *s.d.H_D, 8).ok;
    bool nondeg = false;
    try {
        MatrixOp inv = invert(s.bar.B, 12);
        nondeg = compose(s.bar.B, inv, 12).agrees(MatrixOp::identity(3), 8);
    } catch (const Error&) {
    }
    return {a && b && nondeg, "(M,N) " + std::to_string(a) + ", (Mbar,Nbar) " + std::to_string(b) +
                                  ", Nbar invertible " + std::to_string(nondeg)};
}

Verdict c6(const Sl3& s) {
    auto t0 = std::chrono::steady_clock::now();
    auto j0 = check_jacobi(s.h0c, 6, 6), j1 = check_jacobi(s.h1d, 6, 6);
    auto cp = check_compatibility(s.h0c, s.h1d, 6, 6);
    double t = seconds_since(t0);
    bool ok = j0.pass && j1.pass && cp.pass && j0.triples.size() == 27 && j1.triples.size() == 27 &&
              cp.sum.triples.size() == 27 && t < 300;
    std::ostringstream os;
    os << "H0C " << j0.pass << ", H1D " << j1.pass << ", H0C+H1D " << cp.pass << " on 27 triples; " << secs(t);
    return {ok, os.str()};
}

Verdict c7(const Sl3& s) {
    const auto& a = s.a;
    auto st = run_hierarchy(s.h0, s.h1, parse_poly("L - 1/12*phi^2", a), 2);
    bool p0 = same_vec(st.steps[0].P, {"L' - 1/6*phi*phi'", "psip' + 1/2*phi*psip", "psim' - 1/2*phi*psim", "0"}, a);
    // t_1 flow with Lt = L - φ²/12 substituted by hand
    std::string Lt = "(L - 1/12*phi^2)", dLt = "(L' - 1/6*phi*phi')", d3Lt = "(L''' - 1/2*phi'*phi'' - 1/6*phi*phi''')";
    std::string pL = "1/4*" + d3Lt + " - 3/2*" + Lt + "*" + dLt + " + 3/2*(psip*psim'' - psim*psip'')" +
                     " - 3/2*(phi*psip*psim)'";
    auto psi = [&](const std::string& p, int e) {
        std::string s1 = e > 0 ? " + " : " - ", s2 = e > 0 ? " - " : " + ";
        return p + "'''" + s1 + "3/2*phi*" + p + "''" + s1 + "1/2*" + p + "*phi''" + s1 + "3/2*phi'*" + p + "'" +
               " - 3/2*" + Lt + "*" + p + "' - 3/4*" + p + "*" + dLt + s2 + "3/4*phi*" + p + "*" + Lt +
               " + 3/4*phi^2*" + p + "' + 3/4*" + p + "*phi*phi'" + s1 + "3/2*" + p + "*psip*psim" + s1 +
               "1/8*phi^3*" + p;
    };
    bool p1 = same_vec(st.steps[1].P, {pL, psi("psip", 1), psi("psim", -1), "0"}, a);
    DiffPoly g1 = parse_poly("1/2*(psip*psim' - psim*psip' - phi*psip*psim) - 1/4*(L - 1/12*phi^2)^2", a);
    bool g = equal_mod_derivatives(st.densities[1], g1, 4);
    auto h1f = s.h1d;
    h1f.frac = s.bar;
    auto rs = run_hierarchy(s.h0c, h1f, parse_poly("L", s.q), 2);
    bool red = same_vec(rs.steps[1].P,
                        {"1/4*L''' - 3/2*L*L' + 3/2*(psip*psim'' - psim*psip'')",
                         "psip''' - 3/2*L*psip' - 3/4*psip*L' + 3/2*psip^2*psim",
                         "psim''' - 3/2*L*psim' - 3/4*psim*L' - 3/2*psip*psim^2"},
                        s.q);
    bool ok = p0 && p1 && g && red && st.pass() && rs.pass();
    return {ok, "P0 " + std::to_string(p0) + ", P1 " + std::to_string(p1) + ", g1 " + std::to_string(g) +
                    ", reduced t1 flow " + std::to_string(red)};
}

// indexing: P_n = H1 δg_n = H0 δg_{n+1} (g_0 = L - φ²/12 spans the kernel of H0)
Verdict c8(const Sl3& s) {
    const auto& a = s.a;
    auto st = run_hierarchy(s.h0, s.h1, parse_poly("L - 1/12*phi^2", a), 2);
    int ok = 0, total = 0;
    std::ostringstream os;
    auto assoc = [&](const std::string& label, const PVAStructure& h, const DiffPoly& g, const FracVec& P) {
        ++total;
        try {
            auto as = check_associated(h, g, P);
            ok += !as.F.empty();
        } catch (const Error& e) {
            os << label << ": " << e.what() << "; ";
        }
    };
    for (int n = 0; n < 2; ++n) {
        assoc("H1", s.h1, st.densities[n], st.steps[n].P);
        assoc("H0", s.h0, st.densities[n + 1], st.steps[n].P);
        auto ad = AD_structure(s.d, "A1D", 8);
        ad.frac = s.mn;
        FracVec p1(st.steps[n].P.begin(), st.steps[n].P.begin() + 3);
        assoc("A1D", ad, st.densities[n], p1);
    }
    auto h1f = s.h1d;
    h1f.frac = s.bar;
    auto rs = run_hierarchy(s.h0c, h1f, parse_poly("L", s.q), 2);
    for (int n = 0; n < 2; ++n) {
        assoc("H1D", h1f, rs.densities[n], rs.steps[n].P);
        assoc("H0C", s.h0c, rs.densities[n + 1], rs.steps[n].P);
    }
    os << ok << "/" << total << " relations with witnesses";
    return {ok == total, os.str()};
}

Verdict c9(const Sl3& s) {
    auto h1f = s.h1d;
    h1f.frac = s.bar;
    auto rs = run_hierarchy(s.h0c, h1f, parse_poly("L", s.q), 3);
    bool orders = true, mags = true;
    std::ostringstream os;
    for (int n = 0; n < 3; ++n)
        for (int i = 0; i < 3; ++i) {
            auto ls = leading_symbol(rs.steps[n].P, i);
            orders = orders && ls.order == 2 * n + 1;
            Rational expect = i == 0 ? Rational(1, 1 << (2 * n)) : Rational(1);
            mags = mags && abs(ls.coeff) == expect;
            if (i == 0) os << "n=" << n << " L-coeff " << to_string(ls.coeff) << "; ";
        }
    os << "orders 2n+1 " << orders;
    return {orders && mags, os.str()};
}

Verdict c10(unsigned seed) {
    std::vector<props::SuiteResult> rs = {props::bracket_axioms(seed + 1, 100, 6), props::psdo_roundtrips(seed + 2, 100, 6),
                                          props::homotopy_identity(seed + 3, 100),
                                          props::inverse_identity(seed + 4, 100, 4)};
    bool ok = true;
    std::ostringstream os;
    for (const auto& r : rs) {
        ok = ok && r.pass() && r.cases >= 100;
        os << r.line() << "; ";
    }
    return {ok, os.str()};
}

} // namespace

int main() {
    int failures = 0;
    std::unique_ptr<Sl3> s;
    auto report = [&](int n, const std::function<Verdict()>& fn) {
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += !v.pass;
        std::cout << "CRITERION " << n << ": " << (v.pass ? "PASS" : "FAIL") << " (" << v.detail << ")" << std::endl;
    };
    try {
        s = std::make_unique<Sl3>();
    } catch (const std::exception& e) {
        std::cout << "setup failed: " << e.what() << std::endl;
        return 1;
    }
    report(1, [&] { return c1(*s); });
    report(2, [&] { return c2(*s); });
    report(3, [&] { return c3(*s); });
    report(4, [&] { return c4(*s); });
    report(5, [&] { return c5(*s); });
    report(6, [&] { return c6(*s); });
    report(7, [&] { return c7(*s); });
    report(8, [&] { return c8(*s); });
    report(9, [&] { return c9(*s); });
    report(10, [&] { return c10(0); });
    std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAIL") << std::endl;
    return failures == 0 ? 0 : 1;
}
