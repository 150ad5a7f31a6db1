#include <doctest.h>

#include "pvad/diffring.hpp"
#include "pvad/error.hpp"
#include "pvad/expr.hpp"
#include "pvad/model.hpp"

using namespace pvad;

namespace {
ErrorKind kind_of(const std::string& text) {
    try {
        parse_model(text, 6);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::Unsupported;
}

std::string message_of(const std::string& text) {
    try {
        parse_model(text, 6);
    } catch (const Error& e) {
        return e.message();
    }
    return "";
}

PseudoOp op(const std::string& s, const AlgebraDescriptor& a, int k = 10) { return parse_operator(s, a, k).normal; }

struct Sl3 {
    ModelFile mf = load_model("sl3min", 8);
    const PVAStructure& h0 = mf.structure("H0");
    const PVAStructure& h1 = mf.structure("H1");
    const ConstraintSet& phi = mf.constraint("phi");
};
} // namespace

TEST_CASE("model file parsing") {
    Sl3 s;
    CHECK(s.mf.order == std::vector<std::string>{"H0", "H1"});
    CHECK(s.h1.is_local());
    CHECK(s.h1.size() == 4);
    const auto& a = *s.h1.alg;
    // the lower triangle is filled in by skewadjointness
    CHECK(s.h1.H(1, 0) == op("d*psip + 1/2*psip*d", a));
    CHECK(s.h1.H(3, 2) == op("-3*psim", a));
    CHECK(s.h0.H(2, 1) == op("1", a));
    CHECK(s.phi.special());
    CHECK(s.mf.fraction("MN").alg->ngen() == 3);

    std::string alg = "[algebra]\ngenerators = u\n";
    CHECK(kind_of(alg + "[structure X]\nH[1][1] = d^2\n") == ErrorKind::NotSkewadjoint);
    CHECK(kind_of(alg + "[structure X]\nH[1][2] = d\n") == ErrorKind::IndexOutOfRange);
    CHECK(kind_of(alg + "[structure X]\nH[1][1] = v*d\n") == ErrorKind::UnknownSymbol);
    CHECK(kind_of(alg + "[structure X]\nH[1][1] = (d\n") == ErrorKind::SyntaxError);
    CHECK(kind_of(alg + "[bogus X]\n") == ErrorKind::SyntaxError);
    CHECK(kind_of("[structure X]\nH[1][1] = d\n") == ErrorKind::SyntaxError);
    CHECK(message_of(alg + "\n# comment\n[structure X]\nH[1][1] = d*w\n").rfind("line 6: ", 0) == 0);
    CHECK(kind_of(alg + "[structure X]\nH[1][1] = d\n[fraction F]\noffset = Y\nB[1][1] = 1\n") ==
          ErrorKind::UnknownSymbol);

    auto nl = parse_model(alg + "[structure X]\nH[1][1] = u'*dinv*u'  # nonlocal\n", 6);
    CHECK_FALSE(nl.structure("X").is_local());
}

TEST_CASE("constraint matrix and degenerate modification") {
    Sl3 s;
    const auto& a = *s.h1.alg;
    CHECK(constraint_matrix(s.h1, s.phi)(0, 0) == op("6*d", a));
    CHECK(constraint_matrix(s.h0, s.phi).is_zero());
    CHECK_THROWS_AS(dirac_modify(s.h0, s.phi), Error);
    try {
        dirac_modify(s.h0, s.phi);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotInvertible);
    }
    auto notspecial = make_constraints("q", {parse_poly("phi*L", a)}, a);
    CHECK_FALSE(notspecial.special());
    CHECK_THROWS_AS(dirac_reduce(s.h1, notspecial), Error);
}

TEST_CASE("sl3 reduction") {
    Sl3 s;
    auto r = dirac_reduce(s.h1, s.phi, 6);
    for (const auto& c : r.checks) CHECK_MESSAGE(c.pass, c.text);
    CHECK(r.checks.size() == 4);
    REQUIRE(r.HD_form);
    REQUIRE(r.tilde_form);
    const auto& q = *r.quotient_alg;
    CHECK(q.ell() == 3);
    const char* expect[3][3] = {
        {"d*L + L*d - 1/2*d^3", "1/2*d*psip + psip*d", "1/2*d*psim + psim*d"},
        {"d*psip + 1/2*psip*d", "3/2*psip*dinv*psip", "L - d^2 - 3/2*psip*dinv*psim"},
        {"d*psim + 1/2*psim*d", "-L + d^2 - 3/2*psim*dinv*psip", "3/2*psim*dinv*psim"}};
    MatrixOp hd = r.HD_form->normal(10);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK_MESSAGE(hd(i, j).agrees(op(expect[i][j], q), 10), expect[i][j]);
    CHECK(r.H_D->agrees(hd, 6));

    // A^D = A1 + M N^{-1}, and the projection represents the reduced structure
    const auto& mn = s.mf.fraction("MN");
    CHECK(verify_fractional(mn.pair, *r.A_D, 6).ok);
    FractionPair bar{quotient_project(mn.pair.A, *r.tilde_alg), quotient_project(mn.pair.B, *r.tilde_alg)};
    CHECK(verify_fractional(bar, *r.H_D, 6).ok);
    FractionPair wrong{bar.A, bar.B};
    wrong.A(0, 0) += op("d", q);
    CHECK_FALSE(verify_fractional(wrong, *r.H_D, 6).ok);
}

TEST_CASE("dirac bracket agrees with the modified matrix") {
    Sl3 s;
    auto r = dirac_modify(s.h1, s.phi, 6);
    auto t = tilde_structure(r, s.h1, 6);
    const auto& a = *s.h1.alg;
    std::vector<std::pair<std::string, std::string>> pairs = {
        {"L", "L"}, {"psip", "psim"}, {"phi", "L"}, {"L*psip", "psim'"}, {"phi^2", "psip"}};
    for (const auto& [f, g] : pairs) {
        auto x = dirac_bracket(s.h1, s.phi, parse_function(f, a), parse_function(g, a), 6);
        auto y = master_bracket(t, parse_function(f, a), parse_function(g, a), 6);
        CHECK_MESSAGE(x.agrees(y, 6), f, " ", g);
    }
    // φ is central for the modified bracket
    CHECK(dirac_bracket(s.h1, s.phi, parse_function("phi", a), parse_function("L*psim", a), 6).is_zero());
}

TEST_CASE("central reduction") {
    Sl3 s;
    MatrixOp c = central_reduce(s.h0, s.phi);
    auto talg = constrained_algebra(s.phi, s.h0.alg);
    auto q = quotient_algebra(talg);
    CHECK(c.rows() == 3);
    CHECK(c(0, 0) == op("-2*d", *q));
    CHECK(c(1, 2) == op("-1", *q));
    CHECK(c(2, 1) == op("1", *q));
    CHECK(central_reduce_form(s.h0, s.phi).has_value());
    CHECK_THROWS_AS(central_reduce(s.h1, s.phi), Error);
    try {
        central_reduce(s.h1, s.phi);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotCentral);
    }
}

TEST_CASE("reduced structures are Poisson and compatible") {
    Sl3 s;
    auto r = dirac_reduce(s.h1, s.phi, 6);
    auto h1d = reduced_structure(r, "H1D", 6);
    auto h0c = make_structure("H0c", r.quotient_alg, *central_reduce_form(s.h0, s.phi), 6);
    auto j0 = check_jacobi(h0c, 4, 4);
    auto j1 = check_jacobi(h1d, 4, 4);
    CHECK(j0.pass);
    CHECK(j1.pass);
    CHECK(j1.triples.size() == 27);
    CHECK(check_compatibility(h0c, h1d, 4, 4).pass);
}

TEST_CASE("emitted models load back") {
    Sl3 s;
    auto r = dirac_reduce(s.h1, s.phi, 6);
    std::string text = emit_model("H1D", *r.HD_form, *r.quotient_alg);
    auto back = parse_model(text, 8);
    const auto& st = back.structure("H1D");
    CHECK(st.H.agrees(r.HD_form->normal(8), 8));

    auto ad = AD_structure(r, "AD", 6);
    auto back2 = parse_model(emit_model("AD", *r.AD_form, *r.tilde_alg), 8);
    CHECK(back2.structure("AD").alg->constraint.has_value());
    CHECK(back2.structure("AD").H.agrees(ad.normal(8), 8));

    auto back3 = parse_model(emit_model("H1", s.h1.H, *s.h1.alg), 8);
    CHECK(back3.structure("H1").H == s.h1.H);
}
