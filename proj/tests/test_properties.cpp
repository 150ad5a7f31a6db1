#include <doctest.h>

#include "properties.hpp"

#include "pvad/expr.hpp"

using namespace pvad;
using namespace pvad::props;

TEST_CASE("bracket axioms on random structures") {
    auto r = bracket_axioms(1, 100, 6);
    CHECK_MESSAGE(r.pass(), r.line());
    CHECK(r.cases == 100);
}

TEST_CASE("pseudodifferential round-trips") {
    auto r = psdo_roundtrips(2, 100, 6);
    CHECK_MESSAGE(r.pass(), r.line());
}

TEST_CASE("homotopy reconstruction inverts the variational derivative") {
    auto r = homotopy_identity(3, 100);
    CHECK_MESSAGE(r.pass(), r.line());
}

TEST_CASE("inverse bracket identity") {
    auto r = inverse_identity(4, 100, 4);
    CHECK_MESSAGE(r.pass(), r.line());
}

TEST_CASE("the suites detect broken inputs") {
    auto a = make_algebra({"u"});
    // not skewadjoint: the master bracket of ∂² is symmetric
    MatrixOp m(1, 1);
    m(0, 0) = parse_operator("d^2 + u", *a, 8).normal;
    auto s = make_structure("S", a, m);
    DiffFrac f = parse_function("u", *a), g = parse_function("u'^2", *a);
    CHECK_FALSE(master_bracket(s, g, f, 8).agrees(-reflect(master_bracket(s, f, g, 8), 8), 6));

    // a wrong inverse breaks the round-trip check
    PseudoOp p = parse_operator("u + d", *a, 8).normal;
    PseudoOp wrong = invert(p, 8) + PseudoOp::term(DiffFrac(1), -5);
    CHECK_FALSE(compose(p, wrong, 8).agrees(PseudoOp(DiffFrac(1)), 6));
}
