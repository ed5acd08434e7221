// Unit tests for shared types: unit conversions, the Im >= 0 square root,
// 2x2 matrix primitives in both precisions, and graph validation.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "qg/core.hpp"

using namespace qg;

TEST_CASE("unit conversions round-trip through hbar2_over_2m") {
    CHECK(k_to_ev(1.0) == doctest::Approx(0.0380998).epsilon(1e-15));
    CHECK(ev_to_k(0.0380998).k == doctest::Approx(1.0).epsilon(1e-15));
    for (double k : {0.3, 1.0, 2.7, 9.4}) {
        CHECK(ev_to_k(k_to_ev(k)).k == doctest::Approx(k).epsilon(1e-14));
    }
    CHECK(k_to_ev(2.0) == doctest::Approx(4.0 * 0.0380998).epsilon(1e-15));
    CHECK_THROWS_AS(ev_to_k(0.0), NegativeEnergy);
    CHECK_THROWS_AS(ev_to_k(-0.1), NegativeEnergy);
}

TEST_CASE("sqrt_im_pos picks the Im >= 0 branch") {
    CHECK(sqrt_im_pos(cplx(4.0, 0.0)) == cplx(2.0, 0.0));
    const cplx neg = sqrt_im_pos(cplx(-4.0, 0.0));
    CHECK(neg.real() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(neg.imag() == doctest::Approx(2.0).epsilon(1e-15));
    // below-axis arguments still land on Im >= 0
    for (cplx z : {cplx(0.0, -2.0), cplx(-1.0, -1e-12), cplx(3.0, -4.0)}) {
        const cplx s = sqrt_im_pos(z);
        CHECK(s.imag() >= 0.0);
        CHECK(std::abs(s * s - z) < 1e-14 * std::abs(z));
    }
    // long double overload agrees with the double one
    const cplxl sl = sqrt_im_pos(cplxl(-9.0L, 0.0L));
    CHECK(static_cast<double>(sl.imag()) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(sqrt_im_pos(cplxl(2.0L, 3.0L)).imag() >= 0.0L);
}

TEST_CASE("mat2 algebra") {
    const ComplexMat2 a{cplx(1, 1), cplx(0, 2), cplx(3, 0), cplx(1, -1)};
    const ComplexMat2 b{cplx(2, 0), cplx(0, 1), cplx(1, 0), cplx(0, 0)};
    const ComplexMat2 ab = mat2_mul(a, b);
    CHECK(ab.m11 == cplx(2, 4));  // (1+i)*2 + 2i*1
    CHECK(ab.m12 == cplx(-1, 1));
    CHECK(ab.m21 == cplx(7, -1));
    CHECK(ab.m22 == cplx(0, 3));
    CHECK(std::abs(mat2_det(a) - (a.m11 * a.m22 - a.m12 * a.m21)) == 0.0);

    const ComplexMat2 inv = mat2_inv(a);
    const ComplexMat2 id = mat2_mul(a, inv);
    CHECK(std::abs(id.m11 - 1.0) < 1e-15);
    CHECK(std::abs(id.m12) < 1e-15);
    CHECK(std::abs(id.m21) < 1e-15);
    CHECK(std::abs(id.m22 - 1.0) < 1e-15);

    CHECK_THROWS_AS(mat2_inv(ComplexMat2{}), SingularMatrix);
    CHECK(mat2_finite(a));
    ComplexMat2 bad = a;
    bad.m21 = cplx(std::numeric_limits<double>::infinity(), 0.0);
    CHECK(!mat2_finite(bad));

    const ComplexMat2 e = mat2_identity();
    CHECK(e.m11 == cplx(1, 0));
    CHECK(e.m12 == cplx(0, 0));
}

TEST_CASE("lmat2 mirrors mat2 and narrows losslessly for doubles") {
    const ComplexMat2 a{cplx(0.3, -1.2), cplx(2.0, 0.5), cplx(-0.7, 0.1),
                        cplx(1.1, 1.9)};
    const LongMat2 al = lmat2_widen(a);
    const ComplexMat2 back = lmat2_narrow(al);
    CHECK(back.m11 == a.m11);
    CHECK(back.m22 == a.m22);

    const LongMat2 prod = lmat2_mul(al, al);
    const ComplexMat2 prod_d = mat2_mul(a, a);
    CHECK(std::abs(lmat2_narrow(prod).m11 - prod_d.m11) < 1e-15);
    CHECK(std::abs(lmat2_narrow(prod).m21 - prod_d.m21) < 1e-15);

    CHECK(std::abs(static_cast<cplx>(lmat2_det(al)) - mat2_det(a)) < 1e-15);
    const LongMat2 inv = lmat2_inv(al);
    const LongMat2 id = lmat2_mul(al, inv);
    CHECK(std::abs(id.m11 - cplxl(1.0L)) < 1e-18L);
    CHECK(std::abs(id.m12) < 1e-18L);
    CHECK_THROWS_AS(lmat2_inv(LongMat2{}), SingularMatrix);

    const LongMat2 e = lmat2_identity();
    CHECK(e.m11 == cplxl(1.0L));
    CHECK(e.m21 == cplxl(0.0L));
}

TEST_CASE("make_result fills the probabilities") {
    const auto res = make_result(cplx(0.0, 0.8), cplx(-0.6, 0.0));
    CHECK(res.T == doctest::Approx(0.64).epsilon(1e-15));
    CHECK(res.R == doctest::Approx(0.36).epsilon(1e-15));
}

TEST_CASE("validate_graph accepts the standard configurations") {
    TwoTerminalGraph ring;
    ring.edges = {EdgeSpec{1.0}, EdgeSpec{2.1}};
    CHECK_NOTHROW(validate_graph(ring));

    TwoTerminalGraph flux;
    flux.edges = {EdgeSpec{1.0, Free{}, +1}, EdgeSpec{2.1, Free{}, -1}};
    flux.flux_alpha = 3.0;
    CHECK_NOTHROW(validate_graph(flux));

    TwoTerminalGraph wells;
    for (int i = 0; i < 20; ++i)
        wells.edges.push_back(EdgeSpec{1.0, SquareWell{-0.5, 1.0}, 0});
    CHECK_NOTHROW(validate_graph(wells));

    TwoTerminalGraph tab;
    tab.edges = {EdgeSpec{1.0, Tabulated{{0.2, 0.5, 0.8}, {0.1, 0.3, 0.1}}, 0}};
    CHECK_NOTHROW(validate_graph(tab));

    TwoTerminalGraph comp;
    comp.edges = {EdgeSpec{2.0, CompositeRing{cplx(0.0, 0.8), cplx(-0.6, 0.0)}, 0}};
    CHECK_NOTHROW(validate_graph(comp));
}

TEST_CASE("validate_graph rejects malformed graphs") {
    TwoTerminalGraph g;
    CHECK_THROWS_AS(validate_graph(g), ConfigError);  // empty

    g.edges = {EdgeSpec{0.0}};
    CHECK_THROWS_AS(validate_graph(g), ConfigError);  // zero length
    g.edges = {EdgeSpec{-1.0}};
    CHECK_THROWS_AS(validate_graph(g), ConfigError);

    g.edges = {EdgeSpec{1.0, Free{}, +1}};  // ab_sign without flux
    CHECK_THROWS_AS(validate_graph(g), ConfigError);

    g.edges = {EdgeSpec{1.0, Free{}, 2}};
    g.flux_alpha = 1.0;
    CHECK_THROWS_AS(validate_graph(g), ConfigError);  // sign out of range

    // flux needs exactly two opposite-signed arms
    g.edges = {EdgeSpec{1.0, Free{}, +1}, EdgeSpec{1.0, Free{}, +1}};
    CHECK_THROWS_AS(validate_graph(g), ConfigError);
    g.edges = {EdgeSpec{1.0, Free{}, +1}, EdgeSpec{1.0, Free{}, -1},
               EdgeSpec{1.0, Free{}, 0}};
    CHECK_THROWS_AS(validate_graph(g), ConfigError);

    g = TwoTerminalGraph{};
    g.edges = {EdgeSpec{1.0, SquareWell{-0.5, 1.5}, 0}};  // wider than edge
    CHECK_THROWS_AS(validate_graph(g), ConfigError);
    g.edges = {EdgeSpec{1.0, SquareWell{0.5, 0.5}, 0}};  // well must be < 0
    CHECK_THROWS_AS(validate_graph(g), ConfigError);
    g.edges = {EdgeSpec{1.0, SquareBarrier{-0.5, 0.5}, 0}};
    CHECK_THROWS_AS(validate_graph(g), ConfigError);

    // tabulated support must stay strictly inside the edge
    g.edges = {EdgeSpec{1.0, Tabulated{{0.0, 0.5}, {0.1, 0.1}}, 0}};
    CHECK_THROWS_AS(validate_graph(g), ConfigError);
    g.edges = {EdgeSpec{1.0, Tabulated{{0.5, 1.0}, {0.1, 0.1}}, 0}};
    CHECK_THROWS_AS(validate_graph(g), ConfigError);
    g.edges = {EdgeSpec{1.0, Tabulated{{0.5}, {0.1}}, 0}};
    CHECK_THROWS_AS(validate_graph(g), ConfigError);

    // composite scatterer must be unitary
    g.edges = {EdgeSpec{2.0, CompositeRing{cplx(0.5, 0.0), cplx(0.5, 0.0)}, 0}};
    CHECK_THROWS_AS(validate_graph(g), ConfigError);
}

TEST_CASE("error types derive from runtime_error and carry messages") {
    try {
        throw EdgeResonanceSingularity("sin(ql) vanished");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "sin(ql) vanished");
    }
}
