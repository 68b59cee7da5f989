#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "hypermoment/errors.hpp"
#include "hypermoment/measure.hpp"
#include "hypermoment/variety.hpp"

using namespace hypermoment;

TEST_CASE("real roots of univariate polynomials") {
    auto r = real_roots({1.0, 0.0, -1.0});  // x^2 - 1
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(-1.0));
    CHECK(r[1] == doctest::Approx(1.0));

    CHECK(real_roots({1.0, 0.0, 1.0}).empty());  // x^2 + 1

    r = real_roots({1.0, -6.0, 11.0, -6.0});  // (x-1)(x-2)(x-3)
    REQUIRE(r.size() == 3);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(2.0));
    CHECK(r[2] == doctest::Approx(3.0));

    r = real_roots({0.0, 0.0, 2.0, -2.0});  // leading zeros: 2x - 2
    REQUIRE(r.size() == 1);
    CHECK(r[0] == doctest::Approx(1.0));

    CHECK(real_roots({5.0}).empty());
    CHECK(real_roots({}).empty());
    CHECK(real_roots({0.0, 0.0}).empty());

    r = real_roots({1.0, -4.0, 4.0});  // double root at 2
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(r[1] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("variety of a rank-deficient matrix on yx = 1") {
    // the relations of this rank-4 M(2) cut the hyperbola at exactly the four
    // points x = +-sqrt(2 +- sqrt(3)), y = 1/x
    MomentSequence beta = fixtures::rank4_top_y_fixture();
    MomentMatrix M = build_moment_matrix(beta, 2);
    Variety V = compute_variety(M, CanonicalCurve::yx_eq_1);
    REQUIRE(V.finite);
    REQUIRE(V.points.size() == 4);
    const double x1 = std::sqrt(2.0 + std::sqrt(3.0));
    const double x2 = std::sqrt(2.0 - std::sqrt(3.0));
    std::vector<double> expect{-x1, -x2, x2, x1};
    for (size_t k = 0; k < 4; ++k) {
        CHECK(V.points[k].first == doctest::Approx(expect[k]));
        CHECK(V.points[k].second == doctest::Approx(1.0 / expect[k]));
    }
    CHECK(variety_condition(4, V));
    CHECK_FALSE(variety_condition(5, V));
}

TEST_CASE("variety is infinite when a branch stays unconstrained") {
    // full-rank M(2) on the cross: the only relation is the curve itself
    AtomicMeasure mu;
    mu.atoms = {{1.0, 0, 0.5}, {2.0, 0, 0.5}, {0, 1.5, 0.5}, {0, -1.0, 0.5}, {0, 0, 0.3}};
    MomentMatrix M = build_moment_matrix(moments_of(mu, 4), 2);
    Variety V = compute_variety(M, CanonicalCurve::yx_eq_0);
    CHECK_FALSE(V.finite);
    CHECK(V.points.empty());
    CHECK(variety_condition(5, V));  // an infinite variety satisfies any rank

    // two x-atoms plus the origin put three points on the x-branch; no degree-2
    // relation can cut them, so only the y-branch is constrained
    AtomicMeasure mu2;
    mu2.atoms = {{1.0, 0, 0.5}, {-2.0, 0, 0.25}, {0, 3.0, 0.5}, {0, 0, 0.3}};
    MomentMatrix M2 = build_moment_matrix(moments_of(mu2, 4), 2);
    CHECK_FALSE(compute_variety(M2, CanonicalCurve::yx_eq_0).finite);
}

TEST_CASE("variety cut on both branches, origin included") {
    AtomicMeasure mu;
    mu.atoms = {{1.0, 0, 0.5}, {0, 3.0, 0.5}, {0, 0, 0.3}};
    // rank 3 with relations X^2 = X, Y^2 = 3Y, YX = 0
    MomentMatrix M = build_moment_matrix(moments_of(mu, 4), 2);
    Variety V = compute_variety(M, CanonicalCurve::yx_eq_0);
    REQUIRE(V.finite);
    REQUIRE(V.points.size() == 3);
    CHECK(V.points[0].first == doctest::Approx(0.0));
    CHECK(V.points[0].second == doctest::Approx(0.0));
    CHECK(V.points[1].second == doctest::Approx(3.0));
    CHECK(V.points[2].first == doctest::Approx(1.0));

    AtomicMeasure mu2;  // both branches cut, no origin
    mu2.atoms = {{1.0, 0, 0.5}, {-2.0, 0, 0.25}, {0, 3.0, 0.5}};
    MomentMatrix M2 = build_moment_matrix(moments_of(mu2, 4), 2);
    Variety V2 = compute_variety(M2, CanonicalCurve::yx_eq_0);
    REQUIRE(V2.finite);
    REQUIRE(V2.points.size() == 3);
    CHECK(V2.points[0].first == doctest::Approx(-2.0));
    CHECK(V2.points[1].second == doctest::Approx(3.0));
    CHECK(V2.points[2].first == doctest::Approx(1.0));
}

TEST_CASE("measure extraction from a flat pair") {
    AtomicMeasure mu;
    mu.atoms = {{2.0, 0.5, 1.0}, {-1.0, -1.0, 0.5}};
    MomentSequence beta4 = moments_of(mu, 4);
    MomentSequence beta2 = beta4.truncated(2);
    MomentMatrix M1 = build_moment_matrix(beta2, 1);
    MomentMatrix M2 = build_moment_matrix(beta4, 2);
    AtomicMeasure got = extract_measure(beta2, M1, M2, CanonicalCurve::yx_eq_1);
    REQUIRE(got.size() == 2);
    CHECK(got.atoms[0].x == doctest::Approx(-1.0));
    CHECK(got.atoms[0].density == doctest::Approx(0.5));
    CHECK(got.atoms[1].x == doctest::Approx(2.0));
    CHECK(got.atoms[1].y == doctest::Approx(0.5));
    CHECK(got.atoms[1].density == doctest::Approx(1.0));
    CHECK(verify_measure(got, beta4).ok);
}
