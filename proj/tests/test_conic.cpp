#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "hypermoment/conic.hpp"
#include "hypermoment/errors.hpp"

using namespace hypermoment;

TEST_CASE("conic classification") {
    CHECK(classify(Conic{0, 1, 0, 0, 0, -1}) == ConicClass::nondegenerate_hyperbola);
    CHECK(classify(Conic{0, 1, 0, 0, 0, 0}) == ConicClass::degenerate_hyperbola);
    CHECK(classify(Conic{1, 0, -1, 0, 0, -1}) == ConicClass::nondegenerate_hyperbola);
    CHECK(classify(Conic{1, 0, -1, 0, 0, 0}) == ConicClass::degenerate_hyperbola);
    // 2x^2 + 3xy + y^2 + x - 2: indefinite quadratic part, full determinant 1/4
    CHECK(classify(Conic{2, 3, 1, 1, 0, -2}) == ConicClass::nondegenerate_hyperbola);

    CHECK(classify(Conic{1, 0, 1, 0, 0, -1}) == ConicClass::ellipse);
    CHECK(classify(Conic{1, 0, 1, 0, 0, 1}) == ConicClass::empty_set);
    CHECK(classify(Conic{1, 0, 1, 0, 0, 0}) == ConicClass::point);
    CHECK(classify(Conic{1, 0, 0, 0, -1, 0}) == ConicClass::parabola);
    CHECK(classify(Conic{1, 0, 0, 0, 0, -1}) == ConicClass::parallel_lines);
    CHECK(classify(Conic{1, 0, 0, 0, 0, 0}) == ConicClass::line);
    CHECK(classify(Conic{1, 0, 0, 0, 0, 1}) == ConicClass::empty_set);
    CHECK(classify(Conic{0, 0, 0, 1, 1, -3}) == ConicClass::line);
    CHECK(classify(Conic{0, 0, 0, 0, 0, 1}) == ConicClass::empty_set);
    CHECK(classify(Conic{0, 0, 0, 0, 0, 0}) == ConicClass::other);
}

TEST_CASE("degree-one maps: inverse and composition") {
    DegreeOneMap g{1.0, 2.0, 1.0, -1.0, 1.0, -1.0};
    DegreeOneMap gi = invert(g);
    for (double x : {-2.0, 0.0, 1.5})
        for (double y : {-1.0, 0.5, 3.0}) {
            auto [u, v] = g(x, y);
            auto [xb, yb] = gi(u, v);
            CHECK(xb == doctest::Approx(x));
            CHECK(yb == doctest::Approx(y));
            auto [cu, cv] = compose(gi, g)(x, y);
            CHECK(cu == doctest::Approx(x));
            CHECK(cv == doctest::Approx(y));
        }
    CHECK(g.det() == doctest::Approx(-2.0 - 1.0));

    DegreeOneMap singular{0.0, 1.0, 2.0, 0.0, 2.0, 4.0};
    CHECK_THROWS_AS(invert(singular), std::domain_error);
}

TEST_CASE("transform_conic composes the polynomial with the map") {
    Conic Q{1, -2, 3, 0.5, -1, 2};
    DegreeOneMap phi{0.3, 1.2, -0.7, -1.1, 0.4, 2.0};
    Conic T = transform_conic(Q, phi);
    for (double x : {-1.0, 0.2, 2.0})
        for (double y : {-0.5, 1.0}) {
            auto [u, v] = phi(x, y);
            CHECK(T.eval(x, y) == doctest::Approx(Q.eval(u, v)));
        }
}

TEST_CASE("normalization of the canonical conics is trivial") {
    for (CanonicalCurve c : {CanonicalCurve::yx_eq_1, CanonicalCurve::yx_eq_0}) {
        HyperbolaNormalization n = normalize_hyperbola(canonical_conic(c));
        CHECK(n.canonical == c);
        CHECK(n.lambda == doctest::Approx(1.0));
        CHECK(n.phi.b1 == doctest::Approx(1.0));
        CHECK(n.phi.c1 == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(n.phi.a1 == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(n.phi.c2 == doctest::Approx(1.0));
    }
}

TEST_CASE("normalization maps the canonical curve onto the conic") {
    auto check_normalization = [](const Conic& Q) {
        HyperbolaNormalization n = normalize_hyperbola(Q);
        Conic canonical = canonical_conic(n.canonical);
        CHECK(n.phi.det() > 0);
        // off the curve as well: Q(phi(u, v)) == lambda * (uv - {0,1})
        for (double u : {-2.0, -0.7, 0.4, 1.3, 2.6})
            for (double v : {-1.8, -0.3, 0.8, 2.2}) {
                auto [x, y] = n.phi(u, v);
                CHECK(Q.eval(x, y) ==
                      doctest::Approx(n.lambda * canonical.eval(u, v)).epsilon(1e-9));
            }
    };
    check_normalization(Conic{1, 0, -1, 0, 0, -1});          // x^2 - y^2 = 1
    check_normalization(Conic{0, 3, 0, 0, 0, -2});           // 3xy = 2
    check_normalization(Conic{0, 1, 0, -1, 2, -5});          // shifted product
    check_normalization(Conic{2, 3, 1, 1, 0, -2});           // tilted
    check_normalization(Conic{1, -1, -2, 0, 0, 0});  // two lines through the origin
    check_normalization(Conic{1, -1, -2, 1, 1, 0});  // (x + y)(x - 2y + 1)
    check_normalization(Conic{0, -5, 0, 1, 2, 0.4});
}

TEST_CASE("normalization rejects non-hyperbolas") {
    CHECK_THROWS_AS(normalize_hyperbola(Conic{1, 0, 1, 0, 0, -1}), UnsupportedCurve);
    CHECK_THROWS_AS(normalize_hyperbola(Conic{1, 0, 0, 0, -1, 0}), UnsupportedCurve);
    CHECK_THROWS_AS(normalize_hyperbola(Conic{0, 0, 0, 1, -1, 0}), UnsupportedCurve);
}

TEST_CASE("moment transport agrees with the pushforward of the measure") {
    AtomicMeasure mu;
    mu.atoms = {{2.0, 0.5, 0.7}, {-1.0, -1.0, 1.2}, {0.5, 2.0, 0.4}};
    MomentSequence beta = moments_of(mu, 6);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    int tested = 0;
    while (tested < 10) {
        DegreeOneMap g{coef(rng), coef(rng), coef(rng), coef(rng), coef(rng), coef(rng)};
        if (std::abs(g.det()) < 0.3) continue;
        ++tested;
        MomentSequence direct = moments_of(pushforward_measure(mu, g), 6);
        MomentSequence transported = transform_moments(beta, g);
        for (Mono m : monomials_upto(6))
            CHECK(transported(m) ==
                  doctest::Approx(direct(m)).epsilon(1e-10).scale(
                      std::max(1.0, std::abs(direct(m)))));
    }
}

TEST_CASE("transforms compose contravariantly on moments") {
    MomentSequence beta = fixtures::rank4_top_y_fixture();
    DegreeOneMap g{0.5, 1.5, 0.2, -0.3, 0.4, 1.1};
    MomentSequence back = transform_moments(transform_moments(beta, g), invert(g));
    for (Mono m : monomials_upto(beta.degree()))
        CHECK(back(m) == doctest::Approx(beta(m)).epsilon(1e-10));
}
