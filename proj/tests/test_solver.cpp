#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "hypermoment/solver.hpp"

using namespace hypermoment;

namespace {

doctest::Approx near(double v, double eps = 1e-6) {
    return doctest::Approx(v).epsilon(eps).scale(1.0);
}

void check_atoms(const AtomicMeasure& mu, const std::vector<double>& xs,
                 const std::vector<double>& ys, const std::vector<double>& rho,
                 double eps = 1e-6) {
    REQUIRE(mu.atoms.size() == xs.size());
    for (size_t k = 0; k < xs.size(); ++k) {
        CHECK(mu.atoms[k].x == near(xs[k], eps));
        CHECK(mu.atoms[k].y == near(ys[k], eps));
        CHECK(mu.atoms[k].density == near(rho[k], eps));
    }
}

int flat_rank(const Extension& e) {
    return moment_matrix_rank(e.M).rank;
}

}  // namespace

TEST_CASE("bilinear root finding") {
    auto pq = solve_bilinear(1, 1, 1, 0);
    REQUIRE(pq);
    CHECK(pq->first == near(-0.5));
    CHECK(pq->second == near(-0.5));

    pq = solve_bilinear(-1, 0, 0, 1);  // pq = 1
    REQUIRE(pq);
    CHECK(pq->first * pq->second == near(1.0, 1e-10));

    pq = solve_bilinear(2, 1, 2, 1);  // factors as (p + 2)(q + 1) = 0
    REQUIRE(pq);
    CHECK(pq->first == near(0.0));
    CHECK(pq->second == near(-1.0));
    CHECK(2 + pq->first + 2 * pq->second + pq->first * pq->second == near(0.0, 1e-12));

    CHECK_FALSE(solve_bilinear(1, 0, 0, 0).has_value());
    pq = solve_bilinear(0, 0, 0, 0);
    REQUIRE(pq);
    CHECK(pq->first == 0.0);
    CHECK(pq->second == 0.0);
}

TEST_CASE("rank-4 sequence with top-Y dependence: four atoms, equal densities") {
    MomentSequence beta = fixtures::rank4_top_y_fixture();
    SolverOutcome out = solve_canonical(beta, CanonicalCurve::yx_eq_1);
    CHECK(out.status == SolveStatus::flat_at_n_plus_1);
    CHECK(out.tag.label() == "III");
    CHECK(out.rank == 4);
    REQUIRE(out.first);
    CHECK(flat_rank(*out.first) == 4);
    CHECK(out.first->hankel_defect <= 1e-10 * out.first->hankel_scale);

    const double x1 = std::sqrt(2.0 + std::sqrt(3.0));
    const double x2 = std::sqrt(2.0 - std::sqrt(3.0));
    REQUIRE(out.measure.size() == 4);
    std::vector<double> xs{-x1, -x2, x2, x1};
    for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(out.measure.atoms[k].x - xs[k]) < 1e-9);
        CHECK(std::abs(out.measure.atoms[k].y - 1.0 / xs[k]) < 1e-9);
        CHECK(std::abs(out.measure.atoms[k].density - 0.25) < 1e-9);
    }
    CHECK(out.max_residual < 1e-10);
}

TEST_CASE("flat rank-5 sequence: five atoms on the quintic") {
    MomentSequence beta = fixtures::flat_quintic_fixture();
    SolverOutcome out = solve_canonical(beta, CanonicalCurve::yx_eq_1);
    CHECK(out.status == SolveStatus::already_flat);
    CHECK(out.tag.label() == "I");
    CHECK(out.rank == 5);
    REQUIRE(out.first);
    CHECK(flat_rank(*out.first) == 5);

    check_atoms(out.measure,
                {-2.0291958253, -0.5212286888, 0.2820055544, 0.6587881767, 2.1810593545},
                {1.0 / -2.0291958253, 1.0 / -0.5212286888, 1.0 / 0.2820055544,
                 1.0 / 0.6587881767, 1.0 / 2.1810593545},
                {0.2284289682, 0.2631849216, 0.0174321599, 0.3120396936, 0.1789142568});

    // the x coordinates solve 21 x^5 - 12 x^4 - 98 x^3 + 42 x^2 + 28 x - 9 = 0
    for (const Atom& a : out.measure.atoms) {
        const double x = a.x;
        const double val = 21 * std::pow(x, 5) - 12 * std::pow(x, 4) -
                           98 * std::pow(x, 3) + 42 * x * x + 28 * x - 9;
        CHECK(std::abs(val) < 1e-6);
    }
    CHECK(out.max_residual < 1e-9);
}

TEST_CASE("full-rank cubic: one-step and two-step extensions by forced moments") {
    MomentSequence beta = fixtures::full_rank_cubic_fixture();

    SUBCASE("unforced: the obstruction is solvable, seven atoms") {
        SolverOutcome out = solve_canonical(beta, CanonicalCurve::yx_eq_1);
        CHECK(out.status == SolveStatus::flat_at_n_plus_1);
        CHECK(out.tag.label() == "IV");
        CHECK(out.rank == 7);
        CHECK(out.measure.size() == 7);
        CHECK(out.max_residual < 1e-7);
        REQUIRE(out.flatness_form);
        REQUIRE(out.params.p);
        REQUIRE(out.params.q);
        // the recovered obstruction vanishes at the chosen (p, q)
        const BilinearForm& f = *out.flatness_form;
        CHECK(f.a - beta.at(0, 0) + f.b * *out.params.p + f.c * *out.params.q +
                  f.d * *out.params.p * *out.params.q ==
              near(0.0, 1e-7));
    }

    SUBCASE("forced (-2, 151): flat in one step, seven atoms") {
        ForcedParameters forced;
        forced.p = -2.0;
        forced.q = 151.0;
        SolverOutcome out = solve_canonical(beta, CanonicalCurve::yx_eq_1, {}, forced);
        CHECK(out.status == SolveStatus::flat_at_n_plus_1);
        REQUIRE(out.first);
        CHECK(flat_rank(*out.first) == 7);
        std::vector<double> xs{-2.8223814060, -1.8764961947, -0.6494714464, 0.1487249572,
                               0.6689807529,  1.3244495081,  2.2061938289};
        std::vector<double> ys;
        for (double x : xs) ys.push_back(1.0 / x);
        check_atoms(out.measure, xs, ys,
                    {0.0075432136, 0.0757948897, 0.4149046275, 0.0002451477, 0.4315442283,
                     0.0114620755, 0.0585058176});
        CHECK(out.max_residual < 1e-7);
    }

    SUBCASE("forced (-3, 150): rank grows once, eight atoms") {
        ForcedParameters forced;
        forced.p = -3.0;
        forced.q = 150.0;
        SolverOutcome out = solve_canonical(beta, CanonicalCurve::yx_eq_1, {}, forced);
        CHECK(out.status == SolveStatus::flat_at_n_plus_2);
        REQUIRE(out.first);
        REQUIRE(out.second);
        CHECK(flat_rank(*out.first) == 8);
        CHECK(flat_rank(*out.second) == 8);
        REQUIRE(out.params.u);
        CHECK(*out.params.u == near(80.0, 1e-9));  // default policy tau + 1
        REQUIRE(out.params.v);
        CHECK(*out.params.v == near(1036.0, 1e-9));
        std::vector<double> xs{-3.6358219642, -2.0257822554, -0.8409676618, -0.6449964792,
                               0.1496365276,  0.6702869107,  1.1415812170,  2.1860637053};
        std::vector<double> ys;
        for (double x : xs) ys.push_back(1.0 / x);
        check_atoms(out.measure, xs, ys,
                    {0.0008698579, 0.0746210868, 0.0288299983, 0.3939643136, 0.0002544016,
                     0.4335688618, 0.0061171804, 0.0617742997});
        CHECK(out.max_residual < 1e-7);
    }
}

TEST_CASE("cross with a pure-X dependence: one x-atom, three y-atoms") {
    MomentSequence beta = fixtures::cross_line_fixture();
    SolverOutcome out = solve_canonical(beta, CanonicalCurve::yx_eq_0);
    CHECK(out.status == SolveStatus::flat_at_n_plus_1);
    CHECK(out.tag.label() == "deg-I");
    CHECK(out.rank == 4);
    check_atoms(out.measure, {0.0, 0.0, 0.0, 2.0},
                {-7.1274399288, -0.9469156080, 2.0743555368, 0.0},
                {0.0003143939, 0.3423343125, 0.1573512936, 0.5});
    CHECK(out.max_residual < 1e-8);
}

TEST_CASE("cross at full rank: constant obstruction certifies six atoms minimum") {
    MomentSequence beta = fixtures::cross_full_rank_fixture();

    SUBCASE("unforced deterministic extension") {
        SolverOutcome out = solve_canonical(beta, CanonicalCurve::yx_eq_0);
        CHECK(out.status == SolveStatus::flat_at_n_plus_2);
        CHECK(out.tag.label() == "deg-III");
        CHECK(out.rank == 5);
        REQUIRE(out.flatness_form);
        // alpha(p, q) == 1 for all p, q: no one-step (five-atom) extension exists
        CHECK(out.flatness_form->a == near(1.0, 1e-9));
        CHECK(std::abs(out.flatness_form->b) < 1e-9);
        CHECK(std::abs(out.flatness_form->c) < 1e-9);
        CHECK(std::abs(out.flatness_form->d) < 1e-9);
        REQUIRE(out.params.u);
        REQUIRE(out.params.v);
        REQUIRE(out.params.r);
        REQUIRE(out.params.s);
        CHECK(*out.params.u == near(367.0, 1e-9));  // tau = 366, policy tau + 1
        CHECK(*out.params.v == near(7319.0, 1e-9));
        CHECK(*out.params.r == near(-6651.0, 1e-9));
        CHECK(*out.params.s == near(-614936.0, 1e-8));
        CHECK(out.measure.size() == 6);
        CHECK(out.max_residual < 1e-7);
        REQUIRE(out.first);
        REQUIRE(out.second);
        CHECK(flat_rank(*out.first) == 6);
        CHECK(flat_rank(*out.second) == 6);
    }

    SUBCASE("forced (18, 84, 43) reproduces the distinguished six-atom measure") {
        ForcedParameters forced;
        forced.p = 18.0;
        forced.q = 84.0;
        forced.u = 43.0;
        SolverOutcome out = solve_canonical(beta, CanonicalCurve::yx_eq_0, {}, forced);
        CHECK(out.status == SolveStatus::flat_at_n_plus_2);
        REQUIRE(out.params.v);
        REQUIRE(out.params.r);
        REQUIRE(out.params.s);
        CHECK(*out.params.v == near(263.0, 1e-9));
        CHECK(*out.params.r == near(81.0, 1e-9));
        CHECK(*out.params.s == near(784.0, 1e-9));
        check_atoms(out.measure, {-2.94883, 0.0, 0.0, 0.0, 0.782816, 2.16601},
                    {0.0, -3.52404, 0.463604, 3.06043, 0.0, 0.0},
                    {0.00359018, 0.00165656, 0.0821253, 0.316218, 0.203329, 0.393081},
                    1e-4);
        CHECK(out.max_residual < 1e-7);
    }

    SUBCASE("forcing the even moment below its flat threshold fails") {
        ForcedParameters forced;
        forced.p = 18.0;
        forced.q = 84.0;
        forced.u = 10.0;  // tau at (18, 84) is 42
        SolverOutcome out = solve_canonical(beta, CanonicalCurve::yx_eq_0, {}, forced);
        CHECK(out.status == SolveStatus::no_measure);
        CHECK(out.failure.find("flat threshold") != std::string::npos);
    }
}

TEST_CASE("pure-Y dependence without the X column solves through the swap") {
    // atoms {(1,0), (2,0), (0,0)}: the first S dependence is Y = 0, which has
    // no X^1 coefficient, so the solver swaps coordinates and comes back
    AtomicMeasure mu;
    mu.atoms = {{1.0, 0, 0.5}, {2.0, 0, 0.5}, {0, 0, 0.3}};
    MomentSequence beta = moments_of(mu, 4);
    SolverOutcome out = solve_canonical(beta, CanonicalCurve::yx_eq_0);
    CHECK(out.status != SolveStatus::no_measure);
    CHECK(out.swapped_xy);
    CHECK(out.rank == 3);
    CHECK(out.measure.size() == 3);
    for (const Atom& a : out.measure.atoms) CHECK(a.y == near(0.0, 1e-9));
    CHECK(out.max_residual < 1e-8);
    bool noted = false;
    for (const std::string& w : out.warnings)
        if (w.find("swapped") != std::string::npos) noted = true;
    CHECK(noted);
}

TEST_CASE("necessary-condition failures are reported, not thrown") {
    SUBCASE("not positive semidefinite") {
        MomentSequence beta =
            fixtures::beta_on_unit_hyperbola({1, 2, 1, 0, 1}, {1, 0, 1, 0, 1});
        SolverOutcome out = solve_canonical(beta, CanonicalCurve::yx_eq_1);
        CHECK(out.status == SolveStatus::no_measure);
        CHECK_FALSE(out.precheck.psd);
        CHECK(out.failure.find("positive semidefinite") != std::string::npos);
    }

    SUBCASE("atom off the curve breaks the column relation") {
        MomentSequence beta(4);
        for (Mono m : monomials_upto(4))
            beta.at(m.i, m.j) = std::pow(2.0, m.i);  // moments of delta at (1, 2)
        SolverOutcome out = solve_canonical(beta, CanonicalCurve::yx_eq_1);
        CHECK(out.status == SolveStatus::no_measure);
        CHECK(out.precheck.psd);
        CHECK_FALSE(out.precheck.curve_relation);
        CHECK(out.failure.find("curve") != std::string::npos);
    }
}

TEST_CASE("general conics: normalization, solve, pushforward") {
    MomentSequence beta = fixtures::rank4_top_y_fixture();
    SolverOutcome base = solve_canonical(beta, CanonicalCurve::yx_eq_1);
    REQUIRE(base.status == SolveStatus::flat_at_n_plus_1);

    DegreeOneMap g{1.0, 2.0, 1.0, 0.0, 1.0, -1.0};  // (x, y) -> (2x + y + 1, x - y)
    Conic canon = canonical_conic(CanonicalCurve::yx_eq_1);
    Conic Qt = transform_conic(canon, invert(g));
    CHECK(classify(Qt) == ConicClass::nondegenerate_hyperbola);

    MomentSequence beta_t = transform_moments(beta, g);
    GeneralOutcome out = solve(beta_t, Qt);
    CHECK(out.conic_class == ConicClass::nondegenerate_hyperbola);
    CHECK(out.canonical.status == SolveStatus::flat_at_n_plus_1);
    CHECK(out.canonical.rank == base.rank);

    AtomicMeasure expect = pushforward_measure(base.measure, g);
    sort_atoms(expect);
    REQUIRE(out.measure.size() == expect.size());
    for (int k = 0; k < expect.size(); ++k) {
        CHECK(out.measure.atoms[k].x == near(expect.atoms[k].x, 1e-8));
        CHECK(out.measure.atoms[k].y == near(expect.atoms[k].y, 1e-8));
        CHECK(out.measure.atoms[k].density == near(expect.atoms[k].density, 1e-8));
    }
}

TEST_CASE("non-hyperbolas are rejected") {
    MomentSequence beta = fixtures::rank4_top_y_fixture();
    CHECK_THROWS_AS(solve(beta, Conic{1, 0, 1, 0, 0, -1}), UnsupportedCurve);
    CHECK_THROWS_AS(solve(beta, Conic{1, 0, 0, 0, -1, 0}), UnsupportedCurve);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(solve_canonical(MomentSequence(2), CanonicalCurve::yx_eq_1),
                    std::invalid_argument);
    MomentSequence beta = fixtures::rank4_top_y_fixture();
    MomentSequence zero_mass(4);
    SolverOutcome out = solve_canonical(zero_mass, CanonicalCurve::yx_eq_1);
    CHECK(out.status == SolveStatus::no_measure);
    CHECK(out.failure.find("positive") != std::string::npos);
}
