#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ascend/lifts.hpp"
#include "ascend/errors.hpp"

#include <random>
#include <set>

using namespace ascend;

namespace {

const ValuedTower& tower_for(unsigned m, unsigned r) {
    unsigned e = 2 * (2 * r - 1);
    return ValuedTower::get(2, m, e, 60L * e);
}

std::map<unsigned, FFElem> reduced_poly(const ReductionReport& rep) {
    REQUIRE(rep.verdict == ReductionReport::Verdict::good);
    REQUIRE(!rep.trivial_reduction);
    REQUIRE(rep.reduced.branch.size() == 1);
    return rep.reduced.branch[0].poly;
}

} // namespace

TEST_CASE("four-point lift at r = 3 over F_4: alpha = w, beta = 0") {
    const ValuedTower& tw = tower_for(2, 3);
    const FiniteField& k = tw.residue_field();
    FFElem w = k.gen();

    auto lift = construct_conductor4_lift(tw, w, k.zero(), tw.one(),
                                          tw.teich(k.mul(w, w)), 3);

    REQUIRE(lift.points.size() == 4);
    const QuadExt& qx = *lift.ext;
    CHECK(qx.is_apparent_zero(lift.points[0]));
    CHECK(*qx.val(lift.points[1]) == Rat(8, 5));  // rho^8 A, v = 16/e = 16/10
    CHECK(*qx.val(lift.points[2]) == Rat(1, 5));  // rho U
    CHECK(*qx.val(lift.points[3]) == Rat(1, 5));
    // the fourth point differs from the third at depth v(rho^8 V) = 8/5
    CHECK(*qx.val(qx.sub(lift.points[3], lift.points[2])) == Rat(8, 5));

    CHECK(lift.report.verdict == ReductionReport::Verdict::good);
    CHECK(lift.report.conductor == 4);
    CHECK(lift.report.defect_valuation == Rat(2));
    std::map<unsigned, FFElem> want{{3, w}};
    CHECK(reduced_poly(lift.report) == want);

    // beta = 0 forces the quadratic layer: V has a genuine theta component
    CHECK(!tw.is_apparent_zero(lift.V.b));
}

TEST_CASE("four-point lift at r = 4 and with beta != 0") {
    const ValuedTower& tw = tower_for(2, 4);
    const FiniteField& k = tw.residue_field();
    FFElem w = k.gen(), w2 = k.mul(w, w);

    auto l0 = construct_conductor4_lift(tw, w, k.zero(), tw.one(), tw.teich(w2), 4);
    CHECK(l0.report.conductor == 4);
    CHECK(*l0.ext->val(l0.points[1]) == Rat(24, 14)); // rho^{4r-4} A, v = 24/e

    auto l1 = construct_conductor4_lift(tw, w, w2, tw.one(), tw.teich(w2), 4);
    std::map<unsigned, FFElem> want{{3, w}, {1, w2}};
    CHECK(reduced_poly(l1.report) == want);
    CHECK(l1.report.defect_valuation == Rat(2));
}

TEST_CASE("four-point lift validates its inputs") {
    const ValuedTower& tw = tower_for(2, 3);
    const FiniteField& k = tw.residue_field();
    FFElem w = k.gen();

    // alpha = 1 with A = 1 forces U = 1, so U - A cannot be a unit
    CHECK_THROWS_AS(construct_conductor4_lift(tw, k.one(), k.zero(), tw.one(), tw.one(), 3),
                    std::invalid_argument);
    // residue mismatch: -A U^2 = 1 != w
    CHECK_THROWS_AS(construct_conductor4_lift(tw, w, k.zero(), tw.one(), tw.one(), 3),
                    std::invalid_argument);
    // A not a unit
    CHECK_THROWS_AS(
        construct_conductor4_lift(tw, w, k.zero(), tw.pi_pow(1), tw.teich(w), 3),
        std::invalid_argument);
    // tower exponent must match r
    CHECK_THROWS_AS(construct_conductor4_lift(tw, w, k.zero(), tw.one(), tw.teich(w), 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(construct_conductor4_lift(tw, w, k.zero(), tw.one(), tw.teich(w), 2),
                    std::invalid_argument);
}

TEST_CASE("good-reduction check on explicit polynomials") {
    const ValuedTower& tw = ValuedTower::get(2, 1, 2, 300);
    const FiniteField& k = tw.residue_field();

    SUBCASE("1 - 4x reduces to the conductor-2 cover") {
        VPoly F = vp_make(tw, {{0, tw.one()}, {1, tw.from_int(-4)}});
        auto rep = check_good_reduction(tw, F);
        CHECK(rep.verdict == ReductionReport::Verdict::good);
        CHECK(rep.conductor == 2);
        std::map<unsigned, FFElem> want{{1, k.one()}};
        CHECK(reduced_poly(rep) == want);
    }

    SUBCASE("1 - pi x has bad reduction at this model") {
        VPoly F = vp_make(tw, {{0, tw.one()}, {1, tw.neg(tw.pi_pow(1))}});
        auto rep = check_good_reduction(tw, F);
        CHECK(rep.verdict == ReductionReport::Verdict::bad_model);
        CHECK(rep.defect_valuation == Rat(1, 2)); // v(pi) with e = 2
    }

    SUBCASE("a perfect square with nontrivial root is inconclusive") {
        VPoly F = vp_make(tw, {{0, tw.one()}, {1, tw.from_int(2)}, {2, tw.one()}});
        auto rep = check_good_reduction(tw, F);
        CHECK(rep.verdict == ReductionReport::Verdict::inconclusive);
    }

    SUBCASE("constant 1 is the split cover") {
        VPoly F = vp_make(tw, {{0, tw.one()}});
        auto rep = check_good_reduction(tw, F);
        CHECK(rep.verdict == ReductionReport::Verdict::good);
        CHECK(rep.trivial_reduction);
    }

    SUBCASE("F(0) != 1 is rejected") {
        VPoly F = vp_make(tw, {{0, tw.from_int(2)}, {1, tw.one()}});
        CHECK_THROWS_AS(check_good_reduction(tw, F), std::invalid_argument);
    }
}

TEST_CASE("2r-point configuration at r = 3: centers 0, 1, w") {
    const ValuedTower& tw = tower_for(2, 3);
    const FiniteField& k = tw.residue_field();
    FFElem w = k.gen(), w2 = k.mul(w, w);

    auto pg = solve_pagot(tw, 3, {tw.zero(), tw.one(), tw.teich(w)});

    REQUIRE(pg.W.size() == 3);
    CHECK(tw.leading_digit(pg.W[0]) == w);
    CHECK(tw.leading_digit(pg.W[1]) == w2);
    CHECK(tw.leading_digit(pg.W[2]) == k.one());
    CHECK(pg.newton_steps <= 30);
    CHECK(!pg.transcript.empty());

    REQUIRE(pg.points.size() == 6);
    CHECK(pg.report.verdict == ReductionReport::Verdict::good);
    CHECK(pg.report.conductor == 6);
    std::map<unsigned, FFElem> want{{5, k.one()}};
    CHECK(reduced_poly(pg.report) == want);

    // perturbed centers sit at distance exactly v(2) from the prescribed ones
    for (size_t i = 0; i < 3; ++i)
        CHECK(*tw.val(tw.sub(pg.Tt[i], pg.T[i])) == Rat(1));
}

TEST_CASE("degenerate configuration r = 1: branch points 0 and 4") {
    const ValuedTower& tw = ValuedTower::get(2, 1, 2, 300);
    const FiniteField& k = tw.residue_field();

    auto pg = solve_pagot(tw, 1, {tw.zero()});
    REQUIRE(pg.points.size() == 2);
    CHECK(tw.is_apparent_zero(pg.points[0]));
    CHECK(*tw.val(pg.points[1]) == Rat(2)); // the point 4
    CHECK(tw.is_apparent_zero(tw.sub(pg.points[1], tw.from_int(4))));
    CHECK(pg.report.conductor == 2);
    std::map<unsigned, FFElem> want{{1, k.one()}};
    CHECK(reduced_poly(pg.report) == want);
}

TEST_CASE("2r-point configuration validates its inputs") {
    const ValuedTower& tw = tower_for(2, 3);
    const FiniteField& k = tw.residue_field();
    FFElem w = k.gen();

    CHECK_THROWS_AS(solve_pagot(tw, 3, {tw.one(), tw.teich(w), tw.zero()}),
                    std::invalid_argument); // first center must be 0
    CHECK_THROWS_AS(solve_pagot(tw, 3, {tw.zero(), tw.one()}), std::invalid_argument);
    // difference of valuation > 0 between two centers
    CHECK_THROWS_AS(
        solve_pagot(tw, 3, {tw.zero(), tw.one(), tw.add(tw.one(), tw.pi_pow(1))}),
        std::invalid_argument);
    CHECK_THROWS_AS(solve_pagot(tw, 2, {tw.zero(), tw.one()}), std::invalid_argument);
}

TEST_CASE("(4,4,6) assembly over F_4") {
    const FiniteField& k = FiniteField::get(2, 2);
    FFElem w = k.gen(), w2 = k.mul(w, w);

    auto asm3 = assemble_442r_lift(k, w, w2, k.zero(), k.zero(), 3);

    CHECK(asm3.distinct_points == 9);
    CHECK(asm3.partition == std::vector<unsigned>{3, 3, 3});
    CHECK(asm3.loci_report.all_pass);
    CHECK(asm3.d_s == 36);
    CHECK(asm3.d_eta == 36);
    CHECK(asm3.branch_count == 9);
    CHECK(!asm3.equidistant);
    CHECK(asm3.c3.newton_steps <= 30);

    std::set<Rat> depths;
    for (const auto& [pr, d] : meeting_depths(asm3.tree)) depths.insert(d);
    CHECK(depths == std::set<Rat>{Rat(1, 5), Rat(6, 5), Rat(8, 5)});

    // the three loci pairwise share exactly the required points
    REQUIRE(asm3.loci_report.checks.size() == 7);
    for (const auto& chk : asm3.loci_report.checks) CHECK(chk.pass);
}

TEST_CASE("(4,4,8) assembly over F_4 with one extra center") {
    const FiniteField& k = FiniteField::get(2, 2);
    FFElem w = k.gen(), w2 = k.mul(w, w);

    auto asm4 = assemble_442r_lift(k, w, w2, k.zero(), k.zero(), 4, {k.one()});
    CHECK(asm4.distinct_points == 11);
    CHECK(asm4.partition == std::vector<unsigned>{3, 3, 3, 2});
    CHECK(asm4.d_s == 44);
    CHECK(asm4.d_eta == 44);
    CHECK(asm4.loci_report.all_pass);
}

TEST_CASE("assembly validates its inputs") {
    const FiniteField& k = FiniteField::get(2, 2);
    FFElem w = k.gen(), w2 = k.mul(w, w);

    CHECK_THROWS_AS(assemble_442r_lift(k, w, w, k.zero(), k.zero(), 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(assemble_442r_lift(k, k.one(), w, k.zero(), k.zero(), 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(assemble_442r_lift(k, w, w2, k.zero(), k.zero(), 4),
                    std::invalid_argument); // missing extra center
    // extra center colliding with sqrt(alpha_2) = w
    CHECK_THROWS_AS(assemble_442r_lift(k, w, w2, k.zero(), k.zero(), 4, {w}),
                    std::invalid_argument);
}

TEST_CASE("random lift-then-reduce recovers (alpha, beta) exactly") {
    std::mt19937 rng(20260823);
    for (int round = 0; round < 20; ++round) {
        unsigned m = 2 + static_cast<unsigned>(rng() % 2); // F_4 or F_8
        unsigned r = 3 + static_cast<unsigned>(rng() % 2);
        const ValuedTower& tw = tower_for(m, r);
        const FiniteField& k = tw.residue_field();
        unsigned long q = 1;
        for (unsigned i = 0; i < m; ++i) q *= 2;

        // draw a unit residue a and alpha not in {0, a^3} so U - A is a unit
        FFElem a = k.from_index(1 + rng() % (q - 1));
        FFElem a3 = k.mul(a, k.mul(a, a));
        FFElem alpha = a3;
        while (k.is_zero(alpha) || alpha == a3)
            alpha = k.from_index(rng() % q);
        FFElem beta = k.from_index(rng() % q);

        TElem A = tw.teich(a);
        TElem U = tw.teich(*k.sqrt(k.mul(alpha, k.inv(a))));
        auto lift = construct_conductor4_lift(tw, alpha, beta, A, U, r);

        CHECK(lift.report.verdict == ReductionReport::Verdict::good);
        CHECK(Rat(2) <= lift.report.defect_valuation);
        std::map<unsigned, FFElem> want{{3, alpha}};
        if (!k.is_zero(beta)) want[1] = beta;
        CHECK(reduced_poly(lift.report) == want);
    }
}
