#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ascend/strata.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace ascend;

namespace {

/* independent partition generator: all partitions of n, no filtering */
void all_partitions(unsigned n, unsigned cap, std::vector<unsigned>& cur,
                    std::vector<std::vector<unsigned>>& out) {
    if (n == 0) {
        out.push_back(cur);
        return;
    }
    for (unsigned e = std::min(n, cap); e >= 1; --e) {
        cur.push_back(e);
        all_partitions(n - e, e, cur, out);
        cur.pop_back();
    }
}

bool part_allowed(unsigned p, const std::vector<unsigned>& parts) {
    for (unsigned e : parts)
        if (e % p == 1) return false;
    return true;
}

} // namespace

TEST_CASE("enumeration at the reference point p=2, total=4") {
    auto strata = enumerate_strata(2, 4);
    REQUIRE(strata.size() == 2);

    CHECK(strata[0].partition == std::vector<unsigned>{4});
    CHECK(strata[0].r == 0);
    CHECK(strata[0].s == 0);
    CHECK(strata[0].d == 2);
    CHECK(strata[0].g == 1);
    CHECK(strata[0].dimension == 2);

    CHECK(strata[1].partition == std::vector<unsigned>{2, 2});
    CHECK(strata[1].r == 1);
    CHECK(strata[1].s == 1);
    CHECK(strata[1].dimension == 3);
}

TEST_CASE("enumeration order and shape for larger totals") {
    auto strata = enumerate_strata(2, 8);
    std::vector<std::vector<unsigned>> got;
    for (auto& s : strata) got.push_back(s.partition);
    CHECK(got == std::vector<std::vector<unsigned>>{
                     {8}, {6, 2}, {4, 4}, {4, 2, 2}, {2, 2, 2, 2}});
    for (auto& s : strata) {
        long long total = 0;
        for (unsigned e : s.partition) total += e;
        CHECK(total == s.d + 2);
        CHECK(2 * s.g == s.d); // p=2: g = d/2
    }

    auto p3 = enumerate_strata(3, 5);
    std::vector<std::vector<unsigned>> got3;
    for (auto& s : p3) got3.push_back(s.partition);
    // parts not = 1 mod 3: exclude 1 and 4
    CHECK(got3 == std::vector<std::vector<unsigned>>{{5}, {3, 2}});
    CHECK(p3[0].dimension == 5 - 1 - 1);
    CHECK(p3[1].dimension == 5 - 1 - 0);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(enumerate_strata(2, 3), std::invalid_argument); // genus 1/2
    CHECK_THROWS_AS(enumerate_strata(2, 2), std::invalid_argument); // genus 0
    CHECK_THROWS_AS(enumerate_strata(3, 2), std::invalid_argument); // genus 0
    CHECK_THROWS_AS(enumerate_strata(1, 4), std::invalid_argument);
    CHECK_NOTHROW(enumerate_strata(3, 3));
}

TEST_CASE("oracle: counts match a brute-force generator, totals <= 32") {
    for (unsigned p : {2u, 3u, 5u}) {
        for (unsigned total = 3; total <= 32; ++total) {
            long long d = static_cast<long long>(total) - 2;
            if (d * (p - 1) % 2 != 0 || d * (p - 1) < 2) continue;

            std::vector<std::vector<unsigned>> raw;
            std::vector<unsigned> cur;
            all_partitions(total, total, cur, raw);
            std::set<std::vector<unsigned>> expected;
            for (auto& pr : raw)
                if (part_allowed(p, pr)) expected.insert(pr);

            auto strata = enumerate_strata(p, total);
            REQUIRE(strata.size() == expected.size());
            std::set<std::vector<unsigned>> got;
            for (auto& s : strata) got.insert(s.partition);
            REQUIRE(got == expected);
        }
    }
}

TEST_CASE("grid: dimension is nonnegative whenever the genus is positive") {
    for (unsigned p : {2u, 3u, 5u}) {
        for (unsigned total = 3; total <= 32; ++total) {
            long long d = static_cast<long long>(total) - 2;
            if (d * (p - 1) % 2 != 0 || d * (p - 1) < 2) continue;
            for (auto& s : enumerate_strata(p, total)) {
                REQUIRE(s.g >= 1);
                REQUIRE(s.dimension >= 0);
            }
        }
    }
}

TEST_CASE("stratum of a cover and the lift-side reading") {
    const FiniteField& F8 = FiniteField::get(2, 3);

    auto make_cover = [&](const FiniteField& F, std::vector<unsigned> degs) {
        ASFunction f;
        f.field = &F;
        unsigned idx = 0;
        for (unsigned dg : degs) {
            ASBranch b;
            b.c = F.from_index(idx++);
            b.poly[dg] = F.one();
            f.branch.push_back(b);
        }
        return f;
    };

    SUBCASE("profile (4): one branch point, all four lift points coalesce") {
        CoverInvariants c = cover_invariants(make_cover(F8, {3}));
        CoverStratum cs = stratum_of_cover(c);
        CHECK(cs.stratum.partition == std::vector<unsigned>{4});
        CHECK(cs.stratum.d == 2);
        CHECK(cs.branch_points_generic == 4);
        CHECK(cs.coalescing == std::vector<unsigned>{4});
    }
    SUBCASE("profile (2,2): two pairs") {
        CoverInvariants c = cover_invariants(make_cover(F8, {1, 1}));
        CoverStratum cs = stratum_of_cover(c);
        CHECK(cs.stratum.partition == std::vector<unsigned>{2, 2});
        CHECK(cs.stratum.dimension == 3);
        CHECK(cs.branch_points_generic == 4);
    }
    SUBCASE("profile (4,2): neighborhood dimension 6-3-(1+0)") {
        CoverInvariants c = cover_invariants(make_cover(F8, {3, 1}));
        CoverStratum cs = stratum_of_cover(c);
        CHECK(cs.stratum.partition == std::vector<unsigned>{4, 2});
        CHECK(cs.stratum.d == 4);
        CHECK(cs.stratum.neighborhood_dim == 2);
        CHECK(cs.branch_points_generic == 6);
    }
}

TEST_CASE("round trip: synthesized covers land in the prescribed stratum") {
    std::mt19937 rng(55221);
    for (int round = 0; round < 200; ++round) {
        unsigned p = (round % 3 == 0) ? 2u : (round % 3 == 1) ? 3u : 5u;
        const FiniteField& F = FiniteField::get(p, p == 2 ? 4u : 2u);

        unsigned parts = 1 + rng() % 4;
        std::vector<unsigned> profile;
        for (unsigned i = 0; i < parts; ++i) {
            unsigned e;
            do {
                e = 2 + rng() % 9;
            } while (e % p == 1);
            profile.push_back(e);
        }
        std::sort(profile.begin(), profile.end(), std::greater<unsigned>());

        ASFunction f;
        f.field = &F;
        unsigned idx = 1;
        for (unsigned e : profile) {
            ASBranch b;
            b.c = F.from_index(idx++);
            b.poly[e - 1] = F.one();
            f.branch.push_back(b);
        }
        CoverInvariants c = cover_invariants(f);
        REQUIRE(c.profile == profile);
        CoverStratum cs = stratum_of_cover(c);
        REQUIRE(cs.stratum.partition == profile);
        REQUIRE(cs.stratum.d == static_cast<long long>(c.d));

        // and the stratum occurs in the enumeration of its total
        long long total = cs.stratum.d + 2;
        if (cs.stratum.g >= 1) {
            bool found = false;
            for (auto& s : enumerate_strata(p, static_cast<unsigned>(total)))
                if (s.partition == profile) {
                    found = true;
                    CHECK(s.dimension == cs.stratum.dimension);
                }
            CHECK(found);
        }
    }
}

TEST_CASE("even coalescing predicate") {
    CHECK(even_coalescing({4}));
    CHECK(even_coalescing({2, 2}));
    CHECK(even_coalescing({6, 4, 2}));
    CHECK(!even_coalescing({4, 3}));
    CHECK(!even_coalescing({1, 1}));
    CHECK(even_coalescing({})); // vacuous
}

TEST_CASE("profile with a forbidden part is an internal failure") {
    CoverInvariants c;
    c.p = 2;
    c.d = 3;
    c.profile = {3, 2};
    CHECK_THROWS_AS(stratum_of_cover(c), std::logic_error);
}
