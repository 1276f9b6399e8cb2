#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ascend/ramification.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <vector>

using namespace ascend;

namespace {

/* ---- enumeration of conductor tuples for grid tests ---- */

void ascending_tuples(unsigned n, unsigned max_c, unsigned p, unsigned lo,
                      std::vector<unsigned>& cur,
                      std::vector<std::vector<unsigned>>& out) {
    if (cur.size() == n) {
        out.push_back(cur);
        return;
    }
    for (unsigned c = lo; c <= max_c; ++c) {
        if ((c - 1) % p == 0) continue; // m must be prime to p
        cur.push_back(c);
        ascending_tuples(n, max_c, p, c, cur, out);
        cur.pop_back();
    }
}

bool satisfies_congruences(unsigned p, const std::vector<unsigned>& cond) {
    unsigned n = static_cast<unsigned>(cond.size());
    for (unsigned i = 1; i <= n; ++i) {
        unsigned long long mod = 1;
        for (unsigned k = 0; k < n - i; ++k) mod *= p;
        unsigned long long m = cond[i - 1] - 1;
        if ((m + 1) % mod != 0) return false; // m_i = -1 mod p^{n-i}
    }
    return true;
}

} // namespace

TEST_CASE("lower and upper jumps at the worked examples") {
    auto t444 = make_type(2, {4, 4, 4});
    JumpData j = lower_jumps(t444);
    CHECK(j.lower == std::vector<long long>{3, 3, 3});
    CHECK(j.upper == std::vector<long long>{3, 3, 3});

    auto t446 = make_type(2, {4, 4, 6});
    JumpData k = lower_jumps(t446);
    CHECK(k.lower == std::vector<long long>{3, 3, 11});
    CHECK(k.upper == std::vector<long long>{3, 3, 5});
    // phi(11) = 3 + 8/4 through the graph, and a mid-segment point
    CHECK(herbrand_eval(k, Rat(11)) == Rat(5));
    CHECK(herbrand_eval(k, Rat(4)) == Rat(13, 4));
    CHECK(herbrand_eval(k, Rat(3)) == Rat(3));

    // single level: conductor m+1 gives the one jump m
    for (unsigned m : {1u, 3u, 7u, 25u}) {
        JumpData s = lower_jumps(make_type(2, {m + 1}));
        CHECK(s.lower == std::vector<long long>{(long long)m});
        CHECK(s.upper == std::vector<long long>{(long long)m});
    }
    JumpData s3 = lower_jumps(make_type(3, {5}));
    CHECK(s3.lower == std::vector<long long>{4});
}

TEST_CASE("ramification filtration orders, run-length encoded") {
    JumpData j = lower_jumps(make_type(2, {4, 4, 6}));
    REQUIRE(j.filtration.size() == 3);
    CHECK(j.filtration[0].lo == 0);
    CHECK(j.filtration[0].hi == 3);
    CHECK(j.filtration[0].order == 8);
    CHECK(j.filtration[1].lo == 4);
    CHECK(j.filtration[1].hi == 11);
    CHECK(j.filtration[1].order == 2);
    CHECK(j.filtration[2].lo == 12);
    CHECK(j.filtration[2].hi == -1);
    CHECK(j.filtration[2].order == 1);

    JumpData k = lower_jumps(make_type(2, {4, 4, 4}));
    REQUIRE(k.filtration.size() == 2);
    CHECK(k.filtration[0].hi == 3);
    CHECK(k.filtration[0].order == 8);
    CHECK(k.filtration[1].order == 1);
}

TEST_CASE("herbrand graph shape: slopes, continuity, concavity") {
    JumpData j = lower_jumps(make_type(3, {2, 3, 11}));
    REQUIRE(!j.herbrand.empty());
    CHECK(j.herbrand.front().x0 == Rat(0));
    CHECK(j.herbrand.front().y0 == Rat(0));
    CHECK(j.herbrand.front().slope == Rat(1));
    for (std::size_t i = 0; i + 1 < j.herbrand.size(); ++i) {
        const auto& a = j.herbrand[i];
        const auto& b = j.herbrand[i + 1];
        CHECK(b.slope < a.slope);                    // strictly concave corners
        CHECK(a.y0 + a.slope * (b.x0 - a.x0) == b.y0); // continuity
        // each slope is 1/p^k
        Rat s = a.slope;
        CHECK(s.num == 1);
        long long d = s.den;
        while (d % 3 == 0) d /= 3;
        CHECK(d == 1);
    }
    CHECK(j.herbrand.back().x1 == Rat(-1));
}

TEST_CASE("special different runs both routes and matches the spots") {
    CHECK(special_different(make_type(2, {4, 4, 4})) == 28);
    CHECK(special_different(make_type(2, {4, 4, 6})) == 36);
    for (unsigned m : {1u, 5u, 9u})
        CHECK(special_different(make_type(2, {m + 1})) == (long long)(m + 1));
    for (unsigned m : {1u, 2u, 4u})
        CHECK(special_different(make_type(3, {m + 1})) == 2LL * (m + 1));
}

TEST_CASE("generic different, branch counts, and infeasibility as data") {
    DifferentReport a = generic_different(make_type(2, {4, 4, 4}));
    CHECK(a.d_eta == 28);
    CHECK(a.d_s == 28);
    CHECK(a.b_integral);
    CHECK(a.branch_count == 7);
    CHECK(a.criterion_met);

    DifferentReport b = generic_different(make_type(2, {4, 4, 6}));
    CHECK(b.d_eta == 36);
    CHECK(b.b_integral);
    CHECK(b.branch_count == 9);
    CHECK(b.criterion_met);

    DifferentReport c = generic_different(make_type(2, {2, 2, 2}));
    CHECK(c.d_s == 14);
    CHECK(c.d_eta == 14);
    CHECK(!c.b_integral);      // 14/4 is not a whole number of points
    CHECK(!c.criterion_met);

    DifferentReport d = generic_different(make_type(2, {6}));
    CHECK(d.d_eta == 6);
    CHECK(d.branch_count == 6);
}

TEST_CASE("type validation") {
    CHECK_THROWS_AS(make_type(2, {4, 2}), std::invalid_argument);     // not ascending
    CHECK_THROWS_AS(make_type(2, {3}), std::invalid_argument);        // m divisible by p
    CHECK_THROWS_AS(make_type(3, {4, 7}), std::invalid_argument);     // m_2 = 6
    CHECK_THROWS_AS(make_type(2, {}), std::invalid_argument);
    CHECK_THROWS_AS(make_type(2, {1, 2}), std::invalid_argument);     // conductor < 2
}

TEST_CASE("grid: upper jumps equal conductors minus one; routes agree") {
    long long checked = 0;
    for (unsigned p : {2u, 3u, 5u}) {
        for (unsigned n = 1; n <= 4; ++n) {
            unsigned max_c = (n == 4) ? 21 : 41; // keep the full sweep quick
            std::vector<std::vector<unsigned>> types;
            std::vector<unsigned> cur;
            ascending_tuples(n, max_c, p, 2, cur, types);
            for (auto& cond : types) {
                auto t = make_type(p, cond);
                JumpData j = lower_jumps(t); // internal upper == m assertion
                for (unsigned l = 0; l < n; ++l)
                    REQUIRE(j.upper[l] == (long long)cond[l] - 1);
                for (unsigned l = 1; l < n; ++l)
                    REQUIRE(j.lower[l] >= j.lower[l - 1]);
                long long ds = special_different(t); // route agreement asserted
                // third route: sum over the filtration of (|I_u| - 1)
                long long route3 = 0;
                for (auto& r : j.filtration) {
                    if (r.hi < 0) break;
                    route3 += (long long)(r.order - 1) * (r.hi - r.lo + 1);
                }
                REQUIRE(route3 == ds);
                ++checked;
            }
        }
    }
    CHECK(checked > 15000);
}

TEST_CASE("grid: congruence-satisfying types meet the different criterion") {
    long long met = 0;
    for (unsigned p : {2u, 3u, 5u}) {
        for (unsigned n = 1; n <= 4; ++n) {
            std::vector<std::vector<unsigned>> types;
            std::vector<unsigned> cur;
            ascending_tuples(n, 41, p, 2, cur, types);
            for (auto& cond : types) {
                if (!satisfies_congruences(p, cond)) continue;
                DifferentReport r = generic_different(make_type(p, cond));
                REQUIRE(r.d_s == r.d_eta);
                REQUIRE(r.b_integral);
                REQUIRE(r.criterion_met);
                long long unit = p - 1;
                for (unsigned k = 0; k + 1 < n; ++k) unit *= p;
                REQUIRE(r.branch_count * unit == r.d_eta);
                ++met;
            }
        }
    }
    CHECK(met > 500);
}

TEST_CASE("conductor type of an explicit cover feeds the jump machinery") {
    const FiniteField& F = FiniteField::get(2, 1);
    std::vector<ASFunction> fs;
    { // y^2 - y = t^{-3} and z^2 - z = t^{-5} at the same point
        ASFunction f1;
        f1.field = &F;
        f1.local = true;
        ASBranch b;
        b.c = F.zero();
        b.poly[3] = F.one();
        f1.branch.push_back(b);
        ASFunction f2 = f1;
        f2.branch[0].poly.clear();
        f2.branch[0].poly[5] = F.one();
        fs = {f1, f2};
    }
    ConductorType t = conductor_type(fs);
    REQUIRE(t.conductors == std::vector<unsigned>{4, 6});
    JumpData j = lower_jumps(t);
    CHECK(j.lower == std::vector<long long>{3, 7});
    CHECK(special_different(t) == 16);
    DifferentReport r = generic_different(t);
    CHECK(r.branch_count == 8);
}

/* ------------------------------------------------------------------ */
/* Brute-force oracle: build the actual biquadratic extension of       */
/* F_4((t)) as truncated Laurent series, compute i_G(sigma) from the   */
/* Galois action on a uniformizer, and compare with the formulas.      */
/* ------------------------------------------------------------------ */

namespace {

constexpr long kTrunc = 48;

struct LSer {
    const FiniteField* F = nullptr;
    std::map<long, FFElem> c;

    void put(long e, const FFElem& v) {
        if (e >= kTrunc) return;
        auto it = c.find(e);
        if (it == c.end()) {
            if (!F->is_zero(v)) c.emplace(e, v);
        } else {
            FFElem s = F->add(it->second, v);
            if (F->is_zero(s)) c.erase(it);
            else it->second = s;
        }
    }
    bool zero() const { return c.empty(); }
    long val() const {
        REQUIRE(!c.empty());
        return c.begin()->first;
    }
};

LSer ls_zero(const FiniteField& F) { return LSer{&F, {}}; }

LSer ls_mono(const FiniteField& F, long e, const FFElem& v) {
    LSer s{&F, {}};
    s.put(e, v);
    return s;
}

LSer ls_add(const LSer& a, const LSer& b) {
    LSer r = a;
    for (auto& [e, v] : b.c) r.put(e, v);
    return r;
}

LSer ls_mul(const LSer& a, const LSer& b) {
    LSer r{a.F, {}};
    for (auto& [e1, v1] : a.c)
        for (auto& [e2, v2] : b.c)
            r.put(e1 + e2, a.F->mul(v1, v2));
    return r;
}

/* Element of K[y1,y2] with y_i^2 = y_i + f_i; component index a + 2b
 * holds the coefficient of y1^a y2^b. */
struct LElem {
    std::array<LSer, 4> comp;
};

struct BiquadField {
    const FiniteField* F;
    LSer f1, f2;

    LElem zero() const { return LElem{{ls_zero(*F), ls_zero(*F), ls_zero(*F), ls_zero(*F)}}; }

    LElem add(const LElem& x, const LElem& y) const {
        LElem r = zero();
        for (int i = 0; i < 4; ++i) r.comp[i] = ls_add(x.comp[i], y.comp[i]);
        return r;
    }

    /* multiply, reducing y1^2 = y1 + f1 and y2^2 = y2 + f2 */
    LElem mul(const LElem& x, const LElem& y) const {
        struct Term {
            LSer s;
            int a, b;
        };
        LElem r = zero();
        for (int i = 0; i < 4; ++i) {
            if (x.comp[i].zero()) continue;
            for (int j = 0; j < 4; ++j) {
                if (y.comp[j].zero()) continue;
                LSer coeff = ls_mul(x.comp[i], y.comp[j]);
                int a = (i & 1) + (j & 1);   // power of y1 before reduction
                int b = (i >> 1) + (j >> 1); // power of y2
                std::vector<Term> terms{{coeff, a, b}};
                if (a == 2) {
                    terms.clear();
                    terms.push_back({coeff, 1, b});
                    terms.push_back({ls_mul(coeff, f1), 0, b});
                }
                std::vector<Term> fin;
                for (auto& t : terms) {
                    if (t.b == 2) {
                        fin.push_back({t.s, t.a, 1});
                        fin.push_back({ls_mul(t.s, f2), t.a, 0});
                    } else {
                        fin.push_back(t);
                    }
                }
                for (auto& t : fin) {
                    int idx = t.a | (t.b << 1);
                    r.comp[idx] = ls_add(r.comp[idx], t.s);
                }
            }
        }
        return r;
    }

    /* sigma_{e1,e2}: y1 -> y1 + e1, y2 -> y2 + e2 (e_i in {0,1}) */
    LElem galois(const LElem& x, int e1, int e2) const {
        LElem r = zero();
        auto addin = [&](int idx, const LSer& s) { r.comp[idx] = ls_add(r.comp[idx], s); };
        // (y1+e1)^a (y2+e2)^b expanded for a,b in {0,1}
        addin(0, x.comp[0]);
        addin(1, x.comp[1]);
        if (e1) addin(0, x.comp[1]);
        addin(2, x.comp[2]);
        if (e2) addin(0, x.comp[2]);
        addin(3, x.comp[3]);
        if (e2) addin(1, x.comp[3]);
        if (e1) addin(2, x.comp[3]);
        if (e1 && e2) addin(0, x.comp[3]);
        return r;
    }

    /* norm to K: product over the four Galois conjugates; the result must
     * have no y-components */
    LSer norm(const LElem& x) const {
        LElem acc = x;
        acc = mul(acc, galois(x, 1, 0));
        acc = mul(acc, galois(x, 0, 1));
        acc = mul(acc, galois(x, 1, 1));
        REQUIRE(acc.comp[1].zero());
        REQUIRE(acc.comp[2].zero());
        REQUIRE(acc.comp[3].zero());
        return acc.comp[0];
    }

    long vL(const LElem& x) const { return norm(x).val(); }
};

/* search for an element of valuation exactly 1 */
LElem find_uniformizer(const BiquadField& L, std::mt19937& rng) {
    const FiniteField& F = *L.F;
    std::uniform_int_distribution<int> pick(0, 3);
    std::uniform_int_distribution<long> expo(-2, 4);
    std::uniform_int_distribution<unsigned> coef(0, F.q() - 1);
    for (int attempt = 0; attempt < 5000; ++attempt) {
        LElem z = L.zero();
        bool any = false;
        for (int i = 0; i < 4; ++i) {
            if (pick(rng) == 0) continue;
            unsigned ci = coef(rng);
            if (ci == 0) continue;
            z.comp[i] = ls_mono(F, expo(rng), F.from_index(ci));
            any = true;
        }
        if (!any) continue;
        LSer n = L.norm(z);
        if (!n.zero() && n.val() == 1) return z;
    }
    REQUIRE_MESSAGE(false, "no uniformizer found by random search");
    return L.zero();
}

void oracle_check(const LSer& f1, const LSer& f2,
                  const std::vector<unsigned>& conductors,
                  const std::vector<long long>& expected_i) {
    const FiniteField& F = *f1.F;
    BiquadField L{&F, f1, f2};
    std::mt19937 rng(20260823);
    LElem z = find_uniformizer(L, rng);

    std::vector<long long> ivals;
    for (auto [e1, e2] : std::vector<std::pair<int, int>>{{1, 0}, {0, 1}, {1, 1}}) {
        LElem d = L.add(L.galois(z, e1, e2), z); // char 2: difference = sum
        ivals.push_back(L.vL(d));
    }
    std::sort(ivals.begin(), ivals.end());
    CHECK(ivals == expected_i);

    auto t = make_type(2, conductors);
    JumpData j = lower_jumps(t);
    long long ds = 0;
    for (long long i : ivals) ds += i;
    CHECK(ds == special_different(t));

    /* filtration orders from the i-values: |I_u| = 1 + #{sigma : i >= u+1} */
    for (long long u = 0; u <= 14; ++u) {
        unsigned long long order = 1;
        for (long long i : ivals)
            if (i >= u + 1) ++order;
        unsigned long long formula = 0;
        for (auto& r : j.filtration)
            if (u >= r.lo && (r.hi < 0 || u <= r.hi)) formula = r.order;
        CHECK(order == formula);
    }
}

} // namespace

TEST_CASE("biquadratic Galois-action oracle over F_4((t))") {
    const FiniteField& F4 = FiniteField::get(2, 2);
    FFElem w = F4.gen();

    SUBCASE("type (2,2): y^2+y = 1/t and y^2+y = w/t") {
        oracle_check(ls_mono(F4, -1, F4.one()), ls_mono(F4, -1, w),
                     {2, 2}, {2, 2, 2});
    }
    SUBCASE("type (2,4): y^2+y = 1/t and y^2+y = 1/t^3") {
        oracle_check(ls_mono(F4, -1, F4.one()), ls_mono(F4, -3, F4.one()),
                     {2, 4}, {2, 2, 6});
    }
    SUBCASE("type (4,4): y^2+y = 1/t^3 and y^2+y = w/t^3") {
        oracle_check(ls_mono(F4, -3, F4.one()), ls_mono(F4, -3, w),
                     {4, 4}, {4, 4, 4});
    }
}
