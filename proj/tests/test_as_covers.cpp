#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ascend/as_covers.hpp"

#include <random>

using namespace ascend;

namespace {

ASFunction local2(const FiniteField& F, std::initializer_list<std::pair<unsigned, unsigned long>> terms) {
    std::map<unsigned, FFElem> poly;
    for (auto [j, idx] : terms) poly.emplace(j, F.from_index(idx));
    return as_local(F, std::move(poly));
}

/* Check f_in - f_out = w^p - w as formal polar sums (same branch layout). */
bool equivalent_by_witness(const ASFunction& fin, const NormalizeResult& nr) {
    const auto& F = *fin.field;
    auto [pw, cw] = as_operator_image(F, nr.witness_polar, nr.witness_const);
    // assemble fin - fout - (w^p - w) and check it vanishes
    std::map<std::pair<unsigned long, unsigned>, FFElem> acc;
    auto fold = [&](const std::vector<ASBranch>& bs, bool negate) {
        for (const auto& b : bs)
            for (const auto& [j, a] : b.poly) {
                auto key = std::make_pair(F.index(b.c), j);
                FFElem v = negate ? F.neg(a) : a;
                auto it = acc.find(key);
                if (it == acc.end())
                    acc.emplace(key, v);
                else
                    it->second = F.add(it->second, v);
            }
    };
    fold(fin.branch, false);
    fold(nr.reduced.branch, true);
    fold(pw, true);
    if (!F.is_zero(cw)) return false;
    for (const auto& [k, v] : acc)
        if (!F.is_zero(v)) return false;
    return true;
}

} // namespace

TEST_CASE("normalization: reduction of p-divisible exponents with witness") {
    const auto& F2 = FiniteField::get(2, 1);

    auto r1 = normalize(local2(F2, {{2, 1}}));
    REQUIRE(r1.reduced.branch.size() == 1);
    CHECK(r1.reduced.branch[0].poly.size() == 1);
    CHECK(r1.reduced.branch[0].poly.count(1) == 1);
    REQUIRE(r1.witness_polar.size() == 1);
    CHECK(r1.witness_polar[0].poly.count(1) == 1); // witness t^{-1}
    CHECK(equivalent_by_witness(local2(F2, {{2, 1}}), r1));

    auto r2 = normalize(local2(F2, {{3, 1}}));
    CHECK(r2.reduced.branch[0].poly.count(3) == 1);
    CHECK(r2.reduced.branch[0].poly.size() == 1);
    for (const auto& b : r2.witness_polar) CHECK(b.poly.empty());

    auto f3 = local2(F2, {{4, 1}, {3, 1}});
    auto r3 = normalize(f3);
    CHECK(r3.reduced.branch[0].poly.size() == 2);
    CHECK(r3.reduced.branch[0].poly.count(3) == 1);
    CHECK(r3.reduced.branch[0].poly.count(1) == 1);
    CHECK(equivalent_by_witness(f3, r3));
    // idempotence
    auto r3b = normalize(r3.reduced);
    CHECK(r3b.reduced.branch[0].poly == r3.reduced.branch[0].poly);
}

TEST_CASE("normalization: random equivalence and conductor invariance") {
    const auto& F4 = FiniteField::get(2, 2);
    std::mt19937 rng(31);
    std::uniform_int_distribution<unsigned> jd(1, 9);
    std::uniform_int_distribution<unsigned long> cd(0, 3);
    for (int trial = 0; trial < 200; ++trial) {
        std::map<unsigned, FFElem> poly;
        for (int t = 0; t < 4; ++t) {
            auto c = F4.from_index(cd(rng));
            if (F4.is_zero(c)) continue;
            unsigned j = jd(rng);
            auto it = poly.find(j);
            if (it == poly.end())
                poly.emplace(j, c);
            else
                it->second = F4.add(it->second, c);
        }
        if (poly.empty()) continue;
        auto f = as_local(F4, poly);
        if (f.trivial) continue;
        auto nf = normalize(f);
        CHECK(equivalent_by_witness(f, nf));
        if (nf.reduced.trivial) continue;
        unsigned c0 = conductor(nf.reduced);
        // add an ℘-image of a random witness: conductor must not move
        std::map<unsigned, FFElem> wpoly;
        for (int t = 0; t < 2; ++t) {
            auto c = F4.from_index(cd(rng));
            if (!F4.is_zero(c)) wpoly.emplace(jd(rng), c);
        }
        ASBranch wb;
        wb.c = F4.zero();
        wb.poly = wpoly;
        auto [img, imgc] = as_operator_image(F4, {wb}, F4.zero());
        auto fplus = f;
        for (const auto& [j, a] : img[0].poly) {
            auto it = fplus.branch[0].poly.find(j);
            if (it == fplus.branch[0].poly.end())
                fplus.branch[0].poly.emplace(j, a);
            else
                it->second = F4.add(it->second, a);
        }
        auto nf2 = normalize(fplus);
        if (!nf2.reduced.trivial) {
            unsigned new_deg = 0;
            for (auto& [j, a] : nf2.reduced.branch[0].poly) new_deg = std::max(new_deg, j);
            bool wit_tops = false;
            for (auto& [j, a] : wpoly)
                if (j >= new_deg && j > 1) wit_tops = true;
            if (!wit_tops) CHECK(conductor(nf2.reduced) == c0);
        }
    }
}

TEST_CASE("constant elimination, with residue enlargement when the trace obstructs") {
    const auto& F2 = FiniteField::get(2, 1);
    auto f = local2(F2, {{3, 1}});
    // constant 0: nothing happens
    auto r0 = normalize_with_constant(f, F2.zero());
    CHECK_FALSE(r0.enlarged);
    CHECK(F2.is_zero(r0.witness_const));
    // constant 1 over F_2: trace 1, needs F_4; w^2 + w = 1 has w = omega
    auto r1 = normalize_with_constant(f, F2.one());
    CHECK(r1.enlarged);
    const auto& F4 = *r1.reduced.field;
    CHECK(F4.m() == 2);
    CHECK(F4.sub(F4.pow(r1.witness_const, 2), r1.witness_const) == F4.one());
    // over F_4 the constant 1 has trace 0 already: no enlargement
    auto g = local2(F4, {{3, 1}});
    auto r2 = normalize_with_constant(g, F4.one());
    CHECK_FALSE(r2.enlarged);
    CHECK(F4.sub(F4.pow(r2.witness_const, 2), r2.witness_const) == F4.one());
}

TEST_CASE("conductors of local covers") {
    const auto& F4 = FiniteField::get(2, 2);
    CHECK(conductor(local2(F4, {{3, 1}})) == 4);
    CHECK(conductor(local2(F4, {{1, 1}})) == 2);
    auto f = as_local(F4, {{5, F4.one()}, {3, F4.gen()}});
    CHECK(conductor(f) == 6);
    CHECK_THROWS_AS(conductor(local2(F4, {{4, 1}})), std::invalid_argument);
    CHECK_THROWS_AS(conductor(local2(F4, {{6, 1}, {3, 1}})), std::invalid_argument);
}

TEST_CASE("conductor type: line enumeration and canonical witness") {
    const auto& F2 = FiniteField::get(2, 1);
    auto f1 = local2(F2, {{3, 1}});
    auto f2 = local2(F2, {{3, 1}, {5, 1}});
    auto ct = conductor_type({f1, f2});
    CHECK(ct.p == 2);
    CHECK(ct.n == 2);
    CHECK(ct.conductors == std::vector<unsigned>{4, 6});
    // witness basis is {t^{-3}, t^{-5}}: pure monomial beats t^{-5}+t^{-3}
    REQUIRE(ct.witness_basis.size() == 2);
    CHECK(ct.witness_basis[0].branch[0].poly.size() == 1);
    CHECK(ct.witness_basis[0].branch[0].poly.count(3) == 1);
    CHECK(ct.witness_basis[1].branch[0].poly.size() == 1);
    CHECK(ct.witness_basis[1].branch[0].poly.count(5) == 1);
}

TEST_CASE("conductor type over F_4: equal and mixed conductors") {
    const auto& F4 = FiniteField::get(2, 2);
    auto w = F4.gen();
    auto f1 = as_local(F4, {{3, F4.one()}});
    auto f2 = as_local(F4, {{3, w}});
    auto ct = conductor_type({f1, f2});
    CHECK(ct.conductors == std::vector<unsigned>{4, 4});
    // leading coefficients of the witness basis stay F_2-independent
    auto l1 = ct.witness_basis[0].branch[0].poly.at(3);
    auto l2 = ct.witness_basis[1].branch[0].poly.at(3);
    CHECK(l1 != l2);
    CHECK(l1 != F4.add(l2, l2)); // l2 != 0 and l1 != 0 by construction

    auto f3 = as_local(F4, {{5, F4.one()}});
    auto ct3 = conductor_type({f1, f2, f3});
    CHECK(ct3.conductors == std::vector<unsigned>{4, 4, 6});
    CHECK_THROWS_AS(conductor_type({f1, f1}), std::invalid_argument);
}

TEST_CASE("conductor type: greedy equals brute force and is basis independent") {
    const auto& F4 = FiniteField::get(2, 2);
    std::mt19937 rng(555);
    std::uniform_int_distribution<unsigned> jd(1, 7);
    std::uniform_int_distribution<unsigned long> cd(1, 3);
    std::uniform_int_distribution<unsigned> bit(0, 1);
    int done = 0;
    while (done < 60) {
        unsigned n = 2 + (bit(rng) & 1);
        std::vector<ASFunction> fs;
        for (unsigned i = 0; i < n; ++i) {
            std::map<unsigned, FFElem> poly;
            poly.emplace(jd(rng) | 1u, F4.from_index(cd(rng))); // odd exponent
            if (bit(rng)) poly.emplace(jd(rng) | 1u, F4.from_index(cd(rng)));
            fs.push_back(as_local(F4, std::move(poly)));
        }
        ConductorType greedy;
        try {
            greedy = conductor_type(fs);
        } catch (const std::invalid_argument&) {
            continue; // dependent sample
        }
        ++done;

        // brute force: all independent n-subsets of lines, minimal tuple
        std::vector<std::vector<unsigned>> lambdas;
        std::vector<unsigned> conds;
        unsigned long total = 1;
        for (unsigned i = 0; i < n; ++i) total *= 2;
        for (unsigned long code = 1; code < total; ++code) {
            std::vector<unsigned> lam(n);
            for (unsigned i = 0; i < n; ++i) lam[i] = (code >> i) & 1;
            // p=2: every nonzero vector is its line's representative
            std::map<unsigned, FFElem> acc;
            for (unsigned i = 0; i < n; ++i) {
                if (!lam[i]) continue;
                for (const auto& [j, a] : fs[i].branch[0].poly) {
                    auto it = acc.find(j);
                    if (it == acc.end())
                        acc.emplace(j, a);
                    else
                        it->second = F4.add(it->second, a);
                }
            }
            auto nr = normalize(as_local(F4, std::move(acc)));
            REQUIRE_FALSE(nr.reduced.trivial);
            lambdas.push_back(lam);
            conds.push_back(conductor(nr.reduced));
        }
        std::vector<unsigned> bestTuple;
        std::vector<std::size_t> idx(lambdas.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        // enumerate all n-subsets
        std::vector<std::size_t> pick(n);
        std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t at, std::size_t from) {
            if (at == n) {
                // independence over F_2
                std::vector<std::vector<unsigned>> rows;
                for (auto i : pick) rows.push_back(lambdas[i]);
                std::vector<std::vector<unsigned>> R = rows;
                unsigned rank = 0;
                for (unsigned col = 0; col < n; ++col) {
                    std::size_t sel = R.size();
                    for (std::size_t r = rank; r < R.size(); ++r)
                        if (R[r][col]) { sel = r; break; }
                    if (sel == R.size()) continue;
                    std::swap(R[rank], R[sel]);
                    for (std::size_t r = 0; r < R.size(); ++r)
                        if (r != rank && R[r][col])
                            for (unsigned c2 = 0; c2 < n; ++c2) R[r][c2] ^= R[rank][c2];
                    ++rank;
                }
                if (rank != n) return;
                std::vector<unsigned> tuple;
                for (auto i : pick) tuple.push_back(conds[i]);
                std::sort(tuple.begin(), tuple.end());
                if (bestTuple.empty() || tuple < bestTuple) bestTuple = tuple;
                return;
            }
            for (std::size_t i = from; i < idx.size(); ++i) {
                pick[at] = i;
                rec(at + 1, i + 1);
            }
        };
        rec(0, 0);
        CHECK(greedy.conductors == bestTuple);

        // basis independence: apply a random invertible F_2 matrix
        std::vector<std::vector<unsigned>> M;
        do {
            M.assign(n, std::vector<unsigned>(n));
            for (auto& row : M)
                for (auto& x : row) x = bit(rng);
            // rank check
            auto R = M;
            unsigned rank = 0;
            for (unsigned col = 0; col < n; ++col) {
                std::size_t sel = R.size();
                for (std::size_t r = rank; r < R.size(); ++r)
                    if (R[r][col]) { sel = r; break; }
                if (sel == R.size()) continue;
                std::swap(R[rank], R[sel]);
                for (std::size_t r = 0; r < R.size(); ++r)
                    if (r != rank && R[r][col])
                        for (unsigned c2 = 0; c2 < n; ++c2) R[r][c2] ^= R[rank][c2];
                ++rank;
            }
            if (rank == n) break;
        } while (true);
        std::vector<ASFunction> gs;
        for (unsigned i = 0; i < n; ++i) {
            std::map<unsigned, FFElem> acc;
            for (unsigned k = 0; k < n; ++k) {
                if (!M[i][k]) continue;
                for (const auto& [j, a] : fs[k].branch[0].poly) {
                    auto it = acc.find(j);
                    if (it == acc.end())
                        acc.emplace(j, a);
                    else
                        it->second = F4.add(it->second, a);
                }
            }
            gs.push_back(as_local(F4, std::move(acc)));
        }
        auto ct2 = conductor_type(gs);
        CHECK(ct2.conductors == greedy.conductors);
    }
}

TEST_CASE("global invariants: profiles, p-rank, genus") {
    const auto& F2 = FiniteField::get(2, 1);
    // y^2 - y = 1/x^3
    ASBranch b0{F2.zero(), {{3, F2.one()}}};
    auto f1 = as_global(F2, {b0});
    auto inv1 = cover_invariants(f1);
    CHECK(inv1.profile == std::vector<unsigned>{4});
    CHECK(inv1.s == 0);
    CHECK(inv1.g == 1);
    CHECK(inv1.d == 2);
    CHECK(inv1.r == 0);

    // y^2 - y = 1/x + 1/(x-1)
    ASBranch c0{F2.zero(), {{1, F2.one()}}};
    ASBranch c1{F2.one(), {{1, F2.one()}}};
    auto f2 = as_global(F2, {c0, c1});
    auto inv2 = cover_invariants(f2);
    CHECK(inv2.profile == std::vector<unsigned>{2, 2});
    CHECK(inv2.s == 1);
    CHECK(inv2.g == 1);

    // p=3: y^3 - y = 1/x^2 + 1/(x-1)^2
    const auto& F3 = FiniteField::get(3, 1);
    ASBranch d0{F3.zero(), {{2, F3.one()}}};
    ASBranch d1{F3.one(), {{2, F3.one()}}};
    auto f3 = as_global(F3, {d0, d1});
    auto inv3 = cover_invariants(f3);
    CHECK(inv3.profile == std::vector<unsigned>{3, 3});
    CHECK(inv3.s == 2);
    CHECK(inv3.g == 4);
    CHECK(inv3.d == 4);
    CHECK(2 * inv3.g == static_cast<unsigned long>(inv3.d) * (3 - 1));

    // invariant relations on random reduced covers
    std::mt19937 rng(9);
    std::uniform_int_distribution<unsigned long> cd(1, 2);
    std::uniform_int_distribution<unsigned> jd(1, 4);
    for (int t = 0; t < 100; ++t) {
        std::vector<ASBranch> bs;
        unsigned nb = 1 + jd(rng) % 3;
        for (unsigned i = 0; i < nb; ++i) {
            unsigned j = jd(rng);
            if (j % 3 == 0) j = 2;
            bs.push_back(ASBranch{F3.from_index(i), {{j, F3.from_index(cd(rng))}}});
        }
        auto inv = cover_invariants(as_global(F3, bs));
        for (unsigned ei : inv.profile) CHECK(ei % 3 != 1);
        CHECK(2 * inv.g == static_cast<unsigned long>(inv.d) * 2);
        CHECK(inv.s == (inv.profile.size() - 1) * 2);
    }
}

TEST_CASE("translation moves branch points") {
    const auto& F4 = FiniteField::get(2, 2);
    ASBranch b{F4.zero(), {{3, F4.one()}}};
    auto f = as_global(F4, {b});
    auto g = translate(f, F4.gen());
    CHECK(g.branch[0].c == F4.gen());
    auto h = translate(g, F4.gen());
    CHECK(F4.is_zero(h.branch[0].c)); // characteristic 2
}
