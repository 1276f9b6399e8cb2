#include "ascend/as_covers.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ascend {

namespace {

void check_field(const ASFunction& f) {
    if (!f.field) throw std::invalid_argument("cover without a residue field");
    for (const auto& b : f.branch) {
        if (b.c.field != f.field) throw std::invalid_argument("branch point from a different field");
        for (const auto& [j, a] : b.poly) {
            if (a.field != f.field)
                throw std::invalid_argument("coefficient from a different field");
            if (j == 0) throw std::invalid_argument("polar part with a constant term slot");
        }
    }
}

void drop_zero_terms(const FiniteField& F, std::map<unsigned, FFElem>& poly) {
    for (auto it = poly.begin(); it != poly.end();) {
        if (F.is_zero(it->second))
            it = poly.erase(it);
        else
            ++it;
    }
}

/* Merge branches with equal points, drop empty polar parts, sort branch
 * points by element index for a canonical layout. */
ASFunction tidy(ASFunction f) {
    const auto& F = *f.field;
    std::map<unsigned long, ASBranch> merged;
    for (auto& b : f.branch) {
        drop_zero_terms(F, b.poly);
        if (b.poly.empty()) continue;
        auto key = F.index(b.c);
        auto it = merged.find(key);
        if (it == merged.end()) {
            merged.emplace(key, std::move(b));
        } else {
            for (const auto& [j, a] : b.poly) {
                auto jt = it->second.poly.find(j);
                if (jt == it->second.poly.end())
                    it->second.poly.emplace(j, a);
                else
                    jt->second = F.add(jt->second, a);
            }
            drop_zero_terms(F, it->second.poly);
            if (it->second.poly.empty()) merged.erase(it);
        }
    }
    f.branch.clear();
    for (auto& [k, b] : merged) f.branch.push_back(std::move(b));
    f.trivial = f.branch.empty();
    return f;
}

ASFunction embed_cover(const ASFunction& f, const FiniteField& big) {
    const auto& emb = FieldEmbedding::get(*f.field, big);
    ASFunction g;
    g.field = &big;
    g.local = f.local;
    g.trivial = f.trivial;
    for (const auto& b : f.branch) {
        ASBranch nb;
        nb.c = emb.apply(b.c);
        for (const auto& [j, a] : b.poly) nb.poly.emplace(j, emb.apply(a));
        g.branch.push_back(std::move(nb));
    }
    return g;
}

} // namespace

ASFunction as_local(const FiniteField& F, std::map<unsigned, FFElem> poly) {
    ASFunction f;
    f.field = &F;
    f.local = true;
    ASBranch b;
    b.c = F.zero();
    b.poly = std::move(poly);
    f.branch.push_back(std::move(b));
    check_field(f);
    return tidy(std::move(f));
}

ASFunction as_global(const FiniteField& F, std::vector<ASBranch> branches) {
    ASFunction f;
    f.field = &F;
    f.local = false;
    f.branch = std::move(branches);
    check_field(f);
    return tidy(std::move(f));
}

std::pair<std::vector<ASBranch>, FFElem> as_operator_image(const FiniteField& F,
                                                           const std::vector<ASBranch>& polar,
                                                           const FFElem& cst) {
    // (sum_i a_i u^{-j_i} + c)^p - (...) = sum_i (a_i^p u^{-p j_i} - a_i u^{-j_i})
    //                                      + (c^p - c): the p-th power is
    // additive in characteristic p.
    std::vector<ASBranch> out;
    for (const auto& b : polar) {
        ASBranch nb;
        nb.c = b.c;
        for (const auto& [j, a] : b.poly) {
            FFElem ap = F.pow(a, F.p());
            auto it = nb.poly.find(j * F.p());
            if (it == nb.poly.end())
                nb.poly.emplace(j * F.p(), ap);
            else
                it->second = F.add(it->second, ap);
            auto jt = nb.poly.find(j);
            if (jt == nb.poly.end())
                nb.poly.emplace(j, F.neg(a));
            else
                jt->second = F.sub(jt->second, a);
        }
        drop_zero_terms(F, nb.poly);
        out.push_back(std::move(nb));
    }
    return {std::move(out), F.sub(F.pow(cst, F.p()), cst)};
}

NormalizeResult normalize(const ASFunction& f_in) {
    check_field(f_in);
    ASFunction f = tidy(f_in);
    const FiniteField* F = f.field;
    unsigned p = F->p();

    // Polar reduction: a u^{-pk} = (a^{1/p} u^{-k})^p - a^{1/p} u^{-k}
    //                  + a^{1/p} u^{-k}, so replacing the term by
    // a^{1/p} u^{-k} changes f by an ℘-image; iterate top-down.
    std::vector<ASBranch> witness;
    for (auto& b : f.branch) {
        ASBranch wb;
        wb.c = b.c;
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto it = b.poly.rbegin(); it != b.poly.rend(); ++it) {
                unsigned j = it->first;
                if (j % p != 0) continue;
                FFElem a = it->second;
                unsigned k = j / p;
                FFElem root = F->frobenius_inv(a); // a^{1/p}
                b.poly.erase(std::next(it).base());
                auto jt = b.poly.find(k);
                if (jt == b.poly.end())
                    b.poly.emplace(k, root);
                else
                    jt->second = F->add(jt->second, root);
                auto wt = wb.poly.find(k);
                if (wt == wb.poly.end())
                    wb.poly.emplace(k, root);
                else
                    wt->second = F->add(wt->second, root);
                drop_zero_terms(*F, b.poly);
                changed = true;
                break;
            }
        }
        witness.push_back(std::move(wb));
    }

    NormalizeResult out;
    out.witness_const = F->zero();
    out.reduced = tidy(std::move(f));
    out.reduced.field = F;
    out.witness_polar = std::move(witness);
    out.enlarged = false;
    return out;
}

unsigned conductor(const ASFunction& f) {
    check_field(f);
    if (!f.local || f.branch.size() > 1)
        throw std::invalid_argument("conductor is defined for a local cover");
    if (f.trivial || f.branch.empty())
        throw std::invalid_argument("conductor of the trivial cover is undefined");
    const auto& poly = f.branch[0].poly;
    unsigned deg = 0;
    for (const auto& [j, a] : poly) {
        if (j % f.field->p() == 0)
            throw std::invalid_argument("conductor requires a reduced cover (exponent divisible by p)");
        deg = std::max(deg, j);
    }
    return deg + 1;
}

namespace {

/* Scalar combination of local covers: sum_i lambda_i f_i with lambda in F_p. */
ASFunction combine(const std::vector<ASFunction>& fs, const std::vector<unsigned>& lambda) {
    const FiniteField& F = *fs[0].field;
    std::map<unsigned, FFElem> acc;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (lambda[i] == 0) continue;
        for (const auto& [j, a] : fs[i].branch[0].poly) {
            FFElem scaled = F.zero();
            for (unsigned k = 0; k < lambda[i]; ++k) scaled = F.add(scaled, a);
            auto it = acc.find(j);
            if (it == acc.end())
                acc.emplace(j, scaled);
            else
                it->second = F.add(it->second, scaled);
        }
    }
    return as_local(F, std::move(acc));
}

/* Tiebreak among lines with equal conductor: descending exponent
 * sequence, lexicographic with a shorter sequence preferred at a common
 * prefix (so a pure monomial t^{-5} beats t^{-5} + t^{-3}). */
std::vector<unsigned> descending_exponents(const ASFunction& f) {
    std::vector<unsigned> e;
    for (const auto& [j, a] : f.branch[0].poly) e.push_back(j);
    std::sort(e.rbegin(), e.rend());
    return e;
}

} // namespace

ConductorType conductor_type(const std::vector<ASFunction>& fs) {
    if (fs.empty()) throw std::invalid_argument("conductor type of an empty family");
    const FiniteField& F = *fs[0].field;
    unsigned p = F.p();
    unsigned n = static_cast<unsigned>(fs.size());
    for (const auto& f : fs) {
        if (f.field != &F) throw std::invalid_argument("covers over different residue fields");
        if (!f.local || f.branch.size() != 1)
            throw std::invalid_argument("conductor type needs local covers at a common point");
    }

    // Enumerate the (p^n - 1)/(p - 1) lines of the F_p-span: nonzero
    // lambda with first nonzero entry = 1.
    struct Line {
        std::vector<unsigned> lambda;
        ASFunction reduced;
        unsigned cond;
        std::vector<unsigned> exps;
    };
    std::vector<Line> lines;
    std::vector<unsigned> lambda(n, 0);
    unsigned long total = 1;
    for (unsigned i = 0; i < n; ++i) total *= p;
    for (unsigned long code = 1; code < total; ++code) {
        unsigned long t = code;
        for (unsigned i = 0; i < n; ++i) {
            lambda[i] = static_cast<unsigned>(t % p);
            t /= p;
        }
        unsigned first = 0;
        while (first < n && lambda[first] == 0) ++first;
        if (lambda[first] != 1) continue; // one representative per line
        auto combo = combine(fs, lambda);
        auto norm = normalize(combo);
        if (norm.reduced.trivial)
            throw std::invalid_argument("dependent cover classes: a combination is trivial");
        Line L;
        L.lambda = lambda;
        L.cond = conductor(norm.reduced);
        L.exps = descending_exponents(norm.reduced);
        L.reduced = std::move(norm.reduced);
        lines.push_back(std::move(L));
    }

    std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
        if (a.cond != b.cond) return a.cond < b.cond;
        return std::lexicographical_compare(a.exps.begin(), a.exps.end(), b.exps.begin(),
                                            b.exps.end());
    });

    // Greedy matroid selection over the lambda coordinates.
    ConductorType out;
    out.p = p;
    out.n = n;
    std::vector<std::vector<unsigned>> basis; // row-echelon over F_p
    auto reduce_vec = [&](std::vector<unsigned> v) {
        for (const auto& row : basis) {
            unsigned pivot = 0;
            while (pivot < n && row[pivot] == 0) ++pivot;
            if (pivot == n || v[pivot] == 0) continue;
            unsigned c = v[pivot]; // row has pivot value 1
            for (unsigned i = 0; i < n; ++i) v[i] = (v[i] + (p - c) * row[i]) % p;
        }
        return v;
    };
    for (auto& L : lines) {
        auto v = reduce_vec(L.lambda);
        if (std::all_of(v.begin(), v.end(), [](unsigned x) { return x == 0; })) continue;
        unsigned pivot = 0;
        while (v[pivot] == 0) ++pivot;
        unsigned inv = 1;
        for (unsigned k = 0; k < p - 2; ++k) inv = (inv * v[pivot]) % p;
        for (unsigned i = 0; i < n; ++i) v[i] = (v[i] * inv) % p;
        basis.push_back(v);
        out.conductors.push_back(L.cond);
        out.witness_basis.push_back(L.reduced);
        if (basis.size() == n) break;
    }
    if (out.conductors.size() != n)
        throw std::invalid_argument("dependent cover classes");
    return out;
}

CoverInvariants cover_invariants(const ASFunction& f) {
    check_field(f);
    if (f.trivial || f.branch.empty())
        throw std::invalid_argument("invariants need at least one branch point");
    unsigned p = f.field->p();
    CoverInvariants out;
    out.p = p;
    for (const auto& b : f.branch) {
        unsigned deg = 0;
        for (const auto& [j, a] : b.poly) {
            if (j % p == 0)
                throw std::invalid_argument("invariants require a reduced cover");
            deg = std::max(deg, j);
        }
        out.profile.push_back(deg + 1);
    }
    std::sort(out.profile.rbegin(), out.profile.rend());
    unsigned nb = static_cast<unsigned>(f.branch.size());
    out.r = nb - 1;
    out.s = (nb - 1) * (p - 1);
    unsigned sum = std::accumulate(out.profile.begin(), out.profile.end(), 0u);
    out.d = sum - 2;
    out.g = static_cast<unsigned long>(p - 1) * out.d / 2;
    return out;
}

ASFunction translate(const ASFunction& f, const FFElem& a) {
    check_field(f);
    ASFunction g = f;
    for (auto& b : g.branch) b.c = f.field->add(b.c, a);
    return tidy(std::move(g));
}

NormalizeResult normalize_with_constant(const ASFunction& f_in, const FFElem& cst) {
    const FiniteField* F = f_in.field;
    if (cst.field != F) throw std::invalid_argument("constant from a different field");
    if (F->is_zero(cst)) return normalize(f_in);
    auto w0 = F->artin_schreier_solve(cst);
    if (w0) {
        auto out = normalize(f_in);
        out.witness_const = *w0;
        return out;
    }
    // Trace obstruction: in F_{q^p} the trace of cst down to F_p picks up
    // a factor p and vanishes, so one p-fold enlargement always suffices.
    const FiniteField& big = FiniteField::get(F->p(), F->m() * F->p());
    const auto& emb = FieldEmbedding::get(*F, big);
    auto lifted = embed_cover(f_in, big);
    auto out = normalize(lifted);
    auto wbig = big.artin_schreier_solve(emb.apply(cst));
    if (!wbig) throw std::logic_error("trace obstruction persisted after enlargement");
    out.witness_const = *wbig;
    out.enlarged = true;
    return out;
}

} // namespace ascend
