#include "ascend/branch_cycle.hpp"

#include "ascend/ramification.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ascend {

namespace {

long long ipow_ll(long long b, unsigned e) {
    long long r = 1;
    while (e--) r *= b;
    return r;
}

std::string subset_str(const std::vector<unsigned>& s) {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << "}";
    return os.str();
}

std::vector<unsigned> mask_to_subset(unsigned mask, unsigned n) {
    std::vector<unsigned> s;
    for (unsigned i = 1; i <= n; ++i)
        if (mask & (1u << (i - 1))) s.push_back(i);
    return s;
}

/* masks of {1..n} ordered by popcount, then numerically */
std::vector<unsigned> ordered_masks(unsigned n) {
    std::vector<unsigned> out;
    for (unsigned size = 1; size <= n; ++size)
        for (unsigned mask = 1; mask < (1u << n); ++mask)
            if (static_cast<unsigned>(__builtin_popcount(mask)) == size)
                out.push_back(mask);
    return out;
}

std::string element_label(const std::vector<unsigned>& gen) {
    std::string s;
    for (std::size_t k = 0; k < gen.size(); ++k) {
        if (gen[k] == 0) continue;
        s += static_cast<char>('a' + k);
        if (gen[k] > 1) s += std::to_string(gen[k]);
    }
    return s;
}

} // namespace

CongruenceReport check_congruences(const ConductorType& t) {
    const unsigned p = t.p, n = t.n;
    CongruenceReport r;
    r.ok = true;
    for (unsigned i = 1; i <= n; ++i) {
        unsigned long long mod = 1;
        for (unsigned k = 0; k < n - i; ++k) mod *= p;
        unsigned long long m = t.conductors[i - 1] - 1;
        bool good = ((m + 1) % mod == 0); // m = -1 mod p^{n-i}
        r.satisfied.push_back(good);
        r.moduli.push_back(mod);
        if (!good) r.ok = false;
    }
    return r;
}

IntersectionSpec required_intersections(const ConductorType& t) {
    const unsigned p = t.p, n = t.n;
    IntersectionSpec spec;
    spec.p = p;
    spec.n = n;
    spec.feasible = true;
    for (unsigned mask : ordered_masks(n)) {
        IntersectionSpec::Entry e;
        e.subset = mask_to_subset(mask, n);
        long long min_m = -1;
        for (unsigned i : e.subset) {
            long long m = static_cast<long long>(t.conductors[i - 1]) - 1;
            if (min_m < 0 || m < min_m) min_m = m;
        }
        unsigned sz = static_cast<unsigned>(e.subset.size());
        e.required = Rat((min_m + 1) * ipow_ll(p - 1, sz - 1), ipow_ll(p, sz - 1));
        e.integral = e.required.is_integer();
        if (!e.integral) spec.feasible = false;
        spec.entries.push_back(std::move(e));
    }
    return spec;
}

namespace {

/* Mobius inversion over the subset lattice: the pattern of an element
 * g is S(g) = { i : g not in G_i }, and the requirements are the
 * downward sums  sum_{S(g) >= S} m(g) = req(S). */
InertiaResult solve_from_requirements(unsigned p, unsigned n,
                                      const std::map<unsigned, Rat>& req) {
    InertiaResult res;
    const unsigned full = (1u << n) - 1;
    std::map<unsigned, long long> pattern_count;
    for (unsigned mask : ordered_masks(n)) {
        Rat acc(0);
        for (unsigned s = mask;; s = (s + 1) | mask) {
            unsigned extra = static_cast<unsigned>(__builtin_popcount(s)) -
                             static_cast<unsigned>(__builtin_popcount(mask));
            Rat term = req.at(s);
            acc = (extra % 2 == 0) ? acc + term : acc - term;
            if (s == full) break;
        }
        if (!acc.is_integer())
            throw std::logic_error("inversion of integral requirements not integral");
        if (acc < Rat(0)) {
            res.feasible = false;
            res.violated = "inertia count for pattern " +
                           subset_str(mask_to_subset(mask, n)) + " is negative (" +
                           acc.str() + ")";
            return res;
        }
        pattern_count[mask] = acc.num;
    }

    /* One representative subgroup per pattern: generator has coordinate
     * k = n+1-i set to 1 exactly for i in the pattern. For p = 2 this is
     * the complete list of nonidentity elements. */
    InertiaCounts ic;
    ic.p = p;
    ic.n = n;
    ic.unique_solution = true;
    std::vector<std::pair<InertiaElement, long long>> entries;
    for (auto& [mask, cnt] : pattern_count) {
        InertiaElement el;
        el.gen.assign(n, 0);
        for (unsigned i = 1; i <= n; ++i)
            if (mask & (1u << (i - 1))) el.gen[n - i] = 1;
        el.label = element_label(el.gen);
        unsigned sz = static_cast<unsigned>(__builtin_popcount(mask));
        if (p > 2 && sz >= 2 && cnt > 0) ic.unique_solution = false;
        entries.emplace_back(std::move(el), cnt);
        ic.total += cnt;
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first.gen < b.first.gen; });
    ic.counts = std::move(entries);

    res.feasible = true;
    res.counts = std::move(ic);
    return res;
}

} // namespace

InertiaResult solve_inertia_counts(const IntersectionSpec& spec) {
    std::map<unsigned, Rat> req;
    for (auto& e : spec.entries) {
        unsigned mask = 0;
        for (unsigned i : e.subset) mask |= 1u << (i - 1);
        if (!e.integral) {
            InertiaResult res;
            res.feasible = false;
            res.violated = "intersection requirement for subset " + subset_str(e.subset) +
                           " is " + e.required.str() + ", not an integer";
            return res;
        }
        req[mask] = e.required;
    }
    if (req.size() != (1u << spec.n) - 1)
        throw std::invalid_argument("intersection table must cover every nonempty subset");
    return solve_from_requirements(spec.p, spec.n, req);
}

InertiaResult solve_inertia_counts(const ConductorType& t) {
    InertiaResult res = solve_inertia_counts(required_intersections(t));
    if (!res.feasible) return res;

    /* Row sums: elements outside G_i are those whose pattern contains i. */
    for (unsigned i = 1; i <= t.n; ++i) {
        long long sum = 0;
        for (auto& [el, cnt] : res.counts.counts)
            if (el.gen[t.n - i] != 0) sum += cnt;
        if (sum != static_cast<long long>(t.conductors[i - 1]))
            throw std::logic_error("inertia counts violate the conductor row sums");
    }
    DifferentReport dr = generic_different(t);
    if (dr.b_integral && dr.branch_count != res.counts.total)
        throw std::logic_error("inertia total disagrees with the branch-point count");
    return res;
}

namespace {

LociReport check_label_loci(const IntersectionSpec& spec,
                            const std::vector<std::vector<std::string>>& loci) {
    if (loci.size() != spec.n)
        throw std::invalid_argument("need exactly one locus per generating subcover");
    std::vector<std::set<std::string>> sets;
    for (auto& l : loci) {
        std::set<std::string> s(l.begin(), l.end());
        if (s.size() != l.size())
            throw std::invalid_argument("locus contains a repeated point");
        sets.push_back(std::move(s));
    }
    LociReport rep;
    rep.all_pass = true;
    for (auto& s : sets) rep.locus_sizes.push_back(static_cast<long long>(s.size()));
    for (auto& e : spec.entries) {
        std::set<std::string> inter = sets[e.subset[0] - 1];
        for (std::size_t k = 1; k < e.subset.size(); ++k) {
            std::set<std::string> next;
            const auto& other = sets[e.subset[k] - 1];
            for (auto& x : inter)
                if (other.count(x)) next.insert(x);
            inter = std::move(next);
        }
        LociReport::Check c;
        c.subset = e.subset;
        c.required = e.required;
        c.observed = static_cast<long long>(inter.size());
        c.pass = e.integral && Rat(c.observed) == e.required;
        if (!c.pass) rep.all_pass = false;
        rep.checks.push_back(std::move(c));
    }
    return rep;
}

} // namespace

LociReport verify_branch_loci(const IntersectionSpec& spec,
                              const std::vector<std::vector<std::string>>& loci) {
    return check_label_loci(spec, loci);
}

LociReport verify_branch_loci(const IntersectionSpec& spec, const QuadExt& qx,
                              const std::vector<std::vector<QElem>>& loci) {
    /* Identify points across loci whose difference cannot be told from
     * zero; union-find keeps the identification an equivalence. */
    std::vector<QElem> pts;
    std::vector<std::pair<std::size_t, std::size_t>> where; // (locus, position)
    for (std::size_t i = 0; i < loci.size(); ++i)
        for (std::size_t j = 0; j < loci[i].size(); ++j) {
            pts.push_back(loci[i][j]);
            where.emplace_back(i, j);
        }
    std::vector<std::size_t> parent(pts.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b)
            if (qx.is_apparent_zero(qx.sub(pts[a], pts[b])))
                parent[find(a)] = find(b);

    /* two points of one locus in the same class: cannot count this locus */
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
    for (std::size_t a = 0; a < pts.size(); ++a) {
        auto key = std::make_pair(where[a].first, find(a));
        if (seen.count(key))
            throw precision_error("branch points indistinguishable at working precision");
        seen[key] = a;
    }

    std::vector<std::vector<std::string>> labels(loci.size());
    for (std::size_t a = 0; a < pts.size(); ++a)
        labels[where[a].first].push_back("P" + std::to_string(find(a)));
    return check_label_loci(spec, labels);
}

} // namespace ascend
