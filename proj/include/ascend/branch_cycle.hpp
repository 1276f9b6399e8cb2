#pragma once

#include "ascend/as_covers.hpp"
#include "ascend/rational.hpp"
#include "ascend/tower.hpp"

#include <string>
#include <vector>

namespace ascend {

/* Congruence part of the lifting criterion: m_i = -1 mod p^{n-i} for
 * 1 <= i <= n-1 (the last index is vacuous). */
struct CongruenceReport {
    bool ok = false;
    std::vector<bool> satisfied;             // per index, 1-based slot i-1
    std::vector<unsigned long long> moduli;  // p^{n-i}
};

CongruenceReport check_congruences(const ConductorType& t);

/* Required cardinality of every intersection of branch loci: subset S of
 * {1..n} maps to (min_{i in S}(m_i)+1) (p-1)^{|S|-1} / p^{|S|-1}.
 * Subsets are listed by size, then lexicographically. */
struct IntersectionSpec {
    unsigned p = 0, n = 0;
    struct Entry {
        std::vector<unsigned> subset; // ascending 1-based indices
        Rat required;
        bool integral = false;
    };
    std::vector<Entry> entries;
    bool feasible = false; // all entries integral
};

IntersectionSpec required_intersections(const ConductorType& t);

/* Order-p subgroup of (Z/p)^n named by its canonical generator: first
 * nonzero coordinate scaled to 1; label writes coordinate k as the k-th
 * letter with its exponent ("a", "bc", "ab2"). */
struct InertiaElement {
    std::vector<unsigned> gen;
    std::string label;
};

/* Counts m(g) of branch points whose inertia subgroup is g, for one
 * representative subgroup per containment pattern (all subgroups when
 * p = 2). Σ_{g not in G_i} m(g) = m_i + 1 holds for each i. */
struct InertiaCounts {
    unsigned p = 0, n = 0;
    std::vector<std::pair<InertiaElement, long long>> counts;
    bool unique_solution = false;
    long long total = 0; // the branch-point count |B|
};

struct InertiaResult {
    bool feasible = false;
    std::string violated; // set when infeasible
    InertiaCounts counts; // valid when feasible
};

InertiaResult solve_inertia_counts(const ConductorType& t);

/* Solve directly from an intersection table (no conductor cross-checks);
 * used for round-trip testing and externally supplied data. */
InertiaResult solve_inertia_counts(const IntersectionSpec& spec);

/* Compare actual branch loci against an IntersectionSpec: every subset
 * intersection cardinality checked, pass/fail per subset. */
struct LociReport {
    bool all_pass = false;
    std::vector<long long> locus_sizes;
    struct Check {
        std::vector<unsigned> subset;
        Rat required;
        long long observed = 0;
        bool pass = false;
    };
    std::vector<Check> checks;
};

LociReport verify_branch_loci(const IntersectionSpec& spec,
                              const std::vector<std::vector<std::string>>& loci);

/* Same check for loci given as points of a quadratic extension of the
 * valued tower; points whose difference is indistinguishable from zero
 * at working precision are identified, and an identification that
 * collapses two points of one locus raises precision_error. */
LociReport verify_branch_loci(const IntersectionSpec& spec, const QuadExt& qx,
                              const std::vector<std::vector<QElem>>& loci);

} // namespace ascend
