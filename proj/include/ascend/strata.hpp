#pragma once

#include "ascend/as_covers.hpp"

#include <vector>

namespace ascend {

/* One stratum of the moduli space of degree-p covers with invariant d:
 * an unordered partition [e_1 >= ... >= e_{r+1}] with sum d+2 and every
 * part not congruent to 1 mod p.  A smooth lift of a cover in the
 * stratum has d+2 branch points, e_j of which coalesce to the j-th
 * special-fiber branch point. */
struct Stratum {
    unsigned p = 0;
    long long d = 0;                 // partition total minus 2
    std::vector<unsigned> partition; // descending
    unsigned r = 0;                  // parts - 1
    unsigned s = 0;                  // p-rank, r(p-1)
    long long g = 0;                 // genus, d(p-1)/2
    long long dimension = 0;         // (d+2) - 1 - sum floor((e_j-1)/p)
    long long neighborhood_dim = 0;  // (d+2) - 3 - sum floor((e_j-1)/p)
};

/* All strata whose partition sums to `total` (the generic branch-point
 * count d+2), ordered by descending parts then lexicographically.
 * Rejects parameters that force genus < 1. */
std::vector<Stratum> enumerate_strata(unsigned p, unsigned total);

/* The stratum a cover belongs to: its coalescing profile is the
 * partition.  Also reports the lift-side reading. */
struct CoverStratum {
    Stratum stratum;
    unsigned branch_points_generic = 0; // d+2 points on a smooth lift
    std::vector<unsigned> coalescing;   // group sizes, one per special point
};

CoverStratum stratum_of_cover(const CoverInvariants& c);

/* p = 2 coalescing constraint: branch points of a lift merge in groups
 * of even size.  Reused by the tree admissibility filters. */
bool even_coalescing(const std::vector<unsigned>& profile);

} // namespace ascend
