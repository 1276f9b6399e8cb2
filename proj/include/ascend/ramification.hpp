#pragma once

#include "ascend/as_covers.hpp"
#include "ascend/rational.hpp"

#include <vector>

namespace ascend {

/* One linear piece of the Herbrand function: phi(x) = y0 + slope*(x - x0)
 * for x in [x0, x1]; the last segment is unbounded (x1 < 0 marks it). */
struct HerbrandSegment {
    Rat x0, y0, slope;
    Rat x1{-1};
};

/* Ramification data of the local elementary abelian extension attached to
 * a conductor type: lower/upper jump lists, the full Herbrand graph, and
 * the higher ramification filtration orders (run-length encoded: |I_u| is
 * `order` for lo <= u <= hi, hi = -1 meaning unbounded). */
struct JumpData {
    unsigned p = 0, n = 0;
    std::vector<long long> lower;
    std::vector<long long> upper;
    std::vector<HerbrandSegment> herbrand;
    struct FiltRange {
        long long lo, hi;
        unsigned long long order;
    };
    std::vector<FiltRange> filtration;
};

/* Evaluate the Herbrand function at a point. */
Rat herbrand_eval(const JumpData& j, const Rat& x);

/* Lower jumps by the closed formula
 *   j_l = p^l m_{l+1} - (p-1) sum_{i<=l} p^{i-1} m_i,
 * upper jumps recovered through the Herbrand graph and asserted equal to
 * the conductor list minus one. */
JumpData lower_jumps(const ConductorType& t);

/* Degree of the different of the special fiber, computed by BOTH the
 * jump-sum route sum (j_l + 1) p^{n-1-l} (p-1) and the closed form
 * (p-1) sum p^l (m_{l+1} + 1); equality asserted before returning. */
long long special_different(const ConductorType& t);

struct DifferentReport {
    long long d_s = 0;
    long long d_eta = 0;
    bool b_integral = false;
    long long branch_count = 0; // meaningful iff b_integral
    bool criterion_met = false;
};

/* Generic different of a candidate lift and the implied branch-point
 * count |B| = d_eta / ((p-1) p^{n-1}); a non-integer |B| is reported as
 * infeasible data, not an error. */
DifferentReport generic_different(const ConductorType& t);

/* Build a ConductorType directly from (p, conductors) without cover
 * witnesses; validates ascending order and p-free m_i. */
ConductorType make_type(unsigned p, std::vector<unsigned> conductors);

} // namespace ascend
