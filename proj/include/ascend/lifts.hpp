#pragma once

#include "ascend/as_covers.hpp"
#include "ascend/branch_cycle.hpp"
#include "ascend/hurwitz_trees.hpp"
#include "ascend/tower.hpp"

#include <memory>
#include <string>
#include <vector>

namespace ascend {

/* Verdict of the degree-2 good-reduction check for a cover
 * Y^2 = F(T^{-1}), F(0) = 1:
 *   - bad_model:    v_Gauss(F - Q^2) < v(4) for the truncated square
 *                   root Q; this model cannot reduce.
 *   - inconclusive: the defect passes but Q does not reduce to 1; no
 *                   claim is made either way.
 *   - good:         G = (F - Q^2)/4 is integral; the reduction is the
 *                   normalized cover z^2 - z = G-bar (trivial_reduction
 *                   set when G-bar vanishes). */
struct ReductionReport {
    enum class Verdict { good, bad_model, inconclusive };
    Verdict verdict = Verdict::inconclusive;
    Rat defect_valuation;            // v_Gauss(F - Q^2), v(p) = 1 units
    bool defect_is_bound = false;    // defect vanished to working precision
    bool trivial_reduction = false;
    ASFunction reduced;              // valid when good and nontrivial
    unsigned conductor = 0;
    std::vector<QElem> sqrt_poly;    // the truncated square root Q
    std::string detail;
};

/* F given by its T^{-j} coefficients, j = 0..deg. */
ReductionReport check_good_reduction(const QuadExt& qx, const std::vector<QElem>& F);
ReductionReport check_good_reduction(const ValuedTower& tw, const VPoly& F);

/* Four-point lift of z^2 - z = alpha/t^3 + beta/t: branch points
 * {0, rho^{4r-4} A, rho U, rho U + rho^{4r-4} V} in the tower with
 * pi^{2(2r-1)} = 2 and rho = pi^2.  V solves a quadratic and may live
 * in a quadratic extension of the tower (created on demand, or reuse
 * the one passed in). */
struct Conductor4Lift {
    unsigned r = 0;
    FFElem alpha, beta;
    TElem A, B, U;
    std::shared_ptr<const QuadExt> ext;
    QElem w, V, q;                   // w^2 = -rho^3(rho^2 B + A)U, V = -rho^2 B - A + w
    std::vector<QElem> points;       // the four branch points
    ReductionReport report;          // independent reduction check
};

Conductor4Lift construct_conductor4_lift(const ValuedTower& tw, const FFElem& alpha,
                                         const FFElem& beta, const TElem& A,
                                         const TElem& U, unsigned r,
                                         std::shared_ptr<const QuadExt> ext = nullptr);

/* 2r-point configuration {rho T_i, rho T_i + 2 rho W_i} with reduction
 * z^2 - z = 1/t^{2r-1}; T_1 = 0, the other T_i pairwise-distinct units.
 * The W_i are solved for and certified (units, v(perturbation) = v(2)),
 * and the full polynomial is re-checked independently. */
struct PagotLift {
    unsigned r = 0;
    std::vector<TElem> T;            // input points
    std::vector<TElem> W;            // solved perturbations
    std::vector<TElem> Tt;           // perturbed points T-tilde = T + 2W
    std::vector<TElem> sqrt_coeffs;  // Q(x) = 1 + q_1 x + ... + q_{r-1} x^{r-1}
    std::vector<TElem> points;       // the 2r branch points (rho-scaled)
    unsigned newton_steps = 0;
    std::string transcript;
    ReductionReport report;
};

PagotLift solve_pagot(const ValuedTower& tw, unsigned r, const std::vector<TElem>& T);

/* Full three-cover assembly for conductor type (4,4,2r): C1, C2 from
 * the four-point construction sharing A = 1, C3 from the 2r-point
 * configuration through T = (0, U_1, U_2, extra...).  Certifies the
 * sharing pattern, the point count 2r+3, the branch-partition
 * (3,3,3,2,...,2), non-equidistance, and the different counts. */
struct AssembledLift {
    unsigned r = 0;
    ConductorType type;              // (4, 4, 2r)
    std::shared_ptr<const QuadExt> ext;
    Conductor4Lift c1, c2;
    PagotLift c3;
    std::vector<std::vector<QElem>> loci;     // three branch loci
    unsigned distinct_points = 0;
    LociReport loci_report;
    UltrametricTree tree;
    std::vector<unsigned> partition;
    bool equidistant = false;        // certified false
    long long d_s = 0, d_eta = 0, branch_count = 0;
};

AssembledLift assemble_442r_lift(const FiniteField& k, const FFElem& alpha1,
                                 const FFElem& alpha2, const FFElem& beta1,
                                 const FFElem& beta2, unsigned r,
                                 const std::vector<FFElem>& extra = {},
                                 long prec_pi = 0);

} // namespace ascend
