#pragma once

#include "ascend/finite_field.hpp"

#include <map>
#include <optional>
#include <vector>

namespace ascend {

/* One branch point of a degree-p cyclic cover y^p - y = f: a finite
 * residue-field point c and the polar part, a polynomial in 1/(x - c)
 * stored as exponent -> coefficient (exponents >= 1). */
struct ASBranch {
    FFElem c;
    std::map<unsigned, FFElem> poly;
};

/* Right-hand side of y^p - y = sum_i f_i(1/(x - c_i)).  A local cover has
 * a single polar part in t^{-1} (c fixed at 0 by convention).  Branch
 * points are finite; covers branched at infinity must first be moved by
 * the coordinate helpers below. */
struct ASFunction {
    const FiniteField* field = nullptr;
    bool local = false;
    bool trivial = false; // the zero right-hand side (split cover)
    std::vector<ASBranch> branch;
};

ASFunction as_local(const FiniteField& F, std::map<unsigned, FFElem> poly);
ASFunction as_global(const FiniteField& F, std::vector<ASBranch> branches);

/* Result of reduction mod ℘ = x^p - x.  The witness w (polar parts plus a
 * constant) satisfies input - reduced = w^p - w identically; when the
 * constant term had no ℘-preimage the residue field was enlarged by a
 * factor of p and everything re-embedded (field points at the new one). */
struct NormalizeResult {
    ASFunction reduced;
    std::vector<ASBranch> witness_polar;
    FFElem witness_const;
    bool enlarged = false;
};

NormalizeResult normalize(const ASFunction& f);

/* Normalize a cover that additionally carries a constant term on the
 * right-hand side: the constant is absorbed into the witness, enlarging
 * the residue field by a factor of p when its trace obstructs. */
NormalizeResult normalize_with_constant(const ASFunction& f, const FFElem& cst);

/* Conductor of a reduced local cover: deg(f) + 1.  Rejects unreduced
 * input (an exponent divisible by p) rather than normalizing silently. */
unsigned conductor(const ASFunction& f);

/* The local invariant of an elementary abelian cover: the lexicographically
 * smallest ascending tuple of conductors over all spanning sets of the
 * (p^n - 1)/(p - 1) degree-p subcover lines, with a witness basis
 * realizing it. */
struct ConductorType {
    unsigned p = 0;
    unsigned n = 0;
    std::vector<unsigned> conductors; // ascending
    std::vector<ASFunction> witness_basis;
};

ConductorType conductor_type(const std::vector<ASFunction>& fs);

/* Numerical invariants of a global degree-p cover. */
struct CoverInvariants {
    unsigned p = 0;
    unsigned s = 0;                // p-rank
    unsigned r = 0;                // branch points - 1
    unsigned d = 0;                // sum e_i - 2
    unsigned long g = 0;           // genus, 2g = d(p-1)
    std::vector<unsigned> profile; // e_i = deg f_i + 1, descending
};

CoverInvariants cover_invariants(const ASFunction& f);

/* Coordinate change x -> x + a (moves branch points by -a); the helper
 * for repositioning covers so no branch point sits at infinity. */
ASFunction translate(const ASFunction& f, const FFElem& a);

/* w^p - w for a witness given as polar parts plus constant; returned in
 * the same representation (used by equivalence checks). */
std::pair<std::vector<ASBranch>, FFElem> as_operator_image(const FiniteField& F,
                                                           const std::vector<ASBranch>& polar,
                                                           const FFElem& cst);

} // namespace ascend
