#pragma once

#include "ascend/finite_field.hpp"

#include <gmpxx.h>

#include <vector>

namespace ascend {

/* Unramified coefficient ring for a valued tower: W = Z_p[g]/(p^N, Phi),
 * where Phi is the integer lift of the residue field's modulus and N is a
 * fixed capacity exponent.  Elements are coefficient vectors of length m
 * with entries reduced into [0, p^N).
 *
 * W is a free module over Z/p^N with basis 1, g, ..., g^{m-1}, so the
 * p-adic valuation of an element is the minimum valuation of its
 * coefficients, and division by p^k is coefficient-wise and exact when
 * the valuation permits. */
class WRing {
public:
    using Elem = std::vector<mpz_class>;

    WRing(const FiniteField& residue, long capacity);

    const FiniteField& residue_field() const { return *res_; }
    unsigned p() const { return p_; }
    unsigned m() const { return m_; }
    long capacity() const { return N_; }
    const mpz_class& pN() const { return pN_; }

    Elem zero() const;
    Elem one() const;
    Elem from_int(long long n) const;
    Elem from_residue(const FFElem& a) const;

    bool is_zero(const Elem& a) const;
    Elem add(const Elem& a, const Elem& b) const;
    Elem sub(const Elem& a, const Elem& b) const;
    Elem neg(const Elem& a) const;
    Elem mul(const Elem& a, const Elem& b) const;
    Elem scal(const Elem& a, const mpz_class& c) const;

    /* p-adic valuation: min over coefficients, capped at the capacity N
     * (an all-zero element reports N). */
    long vp(const Elem& a) const;
    /* Exact division by p^k; requires vp(a) >= k. */
    Elem div_p(const Elem& a, long k) const;
    /* Multiplication by p^k (k >= 0). */
    Elem mul_p(const Elem& a, long k) const;
    /* Keep only the digits below p^k (reduce coefficients mod p^k). */
    Elem trunc_p(const Elem& a, long k) const;

    FFElem residue(const Elem& a) const;
    /* The Teichmuller representative: the unique lift with z^q = z. */
    Elem teichmuller(const FFElem& a) const;
    /* Multiplicative inverse of a unit (vp = 0). */
    Elem inv(const Elem& a) const;

private:
    const FiniteField* res_;
    unsigned p_, m_;
    long N_;
    mpz_class pN_;
    std::vector<mpz_class> phi_; // lifted modulus, coefficients below the monic top

    Elem reduce(std::vector<mpz_class> raw) const;
};

} // namespace ascend
