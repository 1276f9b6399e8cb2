#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ascend {

class FiniteField;

/* An element of a finite field F_{p^m}: the residue class of a polynomial
 * c[0] + c[1]x + ... + c[m-1]x^{m-1} modulo the field's irreducible modulus.
 * Elements remember their field so that mixed-field operations can be
 * rejected instead of silently producing nonsense. */
struct FFElem {
    const FiniteField* field = nullptr;
    std::vector<unsigned> c;

    bool operator==(const FFElem& o) const { return field == o.field && c == o.c; }
    bool operator!=(const FFElem& o) const { return !(*this == o); }
};

/* F_{p^m} as an explicit quotient ring F_p[x]/(modulus).  The modulus is
 * verified irreducible at construction.  All algorithms are exact; element
 * enumeration order (by index = sum c_i p^i) is the deterministic order
 * used everywhere a canonical choice is needed.
 *
 * The canonical field for given (p, m) uses the lexicographically smallest
 * monic irreducible modulus (coefficients compared from the constant term
 * up), so independently constructed contexts agree digit-for-digit. */
class FiniteField {
public:
    /* Size cap for any constructed field; automatic residue-field
     * enlargement refuses to cross it (termination guarantee). */
    static constexpr unsigned long kMaxCardinality = 1ul << 12;

    FiniteField(unsigned p, unsigned m, std::vector<unsigned> modulus);

    /* Cached canonical field (lex-smallest modulus). */
    static const FiniteField& get(unsigned p, unsigned m);

    unsigned p() const { return p_; }
    unsigned m() const { return m_; }
    unsigned long q() const { return q_; }
    const std::vector<unsigned>& modulus() const { return modulus_; }

    FFElem zero() const;
    FFElem one() const;
    /* The class of x (a generator of the ring over F_p; for m = 1 returns 1). */
    FFElem gen() const;
    FFElem from_coeffs(std::vector<unsigned> c) const;
    FFElem from_index(unsigned long idx) const;
    unsigned long index(const FFElem& a) const;

    bool is_zero(const FFElem& a) const;
    bool is_one(const FFElem& a) const;

    FFElem add(const FFElem& a, const FFElem& b) const;
    FFElem sub(const FFElem& a, const FFElem& b) const;
    FFElem neg(const FFElem& a) const;
    FFElem mul(const FFElem& a, const FFElem& b) const;
    FFElem inv(const FFElem& a) const;
    FFElem pow(const FFElem& a, unsigned long long e) const;
    /* Frobenius x -> x^p and its inverse (a bijection on a finite field). */
    FFElem frobenius(const FFElem& a) const;
    FFElem frobenius_inv(const FFElem& a) const;

    /* Square root.  p = 2: unique, via the inverse of Frobenius.  Odd p:
     * returns the root with the smaller element index, or nullopt for a
     * quadratic non-residue (caller may enlarge the field). */
    std::optional<FFElem> sqrt(const FFElem& a) const;
    bool is_square(const FFElem& a) const;

    /* Absolute trace down to F_p, returned as an integer in [0, p). */
    unsigned trace(const FFElem& a) const;

    /* Solve x^p - x = c.  Solvable iff trace(c) = 0; returns the solution
     * with the smallest element index (the full solution set is x + F_p). */
    std::optional<FFElem> artin_schreier_solve(const FFElem& c) const;

    /* Multiplicative (cube, etc.) helper: enumerate all elements in index
     * order; used for deterministic canonical searches. */
    std::vector<FFElem> all_elements() const;

    std::string to_string(const FFElem& a) const;

private:
    unsigned p_, m_;
    unsigned long q_;
    std::vector<unsigned> modulus_;

    void check(const FFElem& a) const;
    void check2(const FFElem& a, const FFElem& b) const;
};

/* Inclusion F_{p^m} -> F_{p^M} (requires m | M), realized by sending the
 * source generator to the lex-smallest (by element index) root of the
 * source modulus in the destination.  Cached per field pair. */
class FieldEmbedding {
public:
    static const FieldEmbedding& get(const FiniteField& src, const FiniteField& dst);
    const FiniteField& src() const { return *src_; }
    const FiniteField& dst() const { return *dst_; }
    FFElem apply(const FFElem& a) const;

private:
    const FiniteField* src_;
    const FiniteField* dst_;
    FFElem gen_image_;
    FieldEmbedding(const FiniteField& s, const FiniteField& d);
};

} // namespace ascend
