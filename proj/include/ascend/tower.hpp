#pragma once

#include "ascend/errors.hpp"
#include "ascend/finite_field.hpp"
#include "ascend/padic.hpp"
#include "ascend/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ascend {

class ValuedTower;

/* An element of a totally ramified tower K = W[pi]/(pi^e - p), stored as
 *   x = sum_{i<e} w[i] * pi^{s+i},   w[i] in the coefficient ring W,
 * known modulo pi^aprec.  The canonical (normalized) form has s equal to
 * the pi-valuation and w[0] a unit; every ring operation renormalizes so
 * the shift never drifts away from the valuation (unnormalized shifts let
 * powers of p accumulate in the W coefficients until they overflow the
 * capacity and silently truncate). */
struct TElem {
    const ValuedTower* tower = nullptr;
    long s = 0;
    std::vector<WRing::Elem> w;
    long aprec = 0;
};

/* Raised when a square root leaves the tower; carries what must be
 * adjoined so the caller can enlarge the residue field or attach the
 * quadratic layer and retry. */
struct sqrt_obstruction : extension_needed {
    enum class Kind {
        odd_grid_valuation,   // v(x) odd in the pi-grid: adjoin t with t^2 = pi*unit
        odd_digit_position,   // obstruction at an odd digit below v(4): adjoin sqrt of the unit part
        residue_non_square,   // odd p: leading digit is a non-residue
        residue_unsolvable    // p = 2: the digit equation c^2 + z0 c = r has no solution
    };
    Kind kind;
    sqrt_obstruction(Kind k, const std::string& relation)
        : extension_needed(relation), kind(k) {}
};

/* K = Frac(W(F_{p^m}))[pi]/(pi^e - p): an Eisenstein extension with the
 * fixed uniformizer relation pi^e = p, valuation normalized to v(p) = 1,
 * so v(pi) = 1/e and the value group is (1/e)Z.  Absolute precision is
 * counted in pi-digit slots.  Instances are immutable and cached; residue
 * enlargement returns a NEW tower and re-embeds elements. */
class ValuedTower {
public:
    static const ValuedTower& get(unsigned p, unsigned m, unsigned e, long prec_pi);

    unsigned p() const { return p_; }
    unsigned m() const { return res_->m(); }
    unsigned e() const { return e_; }
    long prec() const { return prec_; }
    const FiniteField& residue_field() const { return *res_; }
    const WRing& wring() const { return W_; }

    TElem zero(long aprec = -1) const; // default: full working precision
    TElem one() const;
    TElem from_int(long long n) const;
    TElem pi_pow(long k) const;
    TElem from_w(WRing::Elem w0, long pos) const;
    TElem teich(const FFElem& a) const; // Teichmuller digit at position 0

    TElem add(const TElem& a, const TElem& b) const;
    TElem sub(const TElem& a, const TElem& b) const;
    TElem neg(const TElem& a) const;
    TElem mul(const TElem& a, const TElem& b) const;
    TElem div(const TElem& a, const TElem& b) const;
    TElem inv(const TElem& a) const;
    TElem mul_pi(const TElem& a, long k) const; // exact shift by pi^k
    TElem pow(const TElem& a, unsigned long n) const;
    TElem truncate(const TElem& a, long new_aprec) const;

    bool is_apparent_zero(const TElem& a) const;
    /* Valuation with v(p) = 1; nullopt for an element indistinguishable
     * from zero at its precision. */
    std::optional<Rat> val(const TElem& a) const;
    long val_pi(const TElem& a) const;     // pi-units; throws on apparent zero
    Rat aprec_of(const TElem& a) const;    // absolute precision, v(p) = 1 units
    FFElem leading_digit(const TElem& a) const;
    /* Unit part: x / pi^{val_pi(x)}. */
    TElem unit_part(const TElem& a) const;

    /* Teichmuller digit expansion: positions with nonzero digits, ascending. */
    std::vector<std::pair<long, FFElem>> digits(const TElem& a) const;
    TElem from_digits(const std::vector<std::pair<long, FFElem>>& d, long aprec) const;

    /* Indistinguishable at the smaller of the two precisions. */
    bool same(const TElem& a, const TElem& b) const;
    std::string to_string(const TElem& a) const;

    /* Canonical square root.  Deterministic digit-by-digit selection below
     * v(4) (p = 2) and Newton refinement above; throws sqrt_obstruction
     * when the root lives outside the tower, precision_error when the
     * input has too few digits to certify a root. */
    TElem sqrt(const TElem& a) const;

    /* Same tower but with residue degree m*factor; elements move across
     * via embed_from (digit-wise through the canonical field embedding). */
    const ValuedTower& enlarged_residue(unsigned factor) const;
    TElem embed_from(const ValuedTower& src, const TElem& x) const;

private:
    ValuedTower(unsigned p, unsigned m, unsigned e, long prec_pi);
    unsigned p_, e_;
    long prec_;
    const FiniteField* res_;
    WRing W_;

    void check(const TElem& a) const;
    TElem normalize(TElem a) const;
    friend class QuadExt;
};

/* The one quadratic layer permitted on top of a tower: K(theta) with
 * theta^2 = delta for a fixed non-square delta.  Elements are pairs
 * a + b*theta; the valuation comes from the norm a^2 - delta b^2.  The
 * type system allows no second layer. */
struct QElem {
    TElem a, b;
};

class QuadExt {
public:
    QuadExt(const ValuedTower& base, TElem delta);

    const ValuedTower& base() const { return *tw_; }
    const TElem& delta() const { return delta_; }

    QElem from_base(const TElem& a) const;
    QElem theta() const;
    QElem make(const TElem& a, const TElem& b) const;

    QElem add(const QElem& x, const QElem& y) const;
    QElem sub(const QElem& x, const QElem& y) const;
    QElem neg(const QElem& x) const;
    QElem mul(const QElem& x, const QElem& y) const;
    QElem inv(const QElem& x) const;
    QElem mul_base(const QElem& x, const TElem& c) const;

    bool is_apparent_zero(const QElem& x) const;
    /* Valuation in v(p) = 1 units; grid (1/2e)Z.  Throws precision_error
     * when cancellation in the norm leaves the valuation uncertified. */
    std::optional<Rat> val(const QElem& x) const;
    TElem norm(const QElem& x) const;
    std::string to_string(const QElem& x) const;

private:
    const ValuedTower* tw_;
    TElem delta_;
};

/* Laurent polynomial over the tower, exponent -> coefficient.  In the
 * lifting computations the variable is x = T^{-1}, so "degree j" means
 * the coefficient of T^{-j}. */
struct VPoly {
    const ValuedTower* tower = nullptr;
    std::map<long, TElem> c;
};

VPoly vp_make(const ValuedTower& tw, std::map<long, TElem> coeffs);
VPoly vp_add(const VPoly& f, const VPoly& g);
VPoly vp_sub(const VPoly& f, const VPoly& g);
VPoly vp_mul(const VPoly& f, const VPoly& g);
VPoly vp_scale(const VPoly& f, const TElem& c);
VPoly vp_shift(const VPoly& f, long dexp); // multiply by variable^dexp
TElem vp_eval(const VPoly& f, const TElem& x);
VPoly vp_derivative(const VPoly& f);
/* Minimum coefficient valuation; nullopt (+infinity) when every
 * coefficient is indistinguishable from zero. */
std::optional<Rat> gauss_valuation(const VPoly& f);
/* True iff every coefficient has valuation strictly greater than bound;
 * precision_error if uncertifiable at the stored precision. */
bool is_o(const VPoly& f, const Rat& bound);

/* Sparse multivariate polynomial (exponent vector -> coefficient) for
 * Newton solving of small systems. */
struct MPoly {
    const ValuedTower* tower = nullptr;
    unsigned nvars = 0;
    std::map<std::vector<unsigned>, TElem> terms;

    void set_term(const std::vector<unsigned>& exps, const TElem& coeff);
};

TElem mp_eval(const MPoly& f, const std::vector<TElem>& x);
MPoly mp_partial(const MPoly& f, unsigned var);

struct NewtonResult {
    std::vector<TElem> roots;
    std::vector<std::string> transcript;
};

/* Solve a square system to the requested residual valuation.  Univariate
 * quadratics go through the closed form (complete the square + canonical
 * sqrt, root nearest the initial point) because the ultrametric Newton
 * condition can fail below v(4); everything else runs damped Newton with
 * min-valuation pivoting.  Errors: singular Jacobian at working
 * precision; no convergence within the step budget. */
NewtonResult newton_solve(const ValuedTower& tw, const std::vector<MPoly>& eqs,
                          std::vector<TElem> initial, const Rat& target_valuation,
                          int step_budget = 64);

} // namespace ascend
