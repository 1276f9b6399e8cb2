#include "ascend/tower.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace ascend {

namespace {

long fdiv(long a, long b) {
    long q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

long ceil_div(long a, long b) { return fdiv(a + b - 1, b); }

std::mutex g_tower_mutex;

} // namespace

ValuedTower::ValuedTower(unsigned p, unsigned m, unsigned e, long prec_pi)
    : p_(p), e_(e), prec_(prec_pi), res_(&FiniteField::get(p, m)),
      W_(*res_, prec_pi / static_cast<long>(e) + 64) {
    if (e_ == 0) throw std::invalid_argument("ramification index must be positive");
    if (prec_ < static_cast<long>(4 * e_))
        throw std::invalid_argument("working precision must cover at least 4 uniformizer powers");
}

const ValuedTower& ValuedTower::get(unsigned p, unsigned m, unsigned e, long prec_pi) {
    static std::map<std::tuple<unsigned, unsigned, unsigned, long>,
                    std::unique_ptr<ValuedTower>>
        cache;
    std::lock_guard<std::mutex> lock(g_tower_mutex);
    auto key = std::make_tuple(p, m, e, prec_pi);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    auto tw = std::unique_ptr<ValuedTower>(new ValuedTower(p, m, e, prec_pi));
    auto& ref = *tw;
    cache.emplace(key, std::move(tw));
    return ref;
}

void ValuedTower::check(const TElem& a) const {
    if (a.tower != this) throw std::invalid_argument("element from a different tower");
    if (a.w.size() != e_) throw std::invalid_argument("element has wrong slot count");
}

/* Canonical form: shift = pi-valuation, leading slot a unit, all content
 * beyond the absolute precision masked away.  This runs after every ring
 * operation; see the TElem comment for why the shift must track the
 * valuation. */
TElem ValuedTower::normalize(TElem a) const {
    const long e = e_;
    const long N = W_.capacity();
    // Mask digits at or above aprec.
    auto mask = [&](TElem& x) {
        for (long i = 0; i < e; ++i) {
            long kmax = ceil_div(x.aprec - (x.s + i), e);
            if (kmax < 0) kmax = 0;
            if (kmax < N) x.w[i] = W_.trunc_p(x.w[i], kmax);
        }
    };
    mask(a);
    // True pi-valuation across slots (slot i at p-valuation k sits at
    // pi-position s + i + e*k).
    long v = a.aprec;
    for (long i = 0; i < e; ++i) {
        if (W_.is_zero(a.w[i])) continue;
        long pos = a.s + i + e * W_.vp(a.w[i]);
        if (pos < v) v = pos;
    }
    if (v >= a.aprec) {
        TElem z;
        z.tower = this;
        z.s = a.aprec;
        z.w.assign(e, W_.zero());
        z.aprec = a.aprec;
        return z;
    }
    if (ceil_div(a.aprec - v, e) > N)
        throw precision_error("tower capacity exceeded; rebuild with higher working precision");
    // Rebuild at shift v.
    TElem out;
    out.tower = this;
    out.s = v;
    out.aprec = a.aprec;
    out.w.assign(e, W_.zero());
    for (long i = 0; i < e; ++i) {
        if (W_.is_zero(a.w[i])) continue;
        long pos = a.s + i - v;
        long k = fdiv(pos, e);
        long rem = pos - k * e;
        out.w[rem] = W_.add(out.w[rem], W_.mul_p(a.w[i], k));
    }
    mask(out);
    return out;
}

TElem ValuedTower::zero(long aprec) const {
    if (aprec < 0) aprec = prec_;
    TElem z;
    z.tower = this;
    z.s = aprec;
    z.w.assign(e_, W_.zero());
    z.aprec = aprec;
    return z;
}

TElem ValuedTower::one() const { return from_int(1); }

TElem ValuedTower::from_int(long long n) const {
    TElem x;
    x.tower = this;
    x.s = 0;
    x.w.assign(e_, W_.zero());
    x.w[0] = W_.from_int(n);
    x.aprec = prec_;
    return normalize(std::move(x));
}

TElem ValuedTower::pi_pow(long k) const {
    TElem x;
    x.tower = this;
    x.s = k;
    x.w.assign(e_, W_.zero());
    x.w[0] = W_.one();
    x.aprec = prec_ + k;
    return x;
}

TElem ValuedTower::from_w(WRing::Elem w0, long pos) const {
    TElem x;
    x.tower = this;
    x.s = pos;
    x.w.assign(e_, W_.zero());
    x.w[0] = std::move(w0);
    x.aprec = prec_ + pos;
    return normalize(std::move(x));
}

TElem ValuedTower::teich(const FFElem& a) const { return from_w(W_.teichmuller(a), 0); }

bool ValuedTower::is_apparent_zero(const TElem& a) const {
    check(a);
    for (const auto& wi : a.w)
        if (!W_.is_zero(wi)) return false;
    return true;
}

TElem ValuedTower::add(const TElem& a, const TElem& b) const {
    check(a);
    check(b);
    const long e = e_;
    long s0 = std::min(a.s, b.s);
    long aprec = std::min(a.aprec, b.aprec);
    if (ceil_div(aprec - s0, e) > W_.capacity())
        throw precision_error("tower capacity exceeded; rebuild with higher working precision");
    TElem out;
    out.tower = this;
    out.s = s0;
    out.aprec = aprec;
    out.w.assign(e, W_.zero());
    for (const TElem* x : {&a, &b}) {
        for (long i = 0; i < e; ++i) {
            if (W_.is_zero(x->w[i])) continue;
            long pos = x->s + i - s0;
            long k = fdiv(pos, e);
            long rem = pos - k * e;
            out.w[rem] = W_.add(out.w[rem], W_.mul_p(x->w[i], k));
        }
    }
    return normalize(std::move(out));
}

TElem ValuedTower::neg(const TElem& a) const {
    check(a);
    TElem out = a;
    for (auto& wi : out.w) wi = W_.neg(wi);
    return normalize(std::move(out));
}

TElem ValuedTower::sub(const TElem& a, const TElem& b) const { return add(a, neg(b)); }

TElem ValuedTower::mul(const TElem& a, const TElem& b) const {
    check(a);
    check(b);
    const long e = e_;
    // Operands are canonical, so s is the valuation (or aprec for an
    // apparent zero, which the same formula handles: relative precision 0).
    long rel_a = a.aprec - a.s, rel_b = b.aprec - b.s;
    long aprec = a.s + b.s + std::min(rel_a, rel_b);
    std::vector<WRing::Elem> conv(2 * e - 1, W_.zero());
    for (long i = 0; i < e; ++i) {
        if (W_.is_zero(a.w[i])) continue;
        for (long j = 0; j < e; ++j)
            if (!W_.is_zero(b.w[j])) conv[i + j] = W_.add(conv[i + j], W_.mul(a.w[i], b.w[j]));
    }
    TElem out;
    out.tower = this;
    out.s = a.s + b.s;
    out.aprec = aprec;
    out.w.assign(e, W_.zero());
    for (long t = 0; t < 2 * e - 1; ++t) {
        if (W_.is_zero(conv[t])) continue;
        long k = t / e, rem = t % e;
        out.w[rem] = W_.add(out.w[rem], W_.mul_p(conv[t], k));
    }
    return normalize(std::move(out));
}

TElem ValuedTower::mul_pi(const TElem& a, long k) const {
    check(a);
    TElem out = a;
    out.s += k;
    out.aprec += k;
    return out;
}

TElem ValuedTower::pow(const TElem& a, unsigned long n) const {
    TElem r = one();
    TElem base = a;
    while (n) {
        if (n & 1) r = mul(r, base);
        base = mul(base, base);
        n >>= 1;
    }
    return r;
}

TElem ValuedTower::truncate(const TElem& a, long new_aprec) const {
    check(a);
    TElem out = a;
    if (new_aprec < out.aprec) out.aprec = new_aprec;
    return normalize(std::move(out));
}

std::optional<Rat> ValuedTower::val(const TElem& a) const {
    check(a);
    if (is_apparent_zero(a)) return std::nullopt;
    return Rat(a.s, static_cast<long long>(e_));
}

long ValuedTower::val_pi(const TElem& a) const {
    check(a);
    if (is_apparent_zero(a))
        throw precision_error("valuation of an element indistinguishable from zero");
    return a.s;
}

Rat ValuedTower::aprec_of(const TElem& a) const {
    check(a);
    return Rat(a.aprec, static_cast<long long>(e_));
}

FFElem ValuedTower::leading_digit(const TElem& a) const {
    check(a);
    if (is_apparent_zero(a))
        throw precision_error("no leading digit: element indistinguishable from zero");
    return W_.residue(a.w[0]);
}

TElem ValuedTower::unit_part(const TElem& a) const { return mul_pi(a, -val_pi(a)); }

TElem ValuedTower::inv(const TElem& a) const {
    check(a);
    if (is_apparent_zero(a)) throw std::domain_error("division by an apparent zero");
    long s = a.s;
    long rel = a.aprec - a.s;
    TElem u = mul_pi(a, -s); // unit part, valuation 0
    TElem z = truncate(teich(res_->inv(leading_digit(u))), rel);
    TElem two = from_int(2);
    // Newton z <- z(2 - uz): correct digits double each pass.
    for (long correct = 1; correct < rel; correct *= 2) z = mul(z, sub(two, mul(u, z)));
    return mul_pi(z, -s);
}

TElem ValuedTower::div(const TElem& a, const TElem& b) const { return mul(a, inv(b)); }

std::vector<std::pair<long, FFElem>> ValuedTower::digits(const TElem& a) const {
    check(a);
    std::vector<std::pair<long, FFElem>> out;
    TElem x = normalize(a);
    while (!is_apparent_zero(x)) {
        FFElem d = leading_digit(x);
        out.emplace_back(x.s, d);
        x = sub(x, mul_pi(teich(d), x.s));
    }
    return out;
}

TElem ValuedTower::from_digits(const std::vector<std::pair<long, FFElem>>& d, long aprec) const {
    TElem x = zero(aprec);
    for (const auto& [pos, dig] : d) x = add(x, truncate(mul_pi(teich(dig), pos), aprec));
    return x;
}

bool ValuedTower::same(const TElem& a, const TElem& b) const { return is_apparent_zero(sub(a, b)); }

std::string ValuedTower::to_string(const TElem& a) const {
    check(a);
    std::ostringstream os;
    auto d = digits(a);
    if (d.empty()) {
        os << "0";
    } else {
        bool first = true;
        for (const auto& [pos, dig] : d) {
            if (!first) os << " + ";
            first = false;
            os << "(" << res_->to_string(dig) << ")pi^" << pos;
        }
    }
    os << " + O(pi^" << a.aprec << ")";
    return os.str();
}

TElem ValuedTower::sqrt(const TElem& a) const {
    check(a);
    if (is_apparent_zero(a))
        throw precision_error("square root needs a known leading digit");
    long v = a.s;
    if (((v % 2) + 2) % 2 != 0)
        throw sqrt_obstruction(sqrt_obstruction::Kind::odd_grid_valuation, "t^2 = pi");
    const long e = e_;
    FFElem lead = leading_digit(a);
    auto r0 = res_->sqrt(lead);
    if (!r0)
        throw sqrt_obstruction(sqrt_obstruction::Kind::residue_non_square, "z^2 = c");
    TElem x = mul_pi(teich(*r0), v / 2);
    long budget = 4 * e + 64;
    if (p_ != 2) {
        // Odd residue characteristic: 2 is a unit, plain Newton from the
        // residue root converges quadratically.
        TElem two = from_int(2);
        while (budget-- > 0) {
            TElem E = sub(a, mul(x, x));
            if (is_apparent_zero(E)) {
                long ap = a.aprec - v / 2;
                return truncate(x, ap);
            }
            x = add(x, div(E, mul(two, x)));
        }
        throw precision_error("square root iteration exhausted its budget");
    }
    // p = 2: digit-by-digit below v(4) (2e pi-slots above the argument),
    // one mixed digit equation exactly at v(4), Newton beyond.
    bool settled = false;
    while (budget-- > 0) {
        TElem E = sub(a, mul(x, x));
        if (is_apparent_zero(E)) {
            settled = true;
            break;
        }
        long d = val_pi(E) - v;
        if (d < 2 * e) {
            if (d % 2 != 0)
                throw sqrt_obstruction(sqrt_obstruction::Kind::odd_digit_position,
                                       "t^2 = unit");
            auto c = res_->sqrt(leading_digit(E));
            x = add(x, mul_pi(teich(*c), v / 2 + d / 2));
        } else if (d == 2 * e) {
            // (x + c pi^{v/2+e})^2 adds c^2 pi^{v+2e} + 2 x c pi^{v/2+e};
            // with pi^e = 2 both land at position v + 2e, giving the digit
            // equation c^2 + z0 c = r (r != 0, z0 != 0, so c != 0).
            FFElem z0 = *r0;
            FFElem r = leading_digit(E);
            FFElem u = res_->mul(r, res_->inv(res_->mul(z0, z0)));
            auto t = res_->artin_schreier_solve(u);
            if (!t)
                throw sqrt_obstruction(sqrt_obstruction::Kind::residue_unsolvable,
                                       "z^2 + z = c");
            FFElem c = res_->mul(z0, *t);
            x = add(x, mul_pi(teich(c), v / 2 + e));
        } else {
            x = add(x, div(E, mul(from_int(2), x)));
        }
    }
    if (!settled) throw precision_error("square root iteration exhausted its budget");
    long ap = a.aprec - v / 2 - e;
    return truncate(x, ap);
}

const ValuedTower& ValuedTower::enlarged_residue(unsigned factor) const {
    unsigned long newq = 1;
    for (unsigned i = 0; i < m() * factor; ++i) {
        newq *= p_;
        if (newq > FiniteField::kMaxCardinality)
            throw std::domain_error("residue enlargement exceeds the extension cap");
    }
    return get(p_, m() * factor, e_, prec_);
}

TElem ValuedTower::embed_from(const ValuedTower& src, const TElem& x) const {
    if (src.p_ != p_ || src.e_ != e_)
        throw std::invalid_argument("embedding requires matching uniformizer structure");
    src.check(x);
    const auto& emb = FieldEmbedding::get(src.residue_field(), *res_);
    std::vector<std::pair<long, FFElem>> d;
    for (const auto& [pos, dig] : src.digits(x)) d.emplace_back(pos, emb.apply(dig));
    return from_digits(d, x.aprec);
}

/* ---------------- quadratic layer ---------------- */

QuadExt::QuadExt(const ValuedTower& base, TElem delta) : tw_(&base), delta_(std::move(delta)) {
    base.check(delta_);
    if (base.is_apparent_zero(delta_))
        throw std::invalid_argument("quadratic layer needs a nonzero defining element");
}

QElem QuadExt::from_base(const TElem& a) const { return QElem{a, tw_->zero()}; }

QElem QuadExt::theta() const { return QElem{tw_->zero(), tw_->one()}; }

QElem QuadExt::make(const TElem& a, const TElem& b) const { return QElem{a, b}; }

QElem QuadExt::add(const QElem& x, const QElem& y) const {
    return QElem{tw_->add(x.a, y.a), tw_->add(x.b, y.b)};
}

QElem QuadExt::sub(const QElem& x, const QElem& y) const {
    return QElem{tw_->sub(x.a, y.a), tw_->sub(x.b, y.b)};
}

QElem QuadExt::neg(const QElem& x) const { return QElem{tw_->neg(x.a), tw_->neg(x.b)}; }

QElem QuadExt::mul(const QElem& x, const QElem& y) const {
    // (a + b t)(c + d t) = ac + bd*delta + (ad + bc) t
    TElem ac = tw_->mul(x.a, y.a);
    TElem bd = tw_->mul(x.b, y.b);
    TElem ad = tw_->mul(x.a, y.b);
    TElem bc = tw_->mul(x.b, y.a);
    return QElem{tw_->add(ac, tw_->mul(bd, delta_)), tw_->add(ad, bc)};
}

QElem QuadExt::mul_base(const QElem& x, const TElem& c) const {
    return QElem{tw_->mul(x.a, c), tw_->mul(x.b, c)};
}

TElem QuadExt::norm(const QElem& x) const {
    return tw_->sub(tw_->mul(x.a, x.a), tw_->mul(delta_, tw_->mul(x.b, x.b)));
}

bool QuadExt::is_apparent_zero(const QElem& x) const {
    return tw_->is_apparent_zero(x.a) && tw_->is_apparent_zero(x.b);
}

std::optional<Rat> QuadExt::val(const QElem& x) const {
    if (is_apparent_zero(x)) return std::nullopt;
    TElem n = norm(x);
    if (tw_->is_apparent_zero(n))
        throw precision_error("quadratic-layer valuation uncertified: norm vanishes at precision");
    return *tw_->val(n) / Rat(2);
}

QElem QuadExt::inv(const QElem& x) const {
    TElem n = norm(x);
    if (tw_->is_apparent_zero(n)) throw std::domain_error("quadratic-layer division by apparent zero");
    TElem ni = tw_->inv(n);
    return QElem{tw_->mul(x.a, ni), tw_->neg(tw_->mul(x.b, ni))};
}

std::string QuadExt::to_string(const QElem& x) const {
    return "(" + tw_->to_string(x.a) + ") + (" + tw_->to_string(x.b) + ")*theta";
}

/* ---------------- Laurent polynomials ---------------- */

VPoly vp_make(const ValuedTower& tw, std::map<long, TElem> coeffs) {
    VPoly f;
    f.tower = &tw;
    f.c = std::move(coeffs);
    return f;
}

VPoly vp_add(const VPoly& f, const VPoly& g) {
    if (f.tower != g.tower) throw std::invalid_argument("polynomials over different towers");
    VPoly r = f;
    for (const auto& [j, cv] : g.c) {
        auto it = r.c.find(j);
        if (it == r.c.end())
            r.c.emplace(j, cv);
        else
            it->second = f.tower->add(it->second, cv);
    }
    return r;
}

VPoly vp_sub(const VPoly& f, const VPoly& g) {
    if (f.tower != g.tower) throw std::invalid_argument("polynomials over different towers");
    VPoly r = f;
    for (const auto& [j, cv] : g.c) {
        auto it = r.c.find(j);
        if (it == r.c.end())
            r.c.emplace(j, f.tower->neg(cv));
        else
            it->second = f.tower->sub(it->second, cv);
    }
    return r;
}

VPoly vp_mul(const VPoly& f, const VPoly& g) {
    if (f.tower != g.tower) throw std::invalid_argument("polynomials over different towers");
    VPoly r;
    r.tower = f.tower;
    for (const auto& [i, ci] : f.c)
        for (const auto& [j, cj] : g.c) {
            TElem t = f.tower->mul(ci, cj);
            auto it = r.c.find(i + j);
            if (it == r.c.end())
                r.c.emplace(i + j, std::move(t));
            else
                it->second = f.tower->add(it->second, t);
        }
    return r;
}

VPoly vp_scale(const VPoly& f, const TElem& c) {
    VPoly r;
    r.tower = f.tower;
    for (const auto& [j, cv] : f.c) r.c.emplace(j, f.tower->mul(cv, c));
    return r;
}

VPoly vp_shift(const VPoly& f, long dexp) {
    VPoly r;
    r.tower = f.tower;
    for (const auto& [j, cv] : f.c) r.c.emplace(j + dexp, cv);
    return r;
}

TElem vp_eval(const VPoly& f, const TElem& x) {
    const auto& tw = *f.tower;
    // Horner over ascending exponents; negative exponents use the inverse.
    TElem acc = tw.zero();
    TElem xinv;
    bool have_inv = false;
    for (const auto& [j, cv] : f.c) {
        TElem term = cv;
        if (j > 0)
            term = tw.mul(term, tw.pow(x, static_cast<unsigned long>(j)));
        else if (j < 0) {
            if (!have_inv) {
                xinv = tw.inv(x);
                have_inv = true;
            }
            term = tw.mul(term, tw.pow(xinv, static_cast<unsigned long>(-j)));
        }
        acc = tw.add(acc, term);
    }
    return acc;
}

VPoly vp_derivative(const VPoly& f) {
    VPoly r;
    r.tower = f.tower;
    for (const auto& [j, cv] : f.c) {
        if (j == 0) continue;
        r.c.emplace(j - 1, f.tower->mul(cv, f.tower->from_int(j)));
    }
    return r;
}

std::optional<Rat> gauss_valuation(const VPoly& f) {
    std::optional<Rat> best;
    for (const auto& [j, cv] : f.c) {
        auto v = f.tower->val(cv);
        if (!v) continue;
        if (!best || *v < *best) best = v;
    }
    return best;
}

bool is_o(const VPoly& f, const Rat& bound) {
    // First pass: any certainly-too-small coefficient decides "false".
    for (const auto& [j, cv] : f.c) {
        auto v = f.tower->val(cv);
        if (v && !(*v > bound)) return false;
    }
    // Second pass: every remaining coefficient must be certifiably above.
    for (const auto& [j, cv] : f.c) {
        auto v = f.tower->val(cv);
        if (v) continue; // known valuation > bound from the first pass
        if (!(f.tower->aprec_of(cv) > bound))
            throw precision_error("o(...) undecidable at stored precision");
    }
    return true;
}

/* ---------------- multivariate polynomials and Newton ---------------- */

void MPoly::set_term(const std::vector<unsigned>& exps, const TElem& coeff) {
    if (exps.size() != nvars) throw std::invalid_argument("exponent vector has wrong arity");
    auto it = terms.find(exps);
    if (it == terms.end())
        terms.emplace(exps, coeff);
    else
        it->second = tower->add(it->second, coeff);
}

TElem mp_eval(const MPoly& f, const std::vector<TElem>& x) {
    const auto& tw = *f.tower;
    if (x.size() != f.nvars) throw std::invalid_argument("wrong number of evaluation points");
    TElem acc = tw.zero();
    for (const auto& [exps, cv] : f.terms) {
        TElem term = cv;
        for (unsigned i = 0; i < f.nvars; ++i)
            if (exps[i] > 0) term = tw.mul(term, tw.pow(x[i], exps[i]));
        acc = tw.add(acc, term);
    }
    return acc;
}

MPoly mp_partial(const MPoly& f, unsigned var) {
    MPoly r;
    r.tower = f.tower;
    r.nvars = f.nvars;
    for (const auto& [exps, cv] : f.terms) {
        if (exps[var] == 0) continue;
        auto e2 = exps;
        e2[var] -= 1;
        r.set_term(e2, f.tower->mul(cv, f.tower->from_int(exps[var])));
    }
    return r;
}

namespace {

/* "Residual certified above target": definite valuation > target, or an
 * apparent zero whose precision exceeds target.  Uncertifiable cases
 * raise precision_error. */
bool above_target(const ValuedTower& tw, const TElem& r, const Rat& target) {
    auto v = tw.val(r);
    if (v) return *v > target;
    if (tw.aprec_of(r) > target) return true;
    throw precision_error("residual valuation undecidable at stored precision");
}

Rat residual_measure(const ValuedTower& tw, const TElem& r) {
    auto v = tw.val(r);
    if (v) return *v;
    return tw.aprec_of(r);
}

/* Solve the k x k system J dx = rhs by Gaussian elimination with
 * min-valuation pivoting. */
std::vector<TElem> linear_solve(const ValuedTower& tw, std::vector<std::vector<TElem>> J,
                                std::vector<TElem> rhs) {
    const std::size_t k = rhs.size();
    std::vector<std::size_t> perm(k);
    for (std::size_t i = 0; i < k; ++i) perm[i] = i;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t best = k;
        Rat bestv(0);
        for (std::size_t row = col; row < k; ++row) {
            auto v = tw.val(J[row][col]);
            if (!v) continue;
            if (best == k || *v < bestv) {
                best = row;
                bestv = *v;
            }
        }
        if (best == k) throw std::runtime_error("singular Jacobian at working precision");
        std::swap(J[col], J[best]);
        std::swap(rhs[col], rhs[best]);
        TElem piv_inv = tw.inv(J[col][col]);
        for (std::size_t row = col + 1; row < k; ++row) {
            if (tw.is_apparent_zero(J[row][col])) continue;
            TElem factor = tw.mul(J[row][col], piv_inv);
            for (std::size_t j = col; j < k; ++j)
                J[row][j] = tw.sub(J[row][j], tw.mul(factor, J[col][j]));
            rhs[row] = tw.sub(rhs[row], tw.mul(factor, rhs[col]));
        }
    }
    std::vector<TElem> x(k, tw.zero());
    for (std::size_t col = k; col-- > 0;) {
        TElem acc = rhs[col];
        for (std::size_t j = col + 1; j < k; ++j) acc = tw.sub(acc, tw.mul(J[col][j], x[j]));
        x[col] = tw.div(acc, J[col][col]);
    }
    return x;
}

} // namespace

NewtonResult newton_solve(const ValuedTower& tw, const std::vector<MPoly>& eqs,
                          std::vector<TElem> initial, const Rat& target_valuation,
                          int step_budget) {
    NewtonResult out;
    const std::size_t k = initial.size();
    if (eqs.size() != k) throw std::invalid_argument("system must be square");
    if (k == 0) return out;

    // Univariate degree <= 2: closed form via the canonical square root;
    // the ultrametric Newton condition can fail below v(4) where plain
    // iteration diverges, while completing the square stays exact.
    if (k == 1 && eqs[0].nvars == 1) {
        unsigned maxdeg = 0;
        for (const auto& [exps, cv] : eqs[0].terms) maxdeg = std::max(maxdeg, exps[0]);
        if (maxdeg <= 2) {
            TElem a0 = tw.zero(), a1 = tw.zero(), a2 = tw.zero();
            for (const auto& [exps, cv] : eqs[0].terms) {
                if (exps[0] == 0) a0 = tw.add(a0, cv);
                if (exps[0] == 1) a1 = tw.add(a1, cv);
                if (exps[0] == 2) a2 = tw.add(a2, cv);
            }
            TElem root = tw.zero();
            if (!tw.is_apparent_zero(a2)) {
                TElem disc = tw.sub(tw.mul(a1, a1),
                                    tw.mul(tw.from_int(4), tw.mul(a2, a0)));
                TElem sq = tw.sqrt(disc);
                TElem den = tw.mul(tw.from_int(2), a2);
                TElem r1 = tw.div(tw.sub(sq, a1), den);
                TElem r2 = tw.div(tw.sub(tw.neg(sq), a1), den);
                // take the root nearer the initial point
                TElem d1 = tw.sub(r1, initial[0]);
                TElem d2 = tw.sub(r2, initial[0]);
                Rat m1 = residual_measure(tw, d1), m2 = residual_measure(tw, d2);
                root = (m1 >= m2) ? r1 : r2;
                out.transcript.push_back("closed form: quadratic via canonical sqrt");
            } else if (!tw.is_apparent_zero(a1)) {
                root = tw.neg(tw.div(a0, a1));
                out.transcript.push_back("closed form: linear");
            } else {
                throw std::runtime_error("singular Jacobian at working precision");
            }
            TElem res = mp_eval(eqs[0], {root});
            if (!above_target(tw, res, target_valuation))
                throw precision_error("closed-form root does not meet the target valuation");
            out.transcript.push_back("residual valuation " +
                                     residual_measure(tw, res).str());
            out.roots = {root};
            return out;
        }
    }

    std::vector<TElem> x = std::move(initial);
    Rat best_measure(-1000000);
    int stall = 0;
    for (int step = 0; step < step_budget; ++step) {
        std::vector<TElem> F(k);
        bool done = true;
        Rat measure(1000000);
        for (std::size_t i = 0; i < k; ++i) {
            F[i] = mp_eval(eqs[i], x);
            Rat mi = residual_measure(tw, F[i]);
            if (mi < measure) measure = mi;
            if (!above_target(tw, F[i], target_valuation)) done = false;
        }
        out.transcript.push_back("step " + std::to_string(step) + ": residual valuation " +
                                 measure.str());
        if (done) {
            out.roots = std::move(x);
            return out;
        }
        if (measure <= best_measure) {
            if (++stall >= 3)
                throw std::runtime_error(
                    "Newton iteration stalled: ultrametric condition not attained");
        } else {
            stall = 0;
            best_measure = measure;
        }
        std::vector<std::vector<TElem>> J(k, std::vector<TElem>(k, tw.zero()));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) J[i][j] = mp_eval(mp_partial(eqs[i], j), x);
        std::vector<TElem> rhs(k);
        for (std::size_t i = 0; i < k; ++i) rhs[i] = tw.neg(F[i]);
        std::vector<TElem> dx = linear_solve(tw, std::move(J), std::move(rhs));
        for (std::size_t i = 0; i < k; ++i) x[i] = tw.add(x[i], dx[i]);
    }
    throw std::runtime_error("no convergence within the Newton step budget");
}

} // namespace ascend
