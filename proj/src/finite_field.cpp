#include "ascend/finite_field.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace ascend {

namespace {

bool is_prime(unsigned n) {
    if (n < 2) return false;
    for (unsigned d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

/* Dense polynomials over F_p, little-endian coefficient vectors. */
using Poly = std::vector<unsigned>;

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

int degree(const Poly& a) { return static_cast<int>(a.size()) - 1; }

Poly poly_mod(Poly a, const Poly& b, unsigned p) {
    // b monic (leading coefficient 1) by construction below.
    trim(a);
    while (degree(a) >= degree(b)) {
        unsigned lead = a.back();
        std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) {
            unsigned sub = (lead * b[i]) % p;
            a[shift + i] = (a[shift + i] + p - sub) % p;
        }
        trim(a);
    }
    return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f, unsigned p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    return poly_mod(std::move(r), f, p);
}

Poly poly_powmod(Poly base, unsigned long long e, const Poly& f, unsigned p) {
    Poly r{1};
    base = poly_mod(std::move(base), f, p);
    while (e) {
        if (e & 1) r = poly_mulmod(r, base, f, p);
        base = poly_mulmod(base, base, f, p);
        e >>= 1;
    }
    return r;
}

Poly poly_gcd(Poly a, Poly b, unsigned p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        // Make b monic so poly_mod applies (inverse of lead mod p by Fermat).
        unsigned lead = b.back();
        if (lead != 1) {
            unsigned inv = 1;
            for (unsigned k = 0; k < p - 2; ++k) inv = (inv * lead) % p;
            for (auto& c : b) c = (c * inv) % p;
        }
        Poly r = poly_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

/* Monic f of degree m is irreducible over F_p iff x^{p^m} = x (mod f) and,
 * for every prime divisor l of m, gcd(x^{p^{m/l}} - x, f) is constant. */
bool is_irreducible(const Poly& f, unsigned p) {
    int m = degree(f);
    if (m < 1) return false;
    if (m == 1) return true;
    auto x_pow = [&](unsigned long long e) { return poly_powmod(Poly{0, 1}, e, f, p); };
    unsigned long long pm = 1;
    for (int i = 0; i < m; ++i) pm *= p;
    Poly t = x_pow(pm);
    if (t != Poly{0, 1}) return false;
    for (int l = 2; l <= m; ++l) {
        if (m % l != 0) continue;
        bool lp = true;
        for (int d = 2; d * d <= l; ++d)
            if (l % d == 0) { lp = false; break; }
        if (!lp) continue;
        unsigned long long pk = 1;
        for (int i = 0; i < m / l; ++i) pk *= p;
        Poly g = x_pow(pk);
        // g - x
        if (g.size() < 2) g.resize(2, 0);
        g[1] = (g[1] + p - 1) % p;
        trim(g);
        Poly d = poly_gcd(f, g, p);
        if (degree(d) > 0) return false;
    }
    return true;
}

std::mutex g_field_mutex;

} // namespace

FiniteField::FiniteField(unsigned p, unsigned m, std::vector<unsigned> modulus)
    : p_(p), m_(m), modulus_(std::move(modulus)) {
    if (!is_prime(p_)) throw std::invalid_argument("finite field characteristic must be prime");
    if (m_ == 0) throw std::invalid_argument("finite field extension degree must be positive");
    unsigned long q = 1;
    for (unsigned i = 0; i < m_; ++i) {
        q *= p_;
        if (q > kMaxCardinality)
            throw std::domain_error("finite field cardinality exceeds the extension cap");
    }
    q_ = q;
    if (modulus_.size() != m_)
        throw std::invalid_argument("modulus must list the m coefficients below the leading term");
    for (auto& c : modulus_) c %= p_;
    Poly f = modulus_;
    f.push_back(1);
    if (!is_irreducible(f, p_))
        throw std::invalid_argument("modulus is reducible over the prime field");
}

const FiniteField& FiniteField::get(unsigned p, unsigned m) {
    static std::map<std::pair<unsigned, unsigned>, std::unique_ptr<FiniteField>> cache;
    std::lock_guard<std::mutex> lock(g_field_mutex);
    auto key = std::make_pair(p, m);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    // Smallest modulus by coefficient-vector index (constant term least
    // significant digit base p): the canonical choice for (p, m).
    unsigned long q = 1;
    for (unsigned i = 0; i < m; ++i) q *= p;
    for (unsigned long idx = 0; idx < q; ++idx) {
        std::vector<unsigned> tail(m);
        unsigned long t = idx;
        for (unsigned i = 0; i < m; ++i) {
            tail[i] = static_cast<unsigned>(t % p);
            t /= p;
        }
        Poly f = tail;
        f.push_back(1);
        if (is_irreducible(f, p)) {
            auto fld = std::make_unique<FiniteField>(p, m, tail);
            auto& ref = *fld;
            cache.emplace(key, std::move(fld));
            return ref;
        }
    }
    throw std::logic_error("no irreducible modulus found"); // unreachable
}

void FiniteField::check(const FFElem& a) const {
    if (a.field != this) throw std::invalid_argument("element belongs to a different field");
    if (a.c.size() != m_) throw std::invalid_argument("element has wrong coefficient count");
}

void FiniteField::check2(const FFElem& a, const FFElem& b) const {
    check(a);
    check(b);
}

FFElem FiniteField::zero() const { return FFElem{this, std::vector<unsigned>(m_, 0)}; }

FFElem FiniteField::one() const {
    auto e = zero();
    e.c[0] = 1 % p_;
    return e;
}

FFElem FiniteField::gen() const {
    auto e = zero();
    if (m_ == 1)
        e.c[0] = 1;
    else
        e.c[1] = 1;
    return e;
}

FFElem FiniteField::from_coeffs(std::vector<unsigned> c) const {
    if (c.size() > m_) throw std::invalid_argument("too many coefficients for this field");
    c.resize(m_, 0);
    for (auto& x : c) x %= p_;
    return FFElem{this, std::move(c)};
}

FFElem FiniteField::from_index(unsigned long idx) const {
    if (idx >= q_) throw std::out_of_range("element index out of range");
    std::vector<unsigned> c(m_);
    for (unsigned i = 0; i < m_; ++i) {
        c[i] = static_cast<unsigned>(idx % p_);
        idx /= p_;
    }
    return FFElem{this, std::move(c)};
}

unsigned long FiniteField::index(const FFElem& a) const {
    check(a);
    unsigned long idx = 0;
    for (unsigned i = m_; i-- > 0;) idx = idx * p_ + a.c[i];
    return idx;
}

bool FiniteField::is_zero(const FFElem& a) const {
    check(a);
    return std::all_of(a.c.begin(), a.c.end(), [](unsigned x) { return x == 0; });
}

bool FiniteField::is_one(const FFElem& a) const {
    check(a);
    return a == one();
}

FFElem FiniteField::add(const FFElem& a, const FFElem& b) const {
    check2(a, b);
    auto r = a;
    for (unsigned i = 0; i < m_; ++i) r.c[i] = (r.c[i] + b.c[i]) % p_;
    return r;
}

FFElem FiniteField::sub(const FFElem& a, const FFElem& b) const {
    check2(a, b);
    auto r = a;
    for (unsigned i = 0; i < m_; ++i) r.c[i] = (r.c[i] + p_ - b.c[i]) % p_;
    return r;
}

FFElem FiniteField::neg(const FFElem& a) const { return sub(zero(), a); }

FFElem FiniteField::mul(const FFElem& a, const FFElem& b) const {
    check2(a, b);
    Poly prod(2 * m_ - 1, 0);
    for (unsigned i = 0; i < m_; ++i)
        for (unsigned j = 0; j < m_; ++j)
            prod[i + j] = (prod[i + j] + a.c[i] * b.c[j]) % p_;
    Poly f = modulus_;
    f.push_back(1);
    Poly r = poly_mod(std::move(prod), f, p_);
    r.resize(m_, 0);
    return FFElem{this, std::move(r)};
}

FFElem FiniteField::pow(const FFElem& a, unsigned long long e) const {
    check(a);
    FFElem r = one();
    FFElem base = a;
    while (e) {
        if (e & 1) r = mul(r, base);
        base = mul(base, base);
        e >>= 1;
    }
    return r;
}

FFElem FiniteField::inv(const FFElem& a) const {
    if (is_zero(a)) throw std::domain_error("division by zero in finite field");
    return pow(a, q_ - 2);
}

FFElem FiniteField::frobenius(const FFElem& a) const { return pow(a, p_); }

FFElem FiniteField::frobenius_inv(const FFElem& a) const {
    // Frobenius has order m on F_{p^m}; its inverse is the (m-1)-st power.
    unsigned long long e = 1;
    for (unsigned i = 0; i + 1 < m_; ++i) e *= p_;
    return pow(a, e);
}

bool FiniteField::is_square(const FFElem& a) const {
    check(a);
    if (p_ == 2 || is_zero(a)) return true;
    return is_one(pow(a, (q_ - 1) / 2));
}

std::optional<FFElem> FiniteField::sqrt(const FFElem& a) const {
    check(a);
    if (is_zero(a)) return zero();
    if (p_ == 2) return frobenius_inv(a); // squaring is bijective
    if (!is_square(a)) return std::nullopt;
    FFElem r = zero();
    if (q_ % 4 == 3) {
        r = pow(a, (q_ + 1) / 4);
    } else {
        // Tonelli-Shanks with the smallest-index non-residue as auxiliary.
        unsigned long long s = q_ - 1;
        unsigned e = 0;
        while (s % 2 == 0) {
            s /= 2;
            ++e;
        }
        FFElem n = zero();
        for (unsigned long i = 1; i < q_; ++i) {
            n = from_index(i);
            if (!is_square(n)) break;
        }
        FFElem x = pow(a, (s + 1) / 2);
        FFElem b = pow(a, s);
        FFElem g = pow(n, s);
        unsigned rdeg = e;
        while (!is_one(b)) {
            unsigned mdeg = 0;
            FFElem t = b;
            while (!is_one(t)) {
                t = mul(t, t);
                ++mdeg;
            }
            FFElem gs = g;
            for (unsigned i = 0; i + mdeg + 1 < rdeg; ++i) gs = mul(gs, gs);
            x = mul(x, gs);
            g = mul(gs, gs);
            b = mul(b, g);
            rdeg = mdeg;
        }
        r = x;
    }
    FFElem r2 = neg(r);
    return index(r) <= index(r2) ? r : r2;
}

unsigned FiniteField::trace(const FFElem& a) const {
    check(a);
    FFElem t = zero();
    FFElem x = a;
    for (unsigned i = 0; i < m_; ++i) {
        t = add(t, x);
        x = frobenius(x);
    }
    for (unsigned i = 1; i < m_; ++i)
        if (t.c[i] != 0) throw std::logic_error("trace left the prime field");
    return t.c[0];
}

std::optional<FFElem> FiniteField::artin_schreier_solve(const FFElem& c) const {
    check(c);
    if (trace(c) != 0) return std::nullopt;
    for (unsigned long i = 0; i < q_; ++i) {
        FFElem x = from_index(i);
        if (sub(pow(x, p_), x) == c) return x;
    }
    return std::nullopt; // unreachable when the trace vanishes
}

std::vector<FFElem> FiniteField::all_elements() const {
    std::vector<FFElem> out;
    out.reserve(q_);
    for (unsigned long i = 0; i < q_; ++i) out.push_back(from_index(i));
    return out;
}

std::string FiniteField::to_string(const FFElem& a) const {
    check(a);
    // Digit string c_0 c_1 ... with trailing zeros trimmed; "0" for zero.
    std::size_t last = 0;
    for (std::size_t i = 0; i < a.c.size(); ++i)
        if (a.c[i] != 0) last = i;
    std::string s;
    for (std::size_t i = 0; i <= last; ++i) s += static_cast<char>('0' + a.c[i]);
    if (std::all_of(a.c.begin(), a.c.end(), [](unsigned x) { return x == 0; })) return "0";
    return s;
}

FieldEmbedding::FieldEmbedding(const FiniteField& s, const FiniteField& d)
    : src_(&s), dst_(&d), gen_image_(d.zero()) {
    if (s.p() != d.p()) throw std::invalid_argument("embedding requires equal characteristic");
    if (d.m() % s.m() != 0)
        throw std::invalid_argument("no embedding: source degree does not divide target degree");
    // Root of the source modulus in the destination, smallest index first.
    for (unsigned long i = 0; i < d.q(); ++i) {
        FFElem x = d.from_index(i);
        FFElem acc = d.zero();
        FFElem xp = d.one();
        for (unsigned k = 0; k < s.m(); ++k) {
            FFElem coeff = d.zero();
            coeff.c[0] = s.modulus()[k] % d.p();
            acc = d.add(acc, d.mul(coeff, xp));
            xp = d.mul(xp, x);
        }
        acc = d.add(acc, xp); // leading monic term
        if (d.is_zero(acc)) {
            gen_image_ = x;
            return;
        }
    }
    throw std::logic_error("no root of source modulus in destination field");
}

const FieldEmbedding& FieldEmbedding::get(const FiniteField& src, const FiniteField& dst) {
    static std::map<std::pair<const FiniteField*, const FiniteField*>,
                    std::unique_ptr<FieldEmbedding>>
        cache;
    static std::mutex mx;
    std::lock_guard<std::mutex> lock(mx);
    auto key = std::make_pair(&src, &dst);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    auto emb = std::unique_ptr<FieldEmbedding>(new FieldEmbedding(src, dst));
    auto& ref = *emb;
    cache.emplace(key, std::move(emb));
    return ref;
}

FFElem FieldEmbedding::apply(const FFElem& a) const {
    if (a.field != src_) throw std::invalid_argument("element not in the embedding's source field");
    FFElem acc = dst_->zero();
    FFElem xp = dst_->one();
    for (unsigned k = 0; k < src_->m(); ++k) {
        FFElem coeff = dst_->zero();
        coeff.c[0] = a.c[k] % dst_->p();
        acc = dst_->add(acc, dst_->mul(coeff, xp));
        xp = dst_->mul(xp, gen_image_);
    }
    return acc;
}

} // namespace ascend
