#include "ascend/padic.hpp"

#include <stdexcept>

namespace ascend {

WRing::WRing(const FiniteField& residue, long capacity)
    : res_(&residue), p_(residue.p()), m_(residue.m()), N_(capacity) {
    if (N_ < 2) throw std::invalid_argument("coefficient ring capacity too small");
    mpz_ui_pow_ui(pN_.get_mpz_t(), p_, static_cast<unsigned long>(N_));
    phi_.reserve(m_);
    for (unsigned c : residue.modulus()) phi_.emplace_back(c);
}

WRing::Elem WRing::zero() const { return Elem(m_, mpz_class(0)); }

WRing::Elem WRing::one() const {
    Elem e = zero();
    e[0] = 1;
    return e;
}

WRing::Elem WRing::from_int(long long n) const {
    Elem e = zero();
    e[0] = mpz_class(static_cast<long>(n)) % pN_;
    if (e[0] < 0) e[0] += pN_;
    return e;
}

WRing::Elem WRing::from_residue(const FFElem& a) const {
    if (a.field != res_) throw std::invalid_argument("residue element from a different field");
    Elem e = zero();
    for (unsigned i = 0; i < m_; ++i) e[i] = a.c[i];
    return e;
}

bool WRing::is_zero(const Elem& a) const {
    for (const auto& c : a)
        if (c != 0) return false;
    return true;
}

WRing::Elem WRing::add(const Elem& a, const Elem& b) const {
    Elem r(m_);
    for (unsigned i = 0; i < m_; ++i) {
        r[i] = a[i] + b[i];
        if (r[i] >= pN_) r[i] -= pN_;
    }
    return r;
}

WRing::Elem WRing::sub(const Elem& a, const Elem& b) const {
    Elem r(m_);
    for (unsigned i = 0; i < m_; ++i) {
        r[i] = a[i] - b[i];
        if (r[i] < 0) r[i] += pN_;
    }
    return r;
}

WRing::Elem WRing::neg(const Elem& a) const { return sub(zero(), a); }

WRing::Elem WRing::reduce(std::vector<mpz_class> raw) const {
    // Reduce a degree < 2m-1 polynomial by the monic modulus, then mod p^N.
    for (std::size_t i = raw.size(); i-- > m_;) {
        if (raw[i] == 0) continue;
        mpz_class lead = raw[i];
        raw[i] = 0;
        for (unsigned j = 0; j < m_; ++j)
            if (phi_[j] != 0) raw[i - m_ + j] -= lead * phi_[j];
    }
    Elem r(m_);
    for (unsigned i = 0; i < m_; ++i) {
        r[i] = raw[i] % pN_;
        if (r[i] < 0) r[i] += pN_;
    }
    return r;
}

WRing::Elem WRing::mul(const Elem& a, const Elem& b) const {
    std::vector<mpz_class> raw(2 * m_ - 1, mpz_class(0));
    for (unsigned i = 0; i < m_; ++i) {
        if (a[i] == 0) continue;
        for (unsigned j = 0; j < m_; ++j)
            if (b[j] != 0) raw[i + j] += a[i] * b[j];
    }
    return reduce(std::move(raw));
}

WRing::Elem WRing::scal(const Elem& a, const mpz_class& c) const {
    Elem r(m_);
    for (unsigned i = 0; i < m_; ++i) {
        r[i] = (a[i] * c) % pN_;
        if (r[i] < 0) r[i] += pN_;
    }
    return r;
}

long WRing::vp(const Elem& a) const {
    long best = N_;
    for (const auto& c : a) {
        if (c == 0) continue;
        mpz_class t = c;
        long v = 0;
        while (v < best && mpz_divisible_ui_p(t.get_mpz_t(), p_)) {
            t /= p_;
            ++v;
        }
        if (v < best) best = v;
        if (best == 0) break;
    }
    return best;
}

WRing::Elem WRing::div_p(const Elem& a, long k) const {
    if (k == 0) return a;
    if (k < 0) return mul_p(a, -k);
    mpz_class pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), p_, static_cast<unsigned long>(k));
    Elem r(m_);
    for (unsigned i = 0; i < m_; ++i) {
        if (!mpz_divisible_p(a[i].get_mpz_t(), pk.get_mpz_t()))
            throw std::logic_error("inexact division by p^k in coefficient ring");
        r[i] = a[i] / pk;
    }
    return r;
}

WRing::Elem WRing::mul_p(const Elem& a, long k) const {
    if (k == 0) return a;
    if (k < 0) return div_p(a, -k);
    mpz_class pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), p_, static_cast<unsigned long>(k));
    Elem r(m_);
    for (unsigned i = 0; i < m_; ++i) r[i] = (a[i] * pk) % pN_;
    return r;
}

WRing::Elem WRing::trunc_p(const Elem& a, long k) const {
    if (k <= 0) return zero();
    if (k >= N_) return a;
    mpz_class pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), p_, static_cast<unsigned long>(k));
    Elem r(m_);
    for (unsigned i = 0; i < m_; ++i) r[i] = a[i] % pk;
    return r;
}

FFElem WRing::residue(const Elem& a) const {
    std::vector<unsigned> c(m_);
    for (unsigned i = 0; i < m_; ++i) c[i] = mpz_class(a[i] % p_).get_ui();
    return res_->from_coeffs(std::move(c));
}

WRing::Elem WRing::teichmuller(const FFElem& a) const {
    // Iterate z -> z^q; the correct-digit count increases every pass, so
    // N passes reach the fixed point at capacity.
    Elem z = from_residue(a);
    for (long it = 0; it < N_; ++it) {
        Elem zq = z;
        for (unsigned k = 0; k < m_; ++k) {
            // raise to the p-th power, m times
            Elem acc = one();
            for (unsigned j = 0; j < p_; ++j) acc = mul(acc, zq);
            zq = acc;
        }
        if (zq == z) break;
        z = zq;
    }
    return z;
}

WRing::Elem WRing::inv(const Elem& a) const {
    if (vp(a) != 0) throw std::domain_error("inverse of a non-unit in coefficient ring");
    Elem z = from_residue(res_->inv(residue(a)));
    // Newton: z <- z(2 - a z) doubles the correct digit count each pass.
    long correct = 1;
    while (correct < N_) {
        Elem az = mul(a, z);
        Elem t = sub(from_int(2), az);
        z = mul(z, t);
        correct *= 2;
    }
    return z;
}

} // namespace ascend
