#include "ascend/ramification.hpp"

#include <algorithm>
#include <stdexcept>

namespace ascend {

namespace {

long long ipow(long long b, unsigned e) {
    long long r = 1;
    for (unsigned i = 0; i < e; ++i) {
        if (r > (1LL << 50) / (b > 0 ? b : 1))
            throw std::overflow_error("power overflow in ramification data");
        r *= b;
    }
    return r;
}

} // namespace

ConductorType make_type(unsigned p, std::vector<unsigned> conductors) {
    if (p < 2) throw std::invalid_argument("characteristic must be a prime >= 2");
    if (conductors.empty()) throw std::invalid_argument("conductor list must be nonempty");
    for (std::size_t i = 0; i < conductors.size(); ++i) {
        unsigned c = conductors[i];
        if (c < 2) throw std::invalid_argument("conductors must be at least 2");
        if ((c - 1) % p == 0)
            throw std::invalid_argument("conductor minus one must be prime to p");
        if (i > 0 && conductors[i - 1] > c)
            throw std::invalid_argument("conductors must be ascending");
    }
    ConductorType t;
    t.p = p;
    t.n = static_cast<unsigned>(conductors.size());
    t.conductors = std::move(conductors);
    return t;
}

JumpData lower_jumps(const ConductorType& t) {
    const unsigned p = t.p, n = t.n;
    if (n == 0 || t.conductors.size() != n)
        throw std::invalid_argument("conductor type has no levels");

    JumpData jd;
    jd.p = p;
    jd.n = n;

    /* m_i = conductor_i - 1; lower jumps via
     *   j_l = p^l m_{l+1} - (p-1) sum_{i=1..l} p^{i-1} m_i  (l = 0..n-1). */
    std::vector<long long> m(n);
    for (unsigned i = 0; i < n; ++i) m[i] = static_cast<long long>(t.conductors[i]) - 1;

    jd.lower.resize(n);
    for (unsigned l = 0; l < n; ++l) {
        long long acc = ipow(p, l) * m[l];
        for (unsigned i = 0; i < l; ++i) acc -= (p - 1) * ipow(p, i) * m[i];
        jd.lower[l] = acc;
    }
    for (unsigned l = 0; l < n; ++l) {
        if (jd.lower[l] <= 0)
            throw std::logic_error("lower jump not positive; conductor type invalid");
        if (l > 0 && jd.lower[l] < jd.lower[l - 1])
            throw std::logic_error("lower jumps not nondecreasing");
    }

    /* Higher ramification filtration: |I_u| = p^n up to the first jump;
     * passing a jump value of multiplicity k divides the order by p^k. */
    const long long pn = ipow(p, n);
    std::vector<std::pair<long long, unsigned>> distinct; // (jump, multiplicity)
    for (unsigned l = 0; l < n; ++l) {
        if (!distinct.empty() && distinct.back().first == jd.lower[l])
            ++distinct.back().second;
        else
            distinct.emplace_back(jd.lower[l], 1);
    }
    {
        long long lo = 0;
        long long order = pn;
        for (auto& [j, k] : distinct) {
            jd.filtration.push_back({lo, j, static_cast<unsigned long long>(order)});
            lo = j + 1;
            order /= ipow(p, k);
        }
        jd.filtration.push_back({lo, -1, 1ULL});
    }

    /* Herbrand graph: slope on (J_prev, J] is |I_u| / p^n; breakpoints at
     * the distinct lower jumps. */
    {
        Rat x(0), y(0);
        long long order = pn;
        for (auto& [j, k] : distinct) {
            Rat slope(order, pn);
            HerbrandSegment seg{x, y, slope, Rat(j)};
            jd.herbrand.push_back(seg);
            y = y + slope * (Rat(j) - x);
            x = Rat(j);
            order /= ipow(p, k);
        }
        jd.herbrand.push_back({x, y, Rat(order, pn), Rat(-1)});
    }

    /* Upper jumps: phi(lower jump); must equal the conductor list minus
     * one slot by slot. */
    jd.upper.resize(n);
    for (unsigned l = 0; l < n; ++l) {
        Rat u = herbrand_eval(jd, Rat(jd.lower[l]));
        if (!u.is_integer())
            throw std::logic_error("upper jump not integral");
        jd.upper[l] = u.num;
        if (jd.upper[l] != m[l])
            throw std::logic_error("upper jumps disagree with conductors");
    }
    return jd;
}

Rat herbrand_eval(const JumpData& j, const Rat& x) {
    if (x < Rat(0)) throw std::invalid_argument("Herbrand function needs x >= 0");
    for (const auto& seg : j.herbrand) {
        bool in_range = (seg.x1 < Rat(0)) ? !(x < seg.x0)
                                          : (!(x < seg.x0) && !(seg.x1 < x));
        if (in_range) return seg.y0 + seg.slope * (x - seg.x0);
    }
    throw std::logic_error("Herbrand graph does not cover the query point");
}

long long special_different(const ConductorType& t) {
    const unsigned p = t.p, n = t.n;
    JumpData jd = lower_jumps(t);

    /* Route 1: sum over levels of (j_l + 1) p^{n-1-l} (p-1). */
    long long route1 = 0;
    for (unsigned l = 0; l < n; ++l)
        route1 += (jd.lower[l] + 1) * ipow(p, n - 1 - l) * (p - 1);

    /* Route 2: (p-1) sum p^l (m_{l+1} + 1). */
    long long route2 = 0;
    for (unsigned l = 0; l < n; ++l)
        route2 += ipow(p, l) * (static_cast<long long>(t.conductors[l]));
    route2 *= (p - 1);

    if (route1 != route2)
        throw std::logic_error("different routes disagree; jump formula broken");
    return route1;
}

DifferentReport generic_different(const ConductorType& t) {
    const unsigned p = t.p, n = t.n;
    DifferentReport r;
    r.d_s = special_different(t);

    long long d_eta = 0;
    for (unsigned l = 0; l < n; ++l)
        d_eta += ipow(p, l) * (static_cast<long long>(t.conductors[l]));
    d_eta *= (p - 1);
    r.d_eta = d_eta;

    const long long unit = (p - 1) * ipow(p, n - 1);
    r.b_integral = (d_eta % unit == 0);
    r.branch_count = r.b_integral ? d_eta / unit : 0;
    r.criterion_met = (r.d_s == r.d_eta) && r.b_integral;
    return r;
}

} // namespace ascend
