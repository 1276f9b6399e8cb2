#include "ascend/strata.hpp"

#include <algorithm>
#include <stdexcept>

namespace ascend {

namespace {

Stratum build_stratum(unsigned p, const std::vector<unsigned>& parts) {
    Stratum st;
    st.p = p;
    st.partition = parts;
    long long total = 0, corr = 0;
    for (unsigned e : parts) {
        total += e;
        corr += (e - 1) / p;
    }
    st.d = total - 2;
    st.r = static_cast<unsigned>(parts.size()) - 1;
    st.s = st.r * (p - 1);
    st.g = st.d * (p - 1) / 2;
    st.dimension = total - 1 - corr;
    st.neighborhood_dim = total - 3 - corr;
    return st;
}

/* partitions of `left` into parts <= cap with every part != 1 mod p,
 * built in descending order */
void gen_partitions(unsigned p, unsigned left, unsigned cap,
                    std::vector<unsigned>& cur,
                    std::vector<std::vector<unsigned>>& out) {
    if (left == 0) {
        out.push_back(cur);
        return;
    }
    for (unsigned e = std::min(left, cap); e >= 2; --e) {
        if (e % p == 1) continue;
        cur.push_back(e);
        gen_partitions(p, left - e, e, cur, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<Stratum> enumerate_strata(unsigned p, unsigned total) {
    if (p < 2) throw std::invalid_argument("characteristic must be a prime >= 2");
    long long d = static_cast<long long>(total) - 2;
    if (d * (p - 1) % 2 != 0)
        throw std::invalid_argument("genus d(p-1)/2 is not an integer");
    if (d * (p - 1) < 2)
        throw std::invalid_argument("genus must be at least 1");

    std::vector<std::vector<unsigned>> parts;
    std::vector<unsigned> cur;
    gen_partitions(p, total, total, cur, parts);
    std::sort(parts.begin(), parts.end(),
              [](const auto& a, const auto& b) { return a > b; });

    std::vector<Stratum> out;
    out.reserve(parts.size());
    for (auto& pr : parts) out.push_back(build_stratum(p, pr));
    return out;
}

CoverStratum stratum_of_cover(const CoverInvariants& c) {
    for (unsigned e : c.profile)
        if (e % c.p == 1)
            throw std::logic_error("coalescing profile has a part = 1 mod p; "
                                   "cover was not normalized");
    std::vector<unsigned> parts = c.profile;
    std::sort(parts.begin(), parts.end(), std::greater<unsigned>());

    CoverStratum cs;
    cs.stratum = build_stratum(c.p, parts);
    if (cs.stratum.d != static_cast<long long>(c.d))
        throw std::logic_error("profile total disagrees with the cover invariant d");
    cs.branch_points_generic = static_cast<unsigned>(cs.stratum.d + 2);
    cs.coalescing = parts;
    return cs;
}

bool even_coalescing(const std::vector<unsigned>& profile) {
    for (unsigned e : profile)
        if (e % 2 != 0) return false;
    return true;
}

} // namespace ascend
