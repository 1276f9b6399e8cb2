#include "ascend/lifts.hpp"

#include "ascend/errors.hpp"
#include "ascend/ramification.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ascend {

namespace {

/* ---- polynomial helpers over the quadratic layer (c[j] = coeff of x^j) ---- */

QElem qshift(const QuadExt& qx, const QElem& v, long k) {
    const ValuedTower& tw = qx.base();
    return qx.make(tw.mul_pi(v.a, k), tw.mul_pi(v.b, k));
}

std::vector<QElem> qp_mul(const QuadExt& qx, const std::vector<QElem>& f,
                          const std::vector<QElem>& g) {
    const ValuedTower& tw = qx.base();
    std::vector<QElem> h(f.size() + g.size() - 1, qx.from_base(tw.zero()));
    for (size_t i = 0; i < f.size(); ++i)
        for (size_t j = 0; j < g.size(); ++j)
            h[i + j] = qx.add(h[i + j], qx.mul(f[i], g[j]));
    return h;
}

std::vector<QElem> qp_sub(const QuadExt& qx, std::vector<QElem> f,
                          const std::vector<QElem>& g) {
    if (g.size() > f.size()) f.resize(g.size(), qx.from_base(qx.base().zero()));
    for (size_t j = 0; j < g.size(); ++j) f[j] = qx.sub(f[j], g[j]);
    return f;
}

/* Absolute precision floor of a quadratic element, v(p) = 1 units. */
Rat q_aprec(const QuadExt& qx, const QElem& x) {
    const ValuedTower& tw = qx.base();
    Rat a = tw.aprec_of(x.a), b = tw.aprec_of(x.b);
    return a < b ? a : b;
}

/* Residue of an integral element; nullopt when the residue involves the
 * quadratic generator (leaves the residue field). */
std::optional<FFElem> q_residue(const QuadExt& qx, const QElem& x) {
    const ValuedTower& tw = qx.base();
    const FiniteField& k = tw.residue_field();
    Rat margin(1, static_cast<long long>(tw.e()));
    if (qx.is_apparent_zero(x)) {
        if (q_aprec(qx, x) < margin)
            throw precision_error("residue uncertified: element vanishes to working "
                                  "precision but the precision does not cover v = 0");
        return k.zero();
    }
    auto v = qx.val(x);
    if (!v) throw precision_error("residue uncertified");
    if (*v < Rat(0)) throw std::logic_error("residue of a non-integral element");
    if (Rat(0) < *v) return k.zero();
    // v(x) = 0: the quadratic component must sit strictly above the unit part
    if (!tw.is_apparent_zero(x.b)) {
        auto vb = tw.val(x.b);
        if (vb && !(Rat(0) < *vb)) return std::nullopt;
    }
    if (tw.is_apparent_zero(x.a) || tw.val_pi(x.a) != 0) return std::nullopt;
    return tw.leading_digit(x.a);
}

/* Power-series square root: S(0) = 1, S^2 = F, computed through x^terms.
 * p = 2 so division by 2 is the exact shift pi^{-e}. */
std::vector<QElem> series_sqrt(const QuadExt& qx, const std::vector<QElem>& F,
                               unsigned terms) {
    const ValuedTower& tw = qx.base();
    const long e = static_cast<long>(tw.e());
    std::vector<QElem> S;
    S.push_back(qx.from_base(tw.one()));
    for (unsigned d = 1; d <= terms; ++d) {
        QElem acc = d < F.size() ? F[d] : qx.from_base(tw.zero());
        for (unsigned i = 1; i < d; ++i)
            acc = qx.sub(acc, qx.mul(S[i], S[d - i]));
        S.push_back(qshift(qx, acc, -e));
    }
    return S;
}

/* ---- polynomial helpers over the base tower ---- */

std::vector<TElem> bp_mul(const ValuedTower& tw, const std::vector<TElem>& f,
                          const std::vector<TElem>& g) {
    std::vector<TElem> h(f.size() + g.size() - 1, tw.zero());
    for (size_t i = 0; i < f.size(); ++i)
        for (size_t j = 0; j < g.size(); ++j)
            h[i + j] = tw.add(h[i + j], tw.mul(f[i], g[j]));
    return h;
}

/* Horner evaluation returning (f(y), f'(y)). */
std::pair<TElem, TElem> bp_eval_d(const ValuedTower& tw, const std::vector<TElem>& f,
                                  const TElem& y) {
    TElem v = tw.zero(), d = tw.zero();
    for (size_t j = f.size(); j-- > 0;) {
        d = tw.add(tw.mul(d, y), v);
        v = tw.add(tw.mul(v, y), f[j]);
    }
    return {v, d};
}

/* Solve the small dense system M q = b by elimination with min-valuation
 * pivoting. */
std::vector<TElem> solve_linear(const ValuedTower& tw, std::vector<std::vector<TElem>> M,
                                std::vector<TElem> b) {
    const size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t best = col;
        bool found = false;
        long bestv = 0;
        for (size_t row = col; row < n; ++row) {
            if (tw.is_apparent_zero(M[row][col])) continue;
            long v = tw.val_pi(M[row][col]);
            if (!found || v < bestv) { found = true; bestv = v; best = row; }
        }
        if (!found) throw std::logic_error("singular linear system in the lifting solve");
        std::swap(M[col], M[best]);
        std::swap(b[col], b[best]);
        for (size_t row = col + 1; row < n; ++row) {
            if (tw.is_apparent_zero(M[row][col])) continue;
            TElem f = tw.div(M[row][col], M[col][col]);
            for (size_t j = col; j < n; ++j)
                M[row][j] = tw.sub(M[row][j], tw.mul(f, M[col][j]));
            b[row] = tw.sub(b[row], tw.mul(f, b[col]));
        }
    }
    std::vector<TElem> q(n, tw.zero());
    for (size_t row = n; row-- > 0;) {
        TElem acc = b[row];
        for (size_t j = row + 1; j < n; ++j)
            acc = tw.sub(acc, tw.mul(M[row][j], q[j]));
        q[row] = tw.div(acc, M[row][row]);
    }
    return q;
}

void require_unit(const ValuedTower& tw, const TElem& x, const char* what) {
    if (tw.is_apparent_zero(x) || tw.val_pi(x) != 0)
        throw std::invalid_argument(std::string(what) + " must be a unit");
}

} // namespace

/* ---- good-reduction check ---- */

ReductionReport check_good_reduction(const QuadExt& qx, const std::vector<QElem>& F_in) {
    const ValuedTower& tw = qx.base();
    if (tw.p() != 2)
        throw std::invalid_argument("good-reduction check requires residue characteristic 2");
    if (F_in.empty()) throw std::invalid_argument("empty polynomial");
    const FiniteField& k = tw.residue_field();
    const long e = static_cast<long>(tw.e());

    size_t deg = F_in.size() - 1;
    while (deg > 0 && qx.is_apparent_zero(F_in[deg])) --deg;
    std::vector<QElem> F(F_in.begin(), F_in.begin() + static_cast<long>(deg) + 1);

    if (!qx.is_apparent_zero(qx.sub(F[0], qx.from_base(tw.one()))))
        throw std::invalid_argument("good-reduction check requires F(0) = 1");

    ReductionReport rep;
    if (deg == 0) {
        rep.verdict = ReductionReport::Verdict::good;
        rep.trivial_reduction = true;
        rep.defect_is_bound = true;
        rep.defect_valuation = q_aprec(qx, F[0]);
        rep.sqrt_poly = {qx.from_base(tw.one())};
        rep.detail = "constant polynomial: split cover";
        return rep;
    }

    const unsigned h = static_cast<unsigned>((deg + 1) / 2);
    std::vector<QElem> S = series_sqrt(qx, F, h);

    // integral truncation: stop at the first coefficient falling outside the ring
    std::vector<QElem> Q;
    Q.push_back(S[0]);
    for (unsigned j = 1; j <= h; ++j) {
        if (!qx.is_apparent_zero(S[j])) {
            auto v = qx.val(S[j]);
            if (v && *v < Rat(0)) break;
        }
        Q.push_back(S[j]);
    }
    rep.sqrt_poly = Q;

    std::vector<QElem> D = qp_sub(qx, F, qp_mul(qx, Q, Q));

    std::optional<Rat> vg;
    Rat zero_floor(0);
    bool have_floor = false;
    for (const QElem& c : D) {
        if (qx.is_apparent_zero(c)) {
            Rat a = q_aprec(qx, c);
            if (!have_floor || a < zero_floor) { zero_floor = a; have_floor = true; }
            continue;
        }
        auto v = qx.val(c);
        if (!v) throw precision_error("defect valuation uncertified");
        if (!vg || *v < *vg) vg = *v;
    }
    if (!vg) {
        rep.defect_is_bound = true;
        rep.defect_valuation = zero_floor;
    } else {
        rep.defect_valuation = *vg;
        if (have_floor && zero_floor < *vg && zero_floor < Rat(2))
            throw precision_error("defect valuation uncertified: a vanishing coefficient "
                                  "is not resolved down to v(4)");
    }

    if (vg && *vg < Rat(2)) {
        rep.verdict = ReductionReport::Verdict::bad_model;
        rep.detail = "defect valuation " + vg->str() + " below v(4) = 2";
        return rep;
    }

    for (size_t j = 1; j < Q.size(); ++j) {
        auto rq = q_residue(qx, Q[j]);
        if (!rq || !k.is_zero(*rq)) {
            rep.verdict = ReductionReport::Verdict::inconclusive;
            rep.detail = "truncated square root does not reduce to 1";
            return rep;
        }
    }

    // G = (F - Q^2)/4; the reduction is z^2 - z = G-bar, normalized
    std::map<unsigned, FFElem> gbar;
    FFElem g0 = k.zero();
    for (size_t j = 0; j < D.size(); ++j) {
        QElem Gj = qshift(qx, D[j], -2 * e);
        auto rj = q_residue(qx, Gj);
        if (!rj) {
            rep.verdict = ReductionReport::Verdict::inconclusive;
            rep.detail = "reduction leaves the residue field";
            return rep;
        }
        if (j == 0) g0 = *rj;
        else if (!k.is_zero(*rj)) gbar[static_cast<unsigned>(j)] = *rj;
    }

    rep.verdict = ReductionReport::Verdict::good;
    if (gbar.empty() && k.is_zero(g0)) {
        rep.trivial_reduction = true;
        rep.detail = "reduction is the split cover";
        return rep;
    }
    NormalizeResult nr = normalize_with_constant(as_local(k, gbar), g0);
    rep.reduced = nr.reduced;
    if (rep.reduced.trivial) {
        rep.trivial_reduction = true;
        rep.detail = "reduction is the split cover";
    } else {
        rep.conductor = conductor(rep.reduced);
    }
    return rep;
}

ReductionReport check_good_reduction(const ValuedTower& tw, const VPoly& F) {
    if (F.tower != &tw) throw std::invalid_argument("polynomial belongs to a different tower");
    long degmax = 0;
    for (const auto& [j, c] : F.c) {
        if (j < 0) throw std::invalid_argument("good-reduction check needs exponents >= 0");
        degmax = std::max(degmax, j);
    }
    // pi itself is never a square in the tower, so this layer is a genuine
    // field; all arithmetic below stays in the embedded base anyway
    QuadExt qx(tw, tw.pi_pow(1));
    std::vector<QElem> coeffs(static_cast<size_t>(degmax) + 1, qx.from_base(tw.zero()));
    for (const auto& [j, c] : F.c) coeffs[static_cast<size_t>(j)] = qx.from_base(c);
    return check_good_reduction(qx, coeffs);
}

/* ---- four-point lift ---- */

Conductor4Lift construct_conductor4_lift(const ValuedTower& tw, const FFElem& alpha,
                                         const FFElem& beta, const TElem& A,
                                         const TElem& U, unsigned r,
                                         std::shared_ptr<const QuadExt> ext) {
    if (tw.p() != 2) throw std::invalid_argument("conductor-4 lifting requires p = 2");
    if (r < 3) throw std::invalid_argument("the parameter r must be at least 3");
    const long rr = static_cast<long>(r);
    if (tw.e() != 2 * (2 * r - 1))
        throw std::invalid_argument("tower must satisfy pi^{2(2r-1)} = 2");
    const FiniteField& k = tw.residue_field();
    if (alpha.field != &k || beta.field != &k)
        throw std::invalid_argument("alpha, beta must lie in the tower's residue field");
    if (k.is_zero(alpha)) throw std::invalid_argument("alpha must be nonzero");

    require_unit(tw, A, "A");
    require_unit(tw, U, "U");
    {
        FFElem au2 = k.mul(tw.leading_digit(A),
                           k.mul(tw.leading_digit(U), tw.leading_digit(U)));
        if (au2 != alpha)
            throw std::invalid_argument("-A U^2 must reduce to alpha");
        TElem diff = tw.sub(U, A);
        if (tw.is_apparent_zero(diff) || tw.val_pi(diff) != 0)
            throw std::invalid_argument("U - A must be a unit");
    }

    Conductor4Lift out;
    out.r = r;
    out.alpha = alpha;
    out.beta = beta;
    out.A = A;
    out.U = U;
    out.B = tw.teich(beta);

    // arg = -rho^3 (rho^2 B + A) U with rho = pi^2
    TElem inner = tw.add(tw.mul_pi(out.B, 4), A);
    TElem arg = tw.neg(tw.mul_pi(tw.mul(inner, U), 6));

    std::optional<TElem> w_base;
    try {
        w_base = tw.sqrt(arg);
    } catch (const sqrt_obstruction&) {
        // the root leaves the tower: a quadratic layer carries it
    }

    std::shared_ptr<const QuadExt> use = std::move(ext);
    QElem w;
    if (w_base) {
        if (!use) use = std::make_shared<QuadExt>(tw, tw.pi_pow(1));
        w = use->from_base(*w_base);
    } else if (!use) {
        if (tw.val_pi(arg) != 6)
            throw std::logic_error("unexpected valuation for the discriminant argument");
        use = std::make_shared<QuadExt>(tw, tw.unit_part(arg));
        w = qshift(*use, use->theta(), 3); // w^2 = delta pi^6 = arg exactly
    } else {
        // express arg through the layer already attached: arg = delta pi^6 s
        TElem s = tw.div(tw.mul_pi(arg, -6), use->delta());
        TElem sb;
        try {
            sb = tw.sqrt(s);
        } catch (const sqrt_obstruction&) {
            throw extension_needed("the discriminant argument is not a square times the "
                                   "attached quadratic layer; a second layer would be needed");
        }
        w = use->mul_base(qshift(*use, use->theta(), 3), sb);
    }
    const QuadExt& qx = *use;
    out.ext = use;
    out.w = w;

    if (!qx.is_apparent_zero(qx.sub(qx.mul(w, w), qx.from_base(arg))))
        throw std::logic_error("square root certification failed: w^2 != arg");

    // V = -rho^2 B - A + w, so (V + rho^2 B + A)^2 = arg
    TElem negBA = tw.neg(tw.add(tw.mul_pi(out.B, 4), A));
    out.V = qx.add(qx.from_base(negBA), w);

    // q = rho(-rho^{2r-2} B - rho^{2r-4} A - U - rho^{2r-4} V)
    TElem qb = tw.neg(tw.add(tw.add(tw.mul_pi(out.B, 4 * rr - 4), tw.mul_pi(A, 4 * rr - 8)), U));
    out.q = qshift(qx, qx.sub(qx.from_base(qb), qshift(qx, out.V, 4 * rr - 8)), 2);

    // certify q^2 = rho^2 (rho^{4r-5} U V + U^2)
    {
        QElem rhs = qshift(qx, qx.add(qshift(qx, qx.mul_base(out.V, U), 8 * rr - 10),
                                      qx.from_base(tw.mul(U, U))),
                           4);
        if (!qx.is_apparent_zero(qx.sub(qx.mul(out.q, out.q), rhs)))
            throw std::logic_error("certification failed: q^2 != rho^2(rho^{4r-5} U V + U^2)");
    }

    // branch points {0, rho^{4r-4} A, rho U, rho U + rho^{4r-4} V}
    QElem P1 = qx.from_base(tw.zero());
    QElem P2 = qx.from_base(tw.mul_pi(A, 8 * rr - 8));
    QElem P3 = qx.from_base(tw.mul_pi(U, 2));
    QElem P4 = qx.add(P3, qshift(qx, out.V, 8 * rr - 8));
    out.points = {P1, P2, P3, P4};

    // F = (1 - P2 x)(1 - P3 x)(1 - P4 x); the root at 0 contributes the pole at t = 0
    QElem one = qx.from_base(tw.one());
    std::vector<QElem> F =
        qp_mul(qx, qp_mul(qx, {one, qx.neg(P2)}, {one, qx.neg(P3)}), {one, qx.neg(P4)});

    // exact defect of the designated model Q = 1 + q x:
    //   F - Q^2 - 4Bx + 4AU^2 x^3
    //     = (2 rho^{4r-3} A U + rho^{8r-8} A V) x^2 - rho^{8r-7} A U V x^3
    {
        std::vector<QElem> D = qp_sub(qx, F, qp_mul(qx, {one, out.q}, {one, out.q}));
        const long e = static_cast<long>(tw.e());
        D[1] = qx.sub(D[1], qx.from_base(tw.mul_pi(out.B, 2 * e)));
        D[3] = qx.add(D[3], qx.from_base(tw.mul_pi(tw.mul(A, tw.mul(U, U)), 2 * e)));

        QElem D2 = qx.add(qx.from_base(tw.mul_pi(tw.mul(A, U), 12 * rr - 8)),
                          qshift(qx, qx.mul_base(out.V, A), 16 * rr - 16));
        QElem D3 = qx.neg(qshift(qx, qx.mul_base(out.V, tw.mul(A, U)), 16 * rr - 14));
        bool ok = qx.is_apparent_zero(D[0]) && qx.is_apparent_zero(D[1]) &&
                  qx.is_apparent_zero(qx.sub(D[2], D2)) &&
                  qx.is_apparent_zero(qx.sub(D[3], D3));
        if (!ok) throw std::logic_error("certification failed: defect closed form mismatch");

        auto vg = qx.val(D2);
        Rat expect(6 * static_cast<long long>(r) - 4, 2 * static_cast<long long>(r) - 1);
        if (!vg || *vg != expect)
            throw std::logic_error("certification failed: defect valuation != (6r-4)/(2r-1)");
        // strict margin over v(4): (6r-4)/(2r-1) - 2 = (2r-2)/(2r-1) >= 1/e
        Rat margin(1, static_cast<long long>(tw.e()));
        if (!(Rat(2) + margin <= expect))
            throw std::logic_error("certification failed: defect does not clear v(4) by 1/e");
    }

    out.report = check_good_reduction(qx, F);
    if (out.report.verdict != ReductionReport::Verdict::good || out.report.trivial_reduction)
        throw std::logic_error("certification failed: model does not reduce (" +
                               out.report.detail + ")");
    std::map<unsigned, FFElem> want;
    want[3] = alpha;
    if (!k.is_zero(beta)) want[1] = beta;
    const ASFunction& red = out.report.reduced;
    if (red.branch.size() != 1 || !k.is_zero(red.branch[0].c) || red.branch[0].poly != want)
        throw std::logic_error("certification failed: reduction is not alpha/t^3 + beta/t");
    return out;
}

/* ---- 2r-point configuration ---- */

PagotLift solve_pagot(const ValuedTower& tw, unsigned r, const std::vector<TElem>& T) {
    if (tw.p() != 2) throw std::invalid_argument("the 2r-point configuration requires p = 2");
    if (r < 1) throw std::invalid_argument("r must be positive");
    if (tw.e() != 2 * (2 * r - 1))
        throw std::invalid_argument("tower must satisfy pi^{2(2r-1)} = 2");
    if (T.size() != r) throw std::invalid_argument("need exactly r centers");
    if (!tw.is_apparent_zero(T[0]))
        throw std::invalid_argument("the first center must be 0");
    for (size_t i = 0; i < T.size(); ++i)
        for (size_t j = i + 1; j < T.size(); ++j) {
            TElem d = tw.sub(T[j], T[i]);
            if (tw.is_apparent_zero(d) || tw.val_pi(d) != 0)
                throw std::invalid_argument("centers must have pairwise unit differences");
        }

    const long rr = static_cast<long>(r);
    const long e = static_cast<long>(tw.e());
    PagotLift out;
    out.r = r;
    out.T = T;
    std::ostringstream log;

    // Q(x) = 1 + q_1 x + ... + q_{r-1} x^{r-1}; the x^r coefficient is forced
    // to vanish.  Root conditions at the prescribed centers T_2..T_r:
    //   sum_j q_j (rho T_k)^{r-1-j} = pi^{4r-3} sigma_k - (rho T_k)^{r-1},
    // sigma_k = sqrt(1/T_k); linear in the q_j (canonical sign +1; every sign
    // pattern yields the same reduction data).
    std::vector<TElem> q(r, tw.zero());
    q[0] = tw.one();
    if (r >= 2) {
        const size_t nu = r - 1;
        std::vector<std::vector<TElem>> M(nu, std::vector<TElem>(nu, tw.zero()));
        std::vector<TElem> rhs(nu, tw.zero());
        for (size_t k = 1; k <= nu; ++k) {
            TElem rhoT = tw.mul_pi(T[k], 2);
            std::vector<TElem> pw(r, tw.one()); // pw[i] = (rho T_k)^i
            for (size_t i = 1; i < r; ++i) pw[i] = tw.mul(pw[i - 1], rhoT);
            for (size_t j = 1; j <= nu; ++j) M[k - 1][j - 1] = pw[r - 1 - j];
            TElem sigma;
            try {
                sigma = tw.sqrt(tw.inv(T[k]));
            } catch (const sqrt_obstruction&) {
                throw extension_needed("sqrt(1/T_k) leaves the tower; use Teichmuller "
                                      "representatives for the centers");
            }
            rhs[k - 1] = tw.sub(tw.mul_pi(sigma, 4 * rr - 3), pw[r - 1]);
        }
        std::vector<TElem> sol = solve_linear(tw, M, rhs);
        for (size_t j = 1; j <= nu; ++j) q[j] = sol[j - 1];
    }
    out.sqrt_coeffs = q;

    // M(x) = Q(x)^2 - 4 x^{2r-1}
    std::vector<TElem> Mp = bp_mul(tw, q, q);
    Mp.resize(2 * r, tw.zero());
    Mp[2 * r - 1] = tw.sub(Mp[2 * r - 1], tw.from_int(4));

    // deflate the prescribed roots 1/(rho T_k), k = 2..r
    std::vector<TElem> N = Mp;
    for (size_t k = 1; k < r; ++k) {
        TElem c = tw.mul_pi(T[k], 2);
        std::vector<TElem> H(N.size() - 1, tw.zero());
        H[0] = N[0];
        for (size_t j = 1; j < H.size(); ++j) H[j] = tw.add(N[j], tw.mul(c, H[j - 1]));
        TElem rem = tw.add(N.back(), tw.mul(c, H.back()));
        if (!tw.is_apparent_zero(rem))
            throw std::logic_error("deflation left a nonzero remainder");
        N = std::move(H);
    }
    if (N.size() != r + 1) throw std::logic_error("deflation degree mismatch");

    // P*(y) = sum_i N_{r-i} rho^i y^i has roots at the perturbed centers
    std::vector<TElem> Pst(r + 1, tw.zero());
    for (size_t i = 0; i <= r; ++i) Pst[i] = tw.mul_pi(N[r - i], 2 * static_cast<long>(i));

    const Rat target(tw.prec() - 6 * e, e);
    out.Tt.assign(r, tw.zero());
    for (size_t k = 0; k < r; ++k) {
        TElem y = T[k]; // seed: the unperturbed center (0 for k = 0)
        bool done = false;
        for (unsigned step = 0; step <= 30; ++step) {
            auto [fy, dfy] = bp_eval_d(tw, Pst, y);
            if (tw.is_apparent_zero(fy)) {
                log << "center " << k << ": residual zero after " << step << " steps\n";
                done = true;
                break;
            }
            auto vf = tw.val(fy);
            if (vf && target <= *vf) {
                log << "center " << k << ": residual v = " << vf->str() << " after "
                    << step << " steps\n";
                done = true;
                break;
            }
            if (step == 30) break;
            if (tw.is_apparent_zero(dfy))
                throw std::logic_error("vanishing derivative in the root refinement");
            y = tw.sub(y, tw.div(fy, dfy));
            ++out.newton_steps;
            log << "center " << k << " step " << step + 1 << ": v(residual) = "
                << (vf ? vf->str() : std::string("?")) << "\n";
        }
        if (!done) {
            out.transcript = log.str();
            throw precision_error("root refinement did not converge within the step "
                                  "budget; transcript:\n" + out.transcript);
        }
        out.Tt[k] = y;
    }

    // certify the perturbations: v(T~ - T) = v(2) exactly, W = (T~ - T)/2 a unit
    out.W.assign(r, tw.zero());
    for (size_t k = 0; k < r; ++k) {
        TElem diff = tw.sub(out.Tt[k], T[k]);
        auto v = tw.val(diff);
        if (!v || *v != Rat(1))
            throw std::logic_error("perturbation valuation is not v(2)");
        out.W[k] = tw.mul_pi(diff, -e);
        if (tw.val_pi(out.W[k]) != 0)
            throw std::logic_error("perturbation quotient is not a unit");
    }

    // branch points rho T_k, rho T~_k
    for (size_t k = 0; k < r; ++k) {
        out.points.push_back(tw.mul_pi(T[k], 2));
        out.points.push_back(tw.mul_pi(out.Tt[k], 2));
    }

    // the product over the nonzero branch points must reproduce M(x) exactly
    std::vector<TElem> F{tw.one()};
    for (const TElem& b : out.points) {
        if (tw.is_apparent_zero(b)) continue;
        F = bp_mul(tw, F, {tw.one(), tw.neg(b)});
    }
    if (F.size() != Mp.size())
        throw std::logic_error("branch polynomial degree mismatch");
    for (size_t j = 0; j < F.size(); ++j)
        if (!tw.is_apparent_zero(tw.sub(F[j], Mp[j])))
            throw std::logic_error("branch polynomial does not match Q^2 - 4x^{2r-1}");

    // independent reduction check: z^2 - z = 1/t^{2r-1}
    {
        std::map<long, TElem> cm;
        for (size_t j = 0; j < F.size(); ++j) cm[static_cast<long>(j)] = F[j];
        out.report = check_good_reduction(tw, vp_make(tw, std::move(cm)));
        const FiniteField& k2 = tw.residue_field();
        std::map<unsigned, FFElem> want;
        want[2 * r - 1] = k2.one();
        if (out.report.verdict != ReductionReport::Verdict::good ||
            out.report.trivial_reduction || out.report.reduced.branch.size() != 1 ||
            !k2.is_zero(out.report.reduced.branch[0].c) ||
            out.report.reduced.branch[0].poly != want)
            throw std::logic_error("certification failed: reduction is not 1/t^{2r-1}");
    }

    out.transcript = log.str();
    return out;
}

/* ---- full (4,4,2r) assembly ---- */

AssembledLift assemble_442r_lift(const FiniteField& k, const FFElem& alpha1,
                                 const FFElem& alpha2, const FFElem& beta1,
                                 const FFElem& beta2, unsigned r,
                                 const std::vector<FFElem>& extra, long prec_pi) {
    if (k.p() != 2) throw std::invalid_argument("assembly requires residue characteristic 2");
    if (r < 3) throw std::invalid_argument("the parameter r must be at least 3");
    if (extra.size() != r - 3)
        throw std::invalid_argument("need exactly r - 3 extra centers");
    for (const FFElem& x : {alpha1, alpha2, beta1, beta2})
        if (x.field != &k) throw std::invalid_argument("inputs must lie in the given field");
    if (k.is_zero(alpha1) || k.is_zero(alpha2))
        throw std::invalid_argument("alpha_1, alpha_2 must be nonzero");
    if (k.is_one(alpha1) || k.is_one(alpha2))
        throw std::invalid_argument("alpha_i = 1 collides with the shared unit A = 1");
    if (alpha1 == alpha2)
        throw std::invalid_argument("alpha_1 and alpha_2 must be distinct");

    FFElem s1 = *k.sqrt(alpha1), s2 = *k.sqrt(alpha2);
    {
        std::set<unsigned long> seen{k.index(s1), k.index(s2)};
        for (const FFElem& x : extra) {
            if (x.field != &k) throw std::invalid_argument("extra centers must lie in the field");
            if (k.is_zero(x)) throw std::invalid_argument("extra centers must be nonzero");
            if (!seen.insert(k.index(x)).second)
                throw std::invalid_argument("centers must be pairwise distinct");
        }
    }

    const unsigned e = 2 * (2 * r - 1);
    const long prec = prec_pi > 0 ? prec_pi : 60L * static_cast<long>(e);
    const ValuedTower& tw = ValuedTower::get(2, k.m(), e, prec);
    if (&tw.residue_field() != &k)
        throw std::invalid_argument("field must be the canonical F_{2^m} instance");

    AssembledLift out;
    out.r = r;
    out.type = make_type(2, {4, 4, 2 * r});

    TElem A = tw.one();
    TElem U1 = tw.teich(s1), U2 = tw.teich(s2);
    out.c1 = construct_conductor4_lift(tw, alpha1, beta1, A, U1, r);
    out.c2 = construct_conductor4_lift(tw, alpha2, beta2, A, U2, r, out.c1.ext);
    out.ext = out.c1.ext;
    const QuadExt& qx = *out.ext;

    std::vector<TElem> T{tw.zero(), U1, U2};
    for (const FFElem& x : extra) T.push_back(tw.teich(x));
    out.c3 = solve_pagot(tw, r, T);

    out.loci.resize(3);
    out.loci[0] = out.c1.points;
    out.loci[1] = out.c2.points;
    for (const TElem& b : out.c3.points) out.loci[2].push_back(qx.from_base(b));

    out.loci_report = verify_branch_loci(required_intersections(out.type), qx, out.loci);
    if (!out.loci_report.all_pass)
        throw std::logic_error("assembly certification failed: branch loci do not realize "
                               "the required intersection pattern");

    // distinct points, labeled for the geometry
    std::vector<QElem> distinct;
    for (const auto& locus : out.loci)
        for (const QElem& pnt : locus) {
            bool dup = false;
            for (const QElem& seen : distinct)
                if (qx.is_apparent_zero(qx.sub(pnt, seen))) { dup = true; break; }
            if (!dup) distinct.push_back(pnt);
        }
    out.distinct_points = static_cast<unsigned>(distinct.size());
    if (out.distinct_points != 2 * r + 3)
        throw std::logic_error("assembly certification failed: expected 2r + 3 distinct "
                               "branch points");

    std::vector<std::pair<std::string, QElem>> labeled;
    for (size_t i = 0; i < distinct.size(); ++i) {
        std::string lab = "b";
        if (i + 1 < 10) lab += "0";
        lab += std::to_string(i + 1);
        labeled.emplace_back(lab, distinct[i]);
    }
    out.tree = tree_from_points(qx, labeled);
    out.partition = branch_partition(out.tree);
    {
        std::vector<unsigned> want{3, 3, 3};
        for (unsigned i = 3; i < r; ++i) want.push_back(2);
        if (out.partition != want)
            throw std::logic_error("assembly certification failed: branch partition is not "
                                   "(3,3,3,2,...,2)");
    }

    // geometry depths: exactly {1/(2r-1), 2r/(2r-1), (4r-4)/(2r-1)}; in
    // particular at least two distinct depths, so never equidistant
    {
        std::set<Rat> depths;
        for (const auto& [pr, d] : meeting_depths(out.tree)) depths.insert(d);
        const long long den = 2LL * r - 1;
        std::set<Rat> want{Rat(1, den), Rat(2LL * r, den), Rat(4LL * r - 4, den)};
        if (depths != want)
            throw std::logic_error("assembly certification failed: unexpected meeting depths");
        out.equidistant = depths.size() < 2;
    }

    DifferentReport dr = generic_different(out.type);
    out.d_s = special_different(out.type);
    out.d_eta = dr.d_eta;
    out.branch_count = dr.branch_count;
    if (out.d_s != out.d_eta || out.d_s != 4LL * (2 * r + 3) ||
        out.branch_count != static_cast<long long>(out.distinct_points))
        throw std::logic_error("assembly certification failed: different counts disagree "
                               "with the branch locus");
    return out;
}

} // namespace ascend
