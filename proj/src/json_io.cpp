#include "ascend/json_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

namespace ascend {

namespace {

/* ---- small parsing helpers (strict: reject rather than coerce) ---- */

unsigned get_unsigned(const Json& j, const char* what) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
        throw std::invalid_argument(std::string(what) + " must be a non-negative integer");
    return j.get<unsigned>();
}

long long get_ll(const Json& j, const char* what) {
    if (!j.is_number_integer() && !j.is_number_unsigned())
        throw std::invalid_argument(std::string(what) + " must be an integer");
    return j.get<long long>();
}

bool get_bool(const Json& j, const char* what) {
    if (!j.is_boolean()) throw std::invalid_argument(std::string(what) + " must be a boolean");
    return j.get<bool>();
}

std::string get_str(const Json& j, const char* what) {
    if (!j.is_string()) throw std::invalid_argument(std::string(what) + " must be a string");
    return j.get<std::string>();
}

const Json& member(const Json& j, const char* key) {
    if (!j.is_object()) throw std::invalid_argument("expected an object with key '" + std::string(key) + "'");
    auto it = j.find(key);
    if (it == j.end()) throw std::invalid_argument("missing key '" + std::string(key) + "'");
    return *it;
}

/* ---- residue-field digit strings ---- */

std::string ff_string(const FFElem& a) {
    const FiniteField& k = *a.field;
    std::vector<unsigned> c = a.c;
    while (c.size() > 1 && c.back() == 0) c.pop_back();
    if (c.size() == 1 && c[0] == 0) return "0";
    std::string s;
    if (k.p() <= 10) {
        for (unsigned d : c) s.push_back(static_cast<char>('0' + d));
    } else {
        for (size_t i = 0; i < c.size(); ++i) {
            if (i) s.push_back(',');
            s += std::to_string(c[i]);
        }
    }
    return s;
}

FFElem ff_parse(const FiniteField& k, const std::string& s, const char* what) {
    if (s.empty()) throw std::invalid_argument(std::string(what) + ": empty digit string");
    std::vector<unsigned> c;
    if (s.find(',') != std::string::npos) {
        size_t pos = 0;
        while (pos <= s.size()) {
            size_t next = s.find(',', pos);
            std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
                throw std::invalid_argument(std::string(what) + ": bad digit '" + tok + "'");
            c.push_back(static_cast<unsigned>(std::stoul(tok)));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
    } else {
        for (char ch : s) {
            if (ch < '0' || ch > '9')
                throw std::invalid_argument(std::string(what) + ": bad digit character '" + std::string(1, ch) + "'");
            c.push_back(static_cast<unsigned>(ch - '0'));
        }
    }
    for (unsigned d : c)
        if (d >= k.p())
            throw std::invalid_argument(std::string(what) + ": digit " + std::to_string(d) +
                                        " out of range for characteristic " + std::to_string(k.p()));
    if (c.size() > k.m())
        throw std::invalid_argument(std::string(what) + ": " + std::to_string(c.size()) +
                                    " digits in a degree-" + std::to_string(k.m()) + " residue field");
    return k.from_coeffs(std::move(c));
}

/* ---- tower signatures and element bodies ----
 *
 * Elements are stored as {"digits": [[pos, ff], ...], "prec": rat}; the
 * owning tower is written once per document as {"e", "m", "p"} (plus
 * "prec" in pi-slots for documents that must rebuild the exact working
 * tower). */

Json tower_sig(const ValuedTower& tw) {
    return Json{{"e", tw.e()}, {"m", tw.m()}, {"p", tw.p()}};
}

Json tower_sig_prec(const ValuedTower& tw) {
    Json s = tower_sig(tw);
    s["prec"] = tw.prec();
    return s;
}

const ValuedTower& tower_of_sig(const Json& sig, long prec_pi) {
    unsigned p = get_unsigned(member(sig, "p"), "tower.p");
    unsigned m = get_unsigned(member(sig, "m"), "tower.m");
    unsigned e = get_unsigned(member(sig, "e"), "tower.e");
    if (p == 0 || m == 0 || e == 0) throw std::invalid_argument("tower parameters must be positive");
    return ValuedTower::get(p, m, e, prec_pi);
}

long slots_of(const Rat& prec, unsigned e) {
    long long scaled = Rat::checked_mul(prec.num, e);
    if (scaled % prec.den != 0)
        throw std::invalid_argument("precision " + prec.str() + " is not a whole number of digit slots");
    return static_cast<long>(scaled / prec.den);
}

Json elem_body(const TElem& x) {
    const ValuedTower& tw = *x.tower;
    Json digs = Json::array();
    for (const auto& [pos, d] : tw.digits(x)) digs.push_back(Json::array({pos, ff_string(d)}));
    return Json{{"digits", std::move(digs)}, {"prec", tw.aprec_of(x).str()}};
}

long body_slots(const Json& j, unsigned e) {
    return slots_of(Rat::parse(get_str(member(j, "prec"), "prec")), e);
}

TElem elem_from_body(const ValuedTower& tw, const Json& j) {
    long aprec = body_slots(j, tw.e());
    const Json& digs = member(j, "digits");
    if (!digs.is_array()) throw std::invalid_argument("digits must be an array");
    std::vector<std::pair<long, FFElem>> d;
    long lo = 0;
    for (const Json& entry : digs) {
        if (!entry.is_array() || entry.size() != 2)
            throw std::invalid_argument("each digit must be a [position, value] pair");
        long pos = static_cast<long>(get_ll(entry[0], "digit position"));
        if (pos >= aprec)
            throw std::invalid_argument("digit position at or beyond the stated precision");
        lo = std::min(lo, pos);
        d.emplace_back(pos, ff_parse(tw.residue_field(), get_str(entry[1], "digit value"), "digit value"));
    }
    /* Library elements can exceed the tower's default precision after an
     * exact pi-shift; cap only against the coefficient-ring capacity. */
    if (aprec - lo > tw.prec() + 48L * static_cast<long>(tw.e()))
        throw std::invalid_argument("element data exceeds the tower's digit capacity");
    return tw.from_digits(d, aprec);
}

/* Elements of the quadratic layer inside a document that fixes the layer
 * once: {"a": body, "b": body}, "b" omitted when zero. */

Json qpair(const QElem& x, bool with_b) {
    Json o{{"a", elem_body(x.a)}};
    if (with_b) o["b"] = elem_body(x.b);
    return o;
}

QElem qpair_from(const ValuedTower& tw, const Json& j) {
    QElem x;
    x.a = elem_from_body(tw, member(j, "a"));
    if (j.contains("b")) x.b = elem_from_body(tw, j["b"]);
    else x.b = tw.zero(x.a.aprec);
    return x;
}

/* External form of the field modulus: full monic coefficient list,
 * constant term first, leading 1 included (length m + 1). */
std::vector<unsigned> modulus_full(const FiniteField& k) {
    std::vector<unsigned> v = k.modulus();
    v.push_back(1);
    return v;
}

void require_canonical_modulus(const FiniteField& k, const Json& j) {
    std::vector<unsigned> mod;
    if (!j.is_array()) throw std::invalid_argument("field.modulus must be an array");
    for (const Json& x : j) mod.push_back(get_unsigned(x, "field.modulus"));
    if (mod != modulus_full(k))
        throw std::invalid_argument("only the canonical modulus for F_{p^m} is accepted; "
                                    "re-express the data over the canonical field");
}

bool quad_component_used(const ReductionReport& r) {
    for (const QElem& q : r.sqrt_poly) {
        const ValuedTower* tw = q.b.tower;
        if (tw != nullptr && !tw->is_apparent_zero(q.b)) return true;
    }
    return false;
}

Json herbrand_to_json(const HerbrandSegment& s) {
    return Json{{"slope", s.slope.str()}, {"x0", s.x0.str()}, {"x1", s.x1.str()}, {"y0", s.y0.str()}};
}

HerbrandSegment herbrand_from_json(const Json& j) {
    HerbrandSegment s;
    s.slope = Rat::parse(get_str(member(j, "slope"), "slope"));
    s.x0 = Rat::parse(get_str(member(j, "x0"), "x0"));
    s.x1 = Rat::parse(get_str(member(j, "x1"), "x1"));
    s.y0 = Rat::parse(get_str(member(j, "y0"), "y0"));
    return s;
}

Json node_to_json(const TreeNode& n) {
    if (n.is_leaf()) return Json{{"label", n.label}};
    Json kids = Json::array();
    for (const TreeNode& c : n.children) kids.push_back(node_to_json(c));
    return Json{{"children", std::move(kids)}, {"depth", n.depth.str()}};
}

TreeNode node_from_json(const Json& j) {
    TreeNode n;
    if (j.contains("label")) {
        n.label = get_str(j["label"], "label");
        if (j.contains("children") && !j["children"].empty())
            throw std::invalid_argument("a labeled tree node cannot have children");
        return n;
    }
    n.depth = Rat::parse(get_str(member(j, "depth"), "depth"));
    const Json& kids = member(j, "children");
    if (!kids.is_array() || kids.empty())
        throw std::invalid_argument("an internal tree node needs a nonempty child list");
    for (const Json& c : kids) n.children.push_back(node_from_json(c));
    return n;
}

std::vector<unsigned> unsigned_list(const Json& j, const char* what) {
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
    std::vector<unsigned> v;
    for (const Json& x : j) v.push_back(get_unsigned(x, what));
    return v;
}

std::vector<long long> ll_list(const Json& j, const char* what) {
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
    std::vector<long long> v;
    for (const Json& x : j) v.push_back(get_ll(x, what));
    return v;
}

} // namespace

/* ---- documents ---- */

Json make_document(const std::string& kind, Json payload) {
    if (!payload.is_object())
        throw std::invalid_argument("document payload must be a JSON object");
    if (payload.contains("kind") || payload.contains("schema"))
        throw std::invalid_argument("payload keys 'kind' and 'schema' are reserved");
    payload["kind"] = kind;
    payload["schema"] = kSchemaVersion;
    return payload;
}

Json open_document(const Json& doc, const std::string& kind) {
    if (!doc.is_object()) throw std::invalid_argument("document must be a JSON object");
    auto it = doc.find("schema");
    if (it == doc.end()) throw migration_error("document carries no schema version");
    if (!it->is_number_integer() && !it->is_number_unsigned())
        throw migration_error("schema version must be an integer, found " + it->dump());
    long long v = it->get<long long>();
    if (v != kSchemaVersion)
        throw migration_error("document schema version " + std::to_string(v) +
                              " is not readable by this build (expected " +
                              std::to_string(kSchemaVersion) + "); no migration path exists");
    std::string k = doc.contains("kind") ? get_str(doc["kind"], "kind") : "";
    if (k != kind)
        throw std::invalid_argument("expected a document of kind '" + kind + "', found '" + k + "'");
    Json payload = doc;
    payload.erase("kind");
    payload.erase("schema");
    return payload;
}

/* ---- scalars ---- */

Json rat_to_json(const Rat& r) { return r.str(); }

Rat rat_from_json(const Json& j) { return Rat::parse(get_str(j, "rational")); }

Json ff_to_json(const FFElem& a) {
    if (a.field == nullptr) throw std::invalid_argument("residue element without a field");
    return ff_string(a);
}

FFElem ff_from_json(const Json& j, const FiniteField& k) {
    return ff_parse(k, get_str(j, "residue element"), "residue element");
}

Json field_to_json(const FiniteField& k) {
    return Json{{"m", k.m()}, {"modulus", modulus_full(k)}, {"p", k.p()}};
}

const FiniteField& field_from_json(const Json& j) {
    unsigned p = get_unsigned(member(j, "p"), "field.p");
    unsigned m = get_unsigned(member(j, "m"), "field.m");
    const FiniteField& k = FiniteField::get(p, m);
    if (j.contains("modulus")) require_canonical_modulus(k, j["modulus"]);
    return k;
}

/* ---- tower elements ---- */

Json elem_to_json(const TElem& x) {
    if (x.tower == nullptr) throw std::invalid_argument("element without a tower");
    Json o = elem_body(x);
    o["tower"] = tower_sig(*x.tower);
    return o;
}

TElem elem_from_json(const Json& j) {
    const Json& sig = member(j, "tower");
    unsigned e = get_unsigned(member(sig, "e"), "tower.e");
    long slots = body_slots(j, e);
    const ValuedTower& tw = tower_of_sig(sig, std::max(60L * e, slots + 2L * e));
    return elem_from_body(tw, j);
}

Json quad_to_json(const QuadExt& qx, const QElem& x) {
    Json o;
    o["base"] = elem_to_json(x.a);
    o["theta"] = elem_body(x.b);
    o["theta_sq"] = elem_body(qx.delta());
    return o;
}

QElem quad_from_json(const Json& j, std::shared_ptr<const QuadExt>& layer) {
    const Json& base = member(j, "base");
    const Json& sig = member(base, "tower");
    unsigned e = get_unsigned(member(sig, "e"), "tower.e");
    long slots = std::max({body_slots(base, e), body_slots(member(j, "theta"), e),
                           body_slots(member(j, "theta_sq"), e)});
    const ValuedTower& tw = tower_of_sig(sig, std::max(60L * e, slots + 2L * e));
    TElem delta = elem_from_body(tw, j["theta_sq"]);
    if (layer == nullptr || &layer->base() != &tw || !tw.same(layer->delta(), delta))
        layer = std::make_shared<QuadExt>(tw, delta);
    QElem x;
    x.a = elem_from_body(tw, base);
    x.b = elem_from_body(tw, j["theta"]);
    return x;
}

Json vpoly_to_json(const VPoly& f) {
    if (f.tower == nullptr) throw std::invalid_argument("polynomial without a tower");
    Json coeffs = Json::object();
    for (const auto& [exp, c] : f.c) coeffs[std::to_string(exp)] = elem_body(c);
    return Json{{"coeffs", std::move(coeffs)}, {"tower", tower_sig_prec(*f.tower)}};
}

VPoly vpoly_from_json(const Json& j) {
    const Json& sig = member(j, "tower");
    unsigned e = get_unsigned(member(sig, "e"), "tower.e");
    const Json& coeffs = member(j, "coeffs");
    if (!coeffs.is_object()) throw std::invalid_argument("coeffs must map exponents to elements");
    long prec;
    if (sig.contains("prec")) {
        prec = static_cast<long>(get_ll(sig["prec"], "tower.prec"));
    } else {
        /* hand-written input: choose working room from the data */
        prec = 60L * e;
        for (const auto& [key, body] : coeffs.items()) {
            (void)key;
            prec = std::max(prec, body_slots(body, e) + 2L * e);
        }
    }
    const ValuedTower& tw = tower_of_sig(sig, prec);
    std::map<long, TElem> c;
    for (const auto& [key, body] : coeffs.items()) {
        size_t used = 0;
        long exp = 0;
        try {
            exp = std::stol(key, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad exponent key '" + key + "'");
        }
        if (used != key.size()) throw std::invalid_argument("bad exponent key '" + key + "'");
        if (!c.emplace(exp, elem_from_body(tw, body)).second)
            throw std::invalid_argument("duplicate exponent " + key);
    }
    return vp_make(tw, std::move(c));
}

/* ---- covers ---- */

Json cover_to_json(const ASFunction& f) {
    if (f.field == nullptr) throw std::invalid_argument("cover without a residue field");
    const FiniteField& k = *f.field;
    Json o;
    o["p"] = k.p();
    o["field"] = Json{{"m", k.m()}, {"modulus", modulus_full(k)}};
    Json branches = Json::array();
    for (const ASBranch& b : f.branch) {
        Json poly = Json::object();
        for (const auto& [exp, c] : b.poly) poly[std::to_string(exp)] = ff_string(c);
        branches.push_back(Json{{"c", ff_string(b.c)}, {"poly", std::move(poly)}});
    }
    o["branch"] = std::move(branches);
    if (f.local) o["local"] = true;
    if (f.trivial) o["trivial"] = true;
    return o;
}

ASFunction cover_from_json(const Json& j) {
    unsigned p = get_unsigned(member(j, "p"), "p");
    const Json& fj = member(j, "field");
    unsigned m = get_unsigned(member(fj, "m"), "field.m");
    const FiniteField& k = FiniteField::get(p, m);
    if (fj.contains("modulus")) require_canonical_modulus(k, fj["modulus"]);
    bool local = j.value("local", false);
    bool trivial = j.value("trivial", false);
    const Json& branches = member(j, "branch");
    if (!branches.is_array()) throw std::invalid_argument("branch must be an array");
    std::vector<ASBranch> parsed;
    for (const Json& bj : branches) {
        ASBranch b;
        b.c = ff_parse(k, get_str(member(bj, "c"), "branch point"), "branch point");
        const Json& poly = member(bj, "poly");
        if (!poly.is_object()) throw std::invalid_argument("poly must map exponents to residues");
        for (const auto& [key, val] : poly.items()) {
            size_t used = 0;
            unsigned long exp = 0;
            try {
                exp = std::stoul(key, &used);
            } catch (const std::exception&) {
                throw std::invalid_argument("bad exponent key '" + key + "'");
            }
            if (used != key.size() || exp == 0)
                throw std::invalid_argument("polar exponents must be positive integers, got '" + key + "'");
            b.poly[static_cast<unsigned>(exp)] =
                ff_parse(k, get_str(val, "polar coefficient"), "polar coefficient");
        }
        parsed.push_back(std::move(b));
    }
    if (trivial) {
        if (!parsed.empty()) throw std::invalid_argument("a trivial cover cannot carry branch data");
        ASFunction f;
        f.field = &k;
        f.local = local;
        f.trivial = true;
        return f;
    }
    if (local) {
        if (parsed.size() != 1 || !k.is_zero(parsed[0].c))
            throw std::invalid_argument("a local cover has exactly one polar part centered at 0");
        return as_local(k, parsed[0].poly);
    }
    return as_global(k, std::move(parsed));
}

/* ---- conductor types ---- */

Json type_to_json(const ConductorType& t) {
    Json o{{"conductors", t.conductors}, {"n", t.n}, {"p", t.p}};
    if (!t.witness_basis.empty()) {
        Json w = Json::array();
        for (const ASFunction& f : t.witness_basis) w.push_back(cover_to_json(f));
        o["witness_basis"] = std::move(w);
    }
    return o;
}

ConductorType type_from_json(const Json& j) {
    unsigned p = get_unsigned(member(j, "p"), "p");
    std::vector<unsigned> conductors = unsigned_list(member(j, "conductors"), "conductors");
    ConductorType t = make_type(p, conductors);
    if (get_unsigned(member(j, "n"), "n") != t.n)
        throw std::invalid_argument("n does not match the conductor list length");
    if (j.contains("witness_basis")) {
        for (const Json& w : j["witness_basis"]) t.witness_basis.push_back(cover_from_json(w));
        if (t.witness_basis.size() != t.n)
            throw std::invalid_argument("witness basis size does not match n");
    }
    return t;
}

Json invariants_to_json(const CoverInvariants& c) {
    return Json{{"d", c.d}, {"g", c.g}, {"p", c.p},
                {"profile", c.profile}, {"r", c.r}, {"s", c.s}};
}

CoverInvariants invariants_from_json(const Json& j) {
    CoverInvariants c;
    c.p = get_unsigned(member(j, "p"), "p");
    c.s = get_unsigned(member(j, "s"), "s");
    c.r = get_unsigned(member(j, "r"), "r");
    c.d = get_unsigned(member(j, "d"), "d");
    long long g = get_ll(member(j, "g"), "g");
    if (g < 0) throw std::invalid_argument("genus must be non-negative");
    c.g = static_cast<unsigned long>(g);
    c.profile = unsigned_list(member(j, "profile"), "profile");
    return c;
}

/* ---- ramification reports ---- */

Json jumps_to_json(const JumpData& j) {
    Json herb = Json::array();
    for (const HerbrandSegment& s : j.herbrand) herb.push_back(herbrand_to_json(s));
    Json filt = Json::array();
    for (const JumpData::FiltRange& f : j.filtration)
        filt.push_back(Json{{"hi", f.hi}, {"lo", f.lo}, {"order", f.order}});
    return Json{{"filtration", std::move(filt)}, {"herbrand", std::move(herb)},
                {"lower", j.lower},              {"n", j.n},
                {"p", j.p},                      {"upper", j.upper}};
}

JumpData jumps_from_json(const Json& j) {
    JumpData out;
    out.p = get_unsigned(member(j, "p"), "p");
    out.n = get_unsigned(member(j, "n"), "n");
    out.lower = ll_list(member(j, "lower"), "lower");
    out.upper = ll_list(member(j, "upper"), "upper");
    for (const Json& s : member(j, "herbrand")) out.herbrand.push_back(herbrand_from_json(s));
    for (const Json& f : member(j, "filtration")) {
        JumpData::FiltRange r;
        r.lo = get_ll(member(f, "lo"), "filtration.lo");
        r.hi = get_ll(member(f, "hi"), "filtration.hi");
        const Json& ord = member(f, "order");
        if (!ord.is_number_unsigned() && !(ord.is_number_integer() && ord.get<long long>() >= 0))
            throw std::invalid_argument("filtration.order must be non-negative");
        r.order = ord.get<unsigned long long>();
        out.filtration.push_back(r);
    }
    return out;
}

Json different_to_json(const DifferentReport& r) {
    return Json{{"b_integral", r.b_integral},
                {"branch_count", r.branch_count},
                {"criterion_met", r.criterion_met},
                {"d_eta", r.d_eta},
                {"d_s", r.d_s}};
}

DifferentReport different_from_json(const Json& j) {
    DifferentReport r;
    r.d_s = get_ll(member(j, "d_s"), "d_s");
    r.d_eta = get_ll(member(j, "d_eta"), "d_eta");
    r.b_integral = get_bool(member(j, "b_integral"), "b_integral");
    r.branch_count = get_ll(member(j, "branch_count"), "branch_count");
    r.criterion_met = get_bool(member(j, "criterion_met"), "criterion_met");
    return r;
}

/* ---- branch-cycle reports ---- */

Json congruence_to_json(const CongruenceReport& r) {
    return Json{{"moduli", r.moduli}, {"ok", r.ok}, {"satisfied", r.satisfied}};
}

CongruenceReport congruence_from_json(const Json& j) {
    CongruenceReport r;
    r.ok = get_bool(member(j, "ok"), "ok");
    for (const Json& b : member(j, "satisfied")) r.satisfied.push_back(get_bool(b, "satisfied"));
    for (const Json& m : member(j, "moduli")) {
        if (!m.is_number_unsigned() && !(m.is_number_integer() && m.get<long long>() >= 0))
            throw std::invalid_argument("moduli must be non-negative");
        r.moduli.push_back(m.get<unsigned long long>());
    }
    return r;
}

Json intersections_to_json(const IntersectionSpec& s) {
    Json entries = Json::array();
    for (const IntersectionSpec::Entry& e : s.entries)
        entries.push_back(Json{{"integral", e.integral},
                               {"required", e.required.str()},
                               {"subset", e.subset}});
    return Json{{"entries", std::move(entries)}, {"feasible", s.feasible}, {"n", s.n}, {"p", s.p}};
}

IntersectionSpec intersections_from_json(const Json& j) {
    IntersectionSpec s;
    s.p = get_unsigned(member(j, "p"), "p");
    s.n = get_unsigned(member(j, "n"), "n");
    s.feasible = get_bool(member(j, "feasible"), "feasible");
    for (const Json& ej : member(j, "entries")) {
        IntersectionSpec::Entry e;
        e.subset = unsigned_list(member(ej, "subset"), "subset");
        e.required = Rat::parse(get_str(member(ej, "required"), "required"));
        e.integral = get_bool(member(ej, "integral"), "integral");
        s.entries.push_back(std::move(e));
    }
    return s;
}

Json inertia_to_json(const InertiaResult& r) {
    Json counts = Json::array();
    for (const auto& [g, mult] : r.counts.counts)
        counts.push_back(Json{{"gen", g.gen}, {"label", g.label}, {"m", mult}});
    Json c{{"counts", std::move(counts)},
           {"n", r.counts.n},
           {"p", r.counts.p},
           {"total", r.counts.total},
           {"unique_solution", r.counts.unique_solution}};
    return Json{{"counts", std::move(c)}, {"feasible", r.feasible}, {"violated", r.violated}};
}

InertiaResult inertia_from_json(const Json& j) {
    InertiaResult r;
    r.feasible = get_bool(member(j, "feasible"), "feasible");
    r.violated = get_str(member(j, "violated"), "violated");
    const Json& c = member(j, "counts");
    r.counts.p = get_unsigned(member(c, "p"), "counts.p");
    r.counts.n = get_unsigned(member(c, "n"), "counts.n");
    r.counts.total = get_ll(member(c, "total"), "counts.total");
    r.counts.unique_solution = get_bool(member(c, "unique_solution"), "counts.unique_solution");
    for (const Json& e : member(c, "counts")) {
        InertiaElement g;
        g.gen = unsigned_list(member(e, "gen"), "gen");
        g.label = get_str(member(e, "label"), "label");
        r.counts.counts.emplace_back(std::move(g), get_ll(member(e, "m"), "m"));
    }
    return r;
}

Json loci_report_to_json(const LociReport& r) {
    Json checks = Json::array();
    for (const LociReport::Check& c : r.checks)
        checks.push_back(Json{{"observed", c.observed},
                              {"pass", c.pass},
                              {"required", c.required.str()},
                              {"subset", c.subset}});
    return Json{{"all_pass", r.all_pass},
                {"checks", std::move(checks)},
                {"locus_sizes", r.locus_sizes}};
}

LociReport loci_report_from_json(const Json& j) {
    LociReport r;
    r.all_pass = get_bool(member(j, "all_pass"), "all_pass");
    r.locus_sizes = ll_list(member(j, "locus_sizes"), "locus_sizes");
    for (const Json& cj : member(j, "checks")) {
        LociReport::Check c;
        c.subset = unsigned_list(member(cj, "subset"), "subset");
        c.required = Rat::parse(get_str(member(cj, "required"), "required"));
        c.observed = get_ll(member(cj, "observed"), "observed");
        c.pass = get_bool(member(cj, "pass"), "pass");
        r.checks.push_back(std::move(c));
    }
    return r;
}

/* ---- strata ---- */

Json stratum_to_json(const Stratum& s) {
    return Json{{"d", s.d},
                {"dimension", s.dimension},
                {"g", s.g},
                {"neighborhood_dim", s.neighborhood_dim},
                {"p", s.p},
                {"partition", s.partition},
                {"r", s.r},
                {"s", s.s}};
}

Stratum stratum_from_json(const Json& j) {
    Stratum s;
    s.p = get_unsigned(member(j, "p"), "p");
    s.d = get_ll(member(j, "d"), "d");
    s.partition = unsigned_list(member(j, "partition"), "partition");
    s.r = get_unsigned(member(j, "r"), "r");
    s.s = get_unsigned(member(j, "s"), "s");
    s.g = get_ll(member(j, "g"), "g");
    s.dimension = get_ll(member(j, "dimension"), "dimension");
    s.neighborhood_dim = get_ll(member(j, "neighborhood_dim"), "neighborhood_dim");
    return s;
}

Json cover_stratum_to_json(const CoverStratum& s) {
    return Json{{"branch_points_generic", s.branch_points_generic},
                {"coalescing", s.coalescing},
                {"stratum", stratum_to_json(s.stratum)}};
}

CoverStratum cover_stratum_from_json(const Json& j) {
    CoverStratum s;
    s.stratum = stratum_from_json(member(j, "stratum"));
    s.branch_points_generic = get_unsigned(member(j, "branch_points_generic"), "branch_points_generic");
    s.coalescing = unsigned_list(member(j, "coalescing"), "coalescing");
    return s;
}

/* ---- trees and admissibility searches ---- */

Json tree_to_json(const UltrametricTree& t) { return node_to_json(t.v1); }

UltrametricTree tree_from_json(const Json& j) { return UltrametricTree{node_from_json(j)}; }

Json search_to_json(const SearchOutcome& s) {
    if (s.survivors.size() != s.witnesses.size())
        throw std::invalid_argument("survivor and witness lists out of step");
    Json survivors = Json::array();
    for (size_t i = 0; i < s.survivors.size(); ++i)
        survivors.push_back(Json{{"partition", s.survivors[i]}, {"witness", s.witnesses[i]}});
    return Json{{"exemptions", s.exemptions}, {"survivors", std::move(survivors)}};
}

SearchOutcome search_from_json(const Json& j) {
    SearchOutcome s;
    for (const Json& sv : member(j, "survivors")) {
        s.survivors.push_back(unsigned_list(member(sv, "partition"), "partition"));
        std::vector<std::vector<std::string>> w;
        for (const Json& grp : member(sv, "witness")) {
            std::vector<std::string> labels;
            for (const Json& l : grp) labels.push_back(get_str(l, "witness label"));
            w.push_back(std::move(labels));
        }
        s.witnesses.push_back(std::move(w));
    }
    for (const Json& e : member(j, "exemptions")) s.exemptions.push_back(get_str(e, "exemption"));
    return s;
}

/* ---- reduction reports ---- */

Json reduction_to_json(const ReductionReport& r, const QuadExt* qx) {
    if (qx == nullptr && quad_component_used(r))
        throw std::invalid_argument("this report uses the quadratic layer; "
                                    "pass the layer to serialize it");
    Json o;
    switch (r.verdict) {
        case ReductionReport::Verdict::good: o["verdict"] = "good"; break;
        case ReductionReport::Verdict::bad_model: o["verdict"] = "bad_model"; break;
        case ReductionReport::Verdict::inconclusive: o["verdict"] = "inconclusive"; break;
    }
    o["defect_valuation"] = r.defect_valuation.str();
    o["defect_is_bound"] = r.defect_is_bound;
    o["trivial_reduction"] = r.trivial_reduction;
    o["conductor"] = r.conductor;
    o["detail"] = r.detail;
    if (r.verdict == ReductionReport::Verdict::good && !r.trivial_reduction)
        o["reduced"] = cover_to_json(r.reduced);
    else
        o["reduced"] = nullptr;
    Json q = Json::array();
    for (const QElem& c : r.sqrt_poly) q.push_back(qpair(c, qx != nullptr));
    o["sqrt_poly"] = std::move(q);
    if (!r.sqrt_poly.empty()) o["tower"] = tower_sig_prec(*r.sqrt_poly[0].a.tower);
    o["theta_sq"] = qx != nullptr ? elem_body(qx->delta()) : Json(nullptr);
    return o;
}

ReductionReport reduction_from_json(const Json& j, std::shared_ptr<const QuadExt>* layer_out) {
    ReductionReport r;
    std::string v = get_str(member(j, "verdict"), "verdict");
    if (v == "good") r.verdict = ReductionReport::Verdict::good;
    else if (v == "bad_model") r.verdict = ReductionReport::Verdict::bad_model;
    else if (v == "inconclusive") r.verdict = ReductionReport::Verdict::inconclusive;
    else throw std::invalid_argument("unknown verdict '" + v + "'");
    r.defect_valuation = Rat::parse(get_str(member(j, "defect_valuation"), "defect_valuation"));
    r.defect_is_bound = get_bool(member(j, "defect_is_bound"), "defect_is_bound");
    r.trivial_reduction = get_bool(member(j, "trivial_reduction"), "trivial_reduction");
    r.conductor = get_unsigned(member(j, "conductor"), "conductor");
    r.detail = get_str(member(j, "detail"), "detail");
    if (!member(j, "reduced").is_null()) r.reduced = cover_from_json(j["reduced"]);
    const Json& q = member(j, "sqrt_poly");
    if (!q.empty()) {
        const Json& sig = member(j, "tower");
        const ValuedTower& tw =
            tower_of_sig(sig, static_cast<long>(get_ll(member(sig, "prec"), "tower.prec")));
        std::shared_ptr<const QuadExt> layer;
        if (!member(j, "theta_sq").is_null())
            layer = std::make_shared<QuadExt>(tw, elem_from_body(tw, j["theta_sq"]));
        for (const Json& c : q) r.sqrt_poly.push_back(qpair_from(tw, c));
        if (layer_out != nullptr) *layer_out = std::move(layer);
    } else if (layer_out != nullptr) {
        layer_out->reset();
    }
    return r;
}

/* ---- lift records ---- */

Json conductor4_to_json(const Conductor4Lift& l) {
    if (l.A.tower == nullptr || l.ext == nullptr)
        throw std::invalid_argument("incomplete lift record");
    const ValuedTower& tw = *l.A.tower;
    Json points = Json::array();
    for (const QElem& pt : l.points) points.push_back(qpair(pt, true));
    return Json{{"A", elem_body(l.A)},
                {"B", elem_body(l.B)},
                {"U", elem_body(l.U)},
                {"V", qpair(l.V, true)},
                {"alpha", ff_string(l.alpha)},
                {"beta", ff_string(l.beta)},
                {"points", std::move(points)},
                {"q", qpair(l.q, true)},
                {"r", l.r},
                {"report", reduction_to_json(l.report, l.ext.get())},
                {"theta_sq", elem_body(l.ext->delta())},
                {"tower", tower_sig_prec(tw)},
                {"w", qpair(l.w, true)}};
}

Conductor4Lift conductor4_from_json(const Json& j) {
    const Json& sig = member(j, "tower");
    const ValuedTower& tw =
        tower_of_sig(sig, static_cast<long>(get_ll(member(sig, "prec"), "tower.prec")));
    const FiniteField& k = tw.residue_field();
    Conductor4Lift l;
    l.r = get_unsigned(member(j, "r"), "r");
    l.alpha = ff_parse(k, get_str(member(j, "alpha"), "alpha"), "alpha");
    l.beta = ff_parse(k, get_str(member(j, "beta"), "beta"), "beta");
    l.A = elem_from_body(tw, member(j, "A"));
    l.B = elem_from_body(tw, member(j, "B"));
    l.U = elem_from_body(tw, member(j, "U"));
    l.ext = std::make_shared<QuadExt>(tw, elem_from_body(tw, member(j, "theta_sq")));
    l.w = qpair_from(tw, member(j, "w"));
    l.V = qpair_from(tw, member(j, "V"));
    l.q = qpair_from(tw, member(j, "q"));
    for (const Json& pt : member(j, "points")) l.points.push_back(qpair_from(tw, pt));
    l.report = reduction_from_json(member(j, "report"));
    return l;
}

Json pagot_to_json(const PagotLift& l) {
    if (l.T.empty() || l.T[0].tower == nullptr)
        throw std::invalid_argument("incomplete configuration record");
    auto arr = [](const std::vector<TElem>& v) {
        Json a = Json::array();
        for (const TElem& x : v) a.push_back(elem_body(x));
        return a;
    };
    return Json{{"T", arr(l.T)},
                {"Tt", arr(l.Tt)},
                {"W", arr(l.W)},
                {"newton_steps", l.newton_steps},
                {"points", arr(l.points)},
                {"r", l.r},
                {"report", reduction_to_json(l.report, nullptr)},
                {"sqrt_coeffs", arr(l.sqrt_coeffs)},
                {"tower", tower_sig_prec(*l.T[0].tower)},
                {"transcript", l.transcript}};
}

PagotLift pagot_from_json(const Json& j) {
    const Json& sig = member(j, "tower");
    const ValuedTower& tw =
        tower_of_sig(sig, static_cast<long>(get_ll(member(sig, "prec"), "tower.prec")));
    auto arr = [&tw](const Json& a, const char* what) {
        if (!a.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
        std::vector<TElem> v;
        for (const Json& x : a) v.push_back(elem_from_body(tw, x));
        return v;
    };
    PagotLift l;
    l.r = get_unsigned(member(j, "r"), "r");
    l.T = arr(member(j, "T"), "T");
    l.W = arr(member(j, "W"), "W");
    l.Tt = arr(member(j, "Tt"), "Tt");
    l.sqrt_coeffs = arr(member(j, "sqrt_coeffs"), "sqrt_coeffs");
    l.points = arr(member(j, "points"), "points");
    l.newton_steps = get_unsigned(member(j, "newton_steps"), "newton_steps");
    l.transcript = get_str(member(j, "transcript"), "transcript");
    l.report = reduction_from_json(member(j, "report"));
    return l;
}

Json assembled_to_json(const AssembledLift& a) {
    if (a.ext == nullptr) throw std::invalid_argument("incomplete assembly record");
    const ValuedTower& tw = a.ext->base();
    Json loci = Json::array();
    for (const auto& locus : a.loci) {
        Json lj = Json::array();
        for (const QElem& pt : locus) lj.push_back(qpair(pt, true));
        loci.push_back(std::move(lj));
    }
    return Json{{"branch_count", a.branch_count},
                {"c1", conductor4_to_json(a.c1)},
                {"c2", conductor4_to_json(a.c2)},
                {"c3", pagot_to_json(a.c3)},
                {"d_eta", a.d_eta},
                {"d_s", a.d_s},
                {"distinct_points", a.distinct_points},
                {"equidistant", a.equidistant},
                {"loci", std::move(loci)},
                {"loci_report", loci_report_to_json(a.loci_report)},
                {"partition", a.partition},
                {"r", a.r},
                {"theta_sq", elem_body(a.ext->delta())},
                {"tower", tower_sig_prec(tw)},
                {"tree", tree_to_json(a.tree)},
                {"type", type_to_json(a.type)}};
}

AssembledLift assembled_from_json(const Json& j) {
    const Json& sig = member(j, "tower");
    const ValuedTower& tw =
        tower_of_sig(sig, static_cast<long>(get_ll(member(sig, "prec"), "tower.prec")));
    AssembledLift a;
    a.r = get_unsigned(member(j, "r"), "r");
    a.type = type_from_json(member(j, "type"));
    a.ext = std::make_shared<QuadExt>(tw, elem_from_body(tw, member(j, "theta_sq")));
    a.c1 = conductor4_from_json(member(j, "c1"));
    a.c2 = conductor4_from_json(member(j, "c2"));
    a.c3 = pagot_from_json(member(j, "c3"));
    if (&a.c1.ext->base() != &tw || !tw.same(a.c1.ext->delta(), a.ext->delta()) ||
        &a.c2.ext->base() != &tw || !tw.same(a.c2.ext->delta(), a.ext->delta()))
        throw std::invalid_argument("component lifts disagree with the assembly's quadratic layer");
    a.c1.ext = a.ext;
    a.c2.ext = a.ext;
    for (const Json& locus : member(j, "loci")) {
        std::vector<QElem> pts;
        for (const Json& pt : locus) pts.push_back(qpair_from(tw, pt));
        a.loci.push_back(std::move(pts));
    }
    a.distinct_points = get_unsigned(member(j, "distinct_points"), "distinct_points");
    a.loci_report = loci_report_from_json(member(j, "loci_report"));
    a.tree = tree_from_json(member(j, "tree"));
    a.partition = unsigned_list(member(j, "partition"), "partition");
    a.equidistant = get_bool(member(j, "equidistant"), "equidistant");
    a.d_s = get_ll(member(j, "d_s"), "d_s");
    a.d_eta = get_ll(member(j, "d_eta"), "d_eta");
    a.branch_count = get_ll(member(j, "branch_count"), "branch_count");
    return a;
}

} // namespace ascend
