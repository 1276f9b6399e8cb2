#pragma once

#include "ascend/as_covers.hpp"
#include "ascend/branch_cycle.hpp"
#include "ascend/hurwitz_trees.hpp"
#include "ascend/lifts.hpp"
#include "ascend/ramification.hpp"
#include "ascend/strata.hpp"
#include "ascend/tower.hpp"

#include "json.hpp"

#include <memory>
#include <stdexcept>
#include <string>

namespace ascend {

using Json = nlohmann::json;

/* Every top-level document embeds this schema version; decoding a
 * document with a different version fails with migration_error. */
constexpr int kSchemaVersion = 1;

class migration_error : public std::runtime_error {
public:
    explicit migration_error(const std::string& what) : std::runtime_error(what) {}
};

/* Stamp a payload object with {"kind": kind, "schema": kSchemaVersion}
 * (the report keys stay at top level). */
Json make_document(const std::string& kind, Json payload);
/* Verify schema version and kind, return the payload without the stamp. */
Json open_document(const Json& doc, const std::string& kind);

/* Rationals: "num/den" with "/1" omitted. */
Json rat_to_json(const Rat& r);
Rat rat_from_json(const Json& j);

/* Residue-field elements: base-p digit string, constant term first
 * ("0" = zero, "01" = x over F_4). */
Json ff_to_json(const FFElem& a);
FFElem ff_from_json(const Json& j, const FiniteField& k);

/* {"m":..., "modulus":[...], "p":...}; decoding accepts only the
 * canonical modulus for (p, m). */
Json field_to_json(const FiniteField& k);
const FiniteField& field_from_json(const Json& j);

/* Tower elements: {"digits":[[pos, ff], ...], "prec": rat,
 * "tower":{"e","m","p"}}. */
Json elem_to_json(const TElem& x);
TElem elem_from_json(const Json& j);

/* Elements of the quadratic layer: {"base": elem, "theta": elem,
 * "theta_sq": elem}.  Decoding materializes (or reuses) the layer. */
Json quad_to_json(const QuadExt& qx, const QElem& x);
QElem quad_from_json(const Json& j, std::shared_ptr<const QuadExt>& layer);

/* Laurent-polynomial model input: {"coeffs": {"<exp>": elem, ...}}. */
Json vpoly_to_json(const VPoly& f);
VPoly vpoly_from_json(const Json& j);

Json cover_to_json(const ASFunction& f);
ASFunction cover_from_json(const Json& j);

Json type_to_json(const ConductorType& t);
ConductorType type_from_json(const Json& j);

Json invariants_to_json(const CoverInvariants& c);
CoverInvariants invariants_from_json(const Json& j);

Json jumps_to_json(const JumpData& j);
JumpData jumps_from_json(const Json& j);

Json different_to_json(const DifferentReport& r);
DifferentReport different_from_json(const Json& j);

Json congruence_to_json(const CongruenceReport& r);
CongruenceReport congruence_from_json(const Json& j);

Json intersections_to_json(const IntersectionSpec& s);
IntersectionSpec intersections_from_json(const Json& j);

Json inertia_to_json(const InertiaResult& r);
InertiaResult inertia_from_json(const Json& j);

Json loci_report_to_json(const LociReport& r);
LociReport loci_report_from_json(const Json& j);

Json stratum_to_json(const Stratum& s);
Stratum stratum_from_json(const Json& j);

Json cover_stratum_to_json(const CoverStratum& s);
CoverStratum cover_stratum_from_json(const Json& j);

/* Nested tree: internal {"depth": rat, "children": [...]},
 * leaf {"label": "..."}. */
Json tree_to_json(const UltrametricTree& t);
UltrametricTree tree_from_json(const Json& j);

Json search_to_json(const SearchOutcome& s);
SearchOutcome search_from_json(const Json& j);

/* The quadratic layer is recorded as "theta_sq" when the truncated
 * square root has genuine quadratic components (pass the layer then);
 * decoding materializes it into layer_out when requested. */
Json reduction_to_json(const ReductionReport& r, const QuadExt* qx = nullptr);
ReductionReport reduction_from_json(const Json& j,
                                    std::shared_ptr<const QuadExt>* layer_out = nullptr);

Json conductor4_to_json(const Conductor4Lift& l);
Conductor4Lift conductor4_from_json(const Json& j);

Json pagot_to_json(const PagotLift& l);
PagotLift pagot_from_json(const Json& j);

Json assembled_to_json(const AssembledLift& a);
AssembledLift assembled_from_json(const Json& j);

} // namespace ascend
