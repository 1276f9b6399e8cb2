#pragma once

#include "ascend/as_covers.hpp"
#include "ascend/rational.hpp"
#include "ascend/tower.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ascend {

/* Rooted ultrametric tree.  The boundary root v0 is implicit; v1 is the
 * first vertex below it.  Internal vertices carry rational depths that
 * strictly increase away from the root; leaves carry labels.  No
 * internal vertex has a single child (suppressed on construction). */
struct TreeNode {
    Rat depth;
    std::string label; // leaves only
    std::vector<TreeNode> children;
    bool is_leaf() const { return children.empty(); }
};

struct UltrametricTree {
    TreeNode v1;
};

/* Leaf labels in left-to-right order. */
std::vector<std::string> tree_leaves(const UltrametricTree& t);

/* Meeting depth (depth of the lowest common ancestor) for every leaf
 * pair, keyed with the lexicographically smaller label first. */
std::map<std::pair<std::string, std::string>, Rat>
meeting_depths(const UltrametricTree& t);

/* Build from an explicit symmetric meet matrix (validated ultrametric:
 * in every triple the two smallest entries are equal). */
UltrametricTree tree_from_depths(const std::vector<std::string>& labels,
                                 const std::vector<std::vector<Rat>>& meet);

/* Build from points of the valued tower (or its quadratic extension):
 * meeting depth of two leaves is v(x_i - x_j) in v(p) = 1 units. */
UltrametricTree tree_from_points(const ValuedTower& tw,
                                 const std::vector<std::pair<std::string, TElem>>& pts);
UltrametricTree tree_from_points(const QuadExt& qx,
                                 const std::vector<std::pair<std::string, QElem>>& pts);

/* Restriction to a leaf subset with degree-2 suppression; meeting depths
 * are preserved. */
UltrametricTree induced_subtree(const UltrametricTree& t,
                                const std::vector<std::string>& leaves);

/* Leaf counts of the subtrees hanging off v1, sorted descending. */
std::vector<unsigned> branch_partition(const UltrametricTree& t);

/* Degree-2 branch rule: a partition is admissible iff it is all ones
 * (equidistant geometry) or every part is even. */
bool z2_admissible(const std::vector<unsigned>& partition);

/* Same rule on a depth-annotated tree; by default re-applied at every
 * internal vertex (re-localizing at a smaller disk), top_level_only
 * restores the literal one-level rule. */
bool z2_admissible_tree(const UltrametricTree& t, bool top_level_only = false);

/* Six-point Klein-four geometries: admissible branch partitions are
 * exactly (1,1,1,1,1,1), (3,3), (2,2,2) — imported classification data
 * (table revision 1).  Only the (4,4) type is classified; any other
 * type raises an error. */
bool klein4_admissible(const std::vector<unsigned>& partition, bool type44);

/* Exhaustive admissibility search for elementary abelian 2-covers with
 * n in {2,3}: all multiset partitions of the |B| labeled branch points
 * (labels = inertia elements with multiplicity m(g)) are filtered by
 * every degree-2 subcover rule and every classified Klein-four quotient.
 * Survivors are a superset of realizable geometries. */
struct SearchOutcome {
    std::vector<std::vector<unsigned>> survivors; // canonical order
    std::vector<std::vector<std::vector<std::string>>> witnesses; // one per survivor
    std::vector<std::string> exemptions; // quotients with no classification data
};

SearchOutcome search_admissible(const ConductorType& t, unsigned max_points = 25);

} // namespace ascend
