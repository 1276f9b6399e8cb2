#include "ascend/hurwitz_trees.hpp"

#include "ascend/branch_cycle.hpp"
#include "ascend/errors.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ascend {

namespace {

void collect_leaves(const TreeNode& n, std::vector<std::string>& out) {
    if (n.is_leaf()) {
        out.push_back(n.label);
        return;
    }
    for (const auto& c : n.children) collect_leaves(c, out);
}

unsigned leaf_count(const TreeNode& n) {
    if (n.is_leaf()) return 1;
    unsigned s = 0;
    for (const auto& c : n.children) s += leaf_count(c);
    return s;
}

/* recursive hierarchical clustering on a meet matrix */
TreeNode build_node(const std::vector<std::string>& labels,
                    const std::vector<std::vector<Rat>>& meet,
                    const std::vector<std::size_t>& idx) {
    if (idx.size() == 1) {
        TreeNode leaf;
        leaf.label = labels[idx[0]];
        return leaf;
    }
    Rat d = meet[idx[0]][idx[1]];
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b)
            if (meet[idx[a]][idx[b]] < d) d = meet[idx[a]][idx[b]];

    /* clusters: points meeting strictly deeper than d */
    std::vector<int> cluster(idx.size(), -1);
    int nc = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
        if (cluster[a] >= 0) continue;
        cluster[a] = nc;
        for (std::size_t b = a + 1; b < idx.size(); ++b)
            if (cluster[b] < 0 && d < meet[idx[a]][idx[b]]) cluster[b] = nc;
        ++nc;
    }
    TreeNode node;
    node.depth = d;
    for (int c = 0; c < nc; ++c) {
        std::vector<std::size_t> sub;
        for (std::size_t a = 0; a < idx.size(); ++a)
            if (cluster[a] == c) sub.push_back(idx[a]);
        node.children.push_back(build_node(labels, meet, sub));
    }
    return node;
}

void check_ultrametric(const std::vector<std::vector<Rat>>& meet) {
    std::size_t n = meet.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                Rat a = meet[i][j], b = meet[i][k], c = meet[j][k];
                Rat hi = std::max({a, b, c});
                // the two smallest must be equal: a+b+c - hi must be 2*min
                std::vector<Rat> v{a, b, c};
                std::sort(v.begin(), v.end());
                if (!(v[0] == v[1]))
                    throw std::invalid_argument("meet matrix is not ultrametric");
                (void)hi;
            }
}

} // namespace

std::vector<std::string> tree_leaves(const UltrametricTree& t) {
    std::vector<std::string> out;
    collect_leaves(t.v1, out);
    return out;
}

namespace {

void meets_rec(const TreeNode& n,
               std::map<std::pair<std::string, std::string>, Rat>& out,
               std::vector<std::string>& leaves_out) {
    if (n.is_leaf()) {
        leaves_out.push_back(n.label);
        return;
    }
    std::vector<std::vector<std::string>> child_leaves;
    for (const auto& c : n.children) {
        std::vector<std::string> sub;
        meets_rec(c, out, sub);
        child_leaves.push_back(std::move(sub));
    }
    for (std::size_t a = 0; a < child_leaves.size(); ++a)
        for (std::size_t b = a + 1; b < child_leaves.size(); ++b)
            for (const auto& x : child_leaves[a])
                for (const auto& y : child_leaves[b]) {
                    auto key = x < y ? std::make_pair(x, y) : std::make_pair(y, x);
                    out[key] = n.depth;
                }
    for (auto& cl : child_leaves)
        for (auto& x : cl) leaves_out.push_back(x);
}

} // namespace

std::map<std::pair<std::string, std::string>, Rat>
meeting_depths(const UltrametricTree& t) {
    std::map<std::pair<std::string, std::string>, Rat> out;
    std::vector<std::string> leaves;
    meets_rec(t.v1, out, leaves);
    return out;
}

UltrametricTree tree_from_depths(const std::vector<std::string>& labels,
                                 const std::vector<std::vector<Rat>>& meet) {
    if (labels.size() < 2)
        throw std::invalid_argument("a tree needs at least two points");
    if (meet.size() != labels.size())
        throw std::invalid_argument("meet matrix size mismatch");
    std::set<std::string> uniq(labels.begin(), labels.end());
    if (uniq.size() != labels.size())
        throw std::invalid_argument("leaf labels must be distinct");
    for (std::size_t i = 0; i < meet.size(); ++i) {
        if (meet[i].size() != labels.size())
            throw std::invalid_argument("meet matrix size mismatch");
        for (std::size_t j = i + 1; j < meet.size(); ++j)
            if (!(meet[i][j] == meet[j][i]))
                throw std::invalid_argument("meet matrix must be symmetric");
    }
    check_ultrametric(meet);

    std::vector<std::size_t> idx(labels.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    UltrametricTree t;
    t.v1 = build_node(labels, meet, idx);
    return t;
}

UltrametricTree tree_from_points(const ValuedTower& tw,
                                 const std::vector<std::pair<std::string, TElem>>& pts) {
    std::size_t n = pts.size();
    if (n < 2) throw std::invalid_argument("a tree needs at least two points");
    std::vector<std::string> labels;
    for (auto& [l, x] : pts) labels.push_back(l);
    std::vector<std::vector<Rat>> meet(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            TElem d = tw.sub(pts[i].second, pts[j].second);
            if (tw.is_apparent_zero(d))
                throw precision_error("branch points indistinguishable at working precision");
            meet[i][j] = meet[j][i] = Rat(tw.val_pi(d), static_cast<long long>(tw.e()));
        }
    return tree_from_depths(labels, meet);
}

UltrametricTree tree_from_points(const QuadExt& qx,
                                 const std::vector<std::pair<std::string, QElem>>& pts) {
    std::size_t n = pts.size();
    if (n < 2) throw std::invalid_argument("a tree needs at least two points");
    std::vector<std::string> labels;
    for (auto& [l, x] : pts) labels.push_back(l);
    std::vector<std::vector<Rat>> meet(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            std::optional<Rat> v = qx.val(qx.sub(pts[i].second, pts[j].second));
            if (!v)
                throw precision_error("branch points indistinguishable at working precision");
            meet[i][j] = meet[j][i] = *v;
        }
    return tree_from_depths(labels, meet);
}

UltrametricTree induced_subtree(const UltrametricTree& t,
                                const std::vector<std::string>& leaves) {
    if (leaves.size() < 2)
        throw std::invalid_argument("an induced subtree needs at least two leaves");
    auto all = tree_leaves(t);
    std::set<std::string> have(all.begin(), all.end());
    for (auto& l : leaves)
        if (!have.count(l))
            throw std::invalid_argument("unknown leaf label: " + l);

    auto meets = meeting_depths(t);
    std::size_t n = leaves.size();
    std::vector<std::vector<Rat>> meet(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            auto key = leaves[i] < leaves[j] ? std::make_pair(leaves[i], leaves[j])
                                             : std::make_pair(leaves[j], leaves[i]);
            meet[i][j] = meet[j][i] = meets.at(key);
        }
    return tree_from_depths(leaves, meet);
}

std::vector<unsigned> branch_partition(const UltrametricTree& t) {
    std::vector<unsigned> parts;
    if (t.v1.is_leaf()) {
        parts.push_back(1);
        return parts;
    }
    for (const auto& c : t.v1.children) parts.push_back(leaf_count(c));
    std::sort(parts.begin(), parts.end(), std::greater<unsigned>());
    return parts;
}

bool z2_admissible(const std::vector<unsigned>& partition) {
    bool all_ones = true, all_even = true;
    for (unsigned b : partition) {
        if (b != 1) all_ones = false;
        if (b % 2 != 0) all_even = false;
    }
    return all_ones || all_even;
}

namespace {

bool z2_rec(const TreeNode& n, bool top_level_only, bool at_top) {
    if (n.is_leaf()) return true;
    std::vector<unsigned> parts;
    for (const auto& c : n.children) parts.push_back(leaf_count(c));
    std::sort(parts.begin(), parts.end(), std::greater<unsigned>());
    if ((at_top || !top_level_only) && !z2_admissible(parts)) return false;
    if (top_level_only) return true;
    for (const auto& c : n.children)
        if (!z2_rec(c, top_level_only, false)) return false;
    return true;
}

} // namespace

bool z2_admissible_tree(const UltrametricTree& t, bool top_level_only) {
    return z2_rec(t.v1, top_level_only, true);
}

bool klein4_admissible(const std::vector<unsigned>& partition, bool type44) {
    if (!type44)
        throw std::invalid_argument(
            "no classification data for this Klein-four type");
    unsigned total = 0;
    for (unsigned b : partition) total += b;
    if (total != 6)
        throw std::invalid_argument(
            "classification covers six-point geometries only");
    std::vector<unsigned> s = partition;
    std::sort(s.begin(), s.end(), std::greater<unsigned>());
    /* imported classification table, revision 1 */
    static const std::vector<std::vector<unsigned>> kTable{
        {1, 1, 1, 1, 1, 1}, {3, 3}, {2, 2, 2}};
    return std::find(kTable.begin(), kTable.end(), s) != kTable.end();
}

/* ------------------------------------------------------------------ */

namespace {

using Blocks = std::vector<std::vector<int>>; // blocks of label ids

/* canonical form: blocks sorted internally, then by size descending and
 * contents ascending */
Blocks canonical(Blocks b) {
    for (auto& blk : b) std::sort(blk.begin(), blk.end());
    std::sort(b.begin(), b.end(), [](const auto& x, const auto& y) {
        if (x.size() != y.size()) return x.size() > y.size();
        return x < y;
    });
    return b;
}

/* enumerate multiset partitions of the labeled points; duplicates from
 * block ordering are removed through the canonical form */
void enum_partitions(std::vector<int>& remaining, // per-label multiplicities
                     Blocks& cur, std::set<Blocks>& out) {
    int first = -1;
    for (std::size_t l = 0; l < remaining.size(); ++l)
        if (remaining[l] > 0) {
            first = static_cast<int>(l);
            break;
        }
    if (first < 0) {
        out.insert(canonical(cur));
        return;
    }
    /* choose the block containing one point of the first remaining
     * label: any sub-multiset of the rest joins it */
    std::vector<int> pick(remaining.size(), 0);
    pick[first] = 1;
    std::function<void(std::size_t)> choose = [&](std::size_t l) {
        if (l == remaining.size()) {
            std::vector<int> block;
            for (std::size_t k = 0; k < pick.size(); ++k)
                for (int c = 0; c < pick[k]; ++c) block.push_back(static_cast<int>(k));
            for (std::size_t k = 0; k < pick.size(); ++k) remaining[k] -= pick[k];
            cur.push_back(block);
            enum_partitions(remaining, cur, out);
            cur.pop_back();
            for (std::size_t k = 0; k < pick.size(); ++k) remaining[k] += pick[k];
            return;
        }
        int base = (static_cast<int>(l) == first) ? 1 : 0;
        for (int c = base; c <= remaining[l]; ++c) {
            pick[l] = c;
            choose(l + 1);
        }
        pick[l] = base;
    };
    choose(0);
}

std::vector<unsigned> sizes_of(const Blocks& b) {
    std::vector<unsigned> s;
    for (auto& blk : b)
        if (!blk.empty()) s.push_back(static_cast<unsigned>(blk.size()));
    std::sort(s.begin(), s.end(), std::greater<unsigned>());
    return s;
}

int parity(unsigned a, unsigned b) { return __builtin_popcount(a & b) & 1; }

} // namespace

SearchOutcome search_admissible(const ConductorType& t, unsigned max_points) {
    const unsigned n = t.n;
    if (t.p != 2 || (n != 2 && n != 3))
        throw std::invalid_argument(
            "admissibility search covers elementary abelian 2-groups of rank 2 or 3");

    InertiaResult ir = solve_inertia_counts(t);
    if (!ir.feasible)
        throw std::domain_error("no inertia count solution: " + ir.violated);

    /* labeled points: one label id per inertia element, with multiplicity */
    std::vector<std::string> label_names;
    std::vector<unsigned> label_mask;
    std::vector<int> mult;
    std::vector<long long> weight; // m(g) by mask
    weight.assign(1u << n, 0);
    for (auto& [el, cnt] : ir.counts.counts) {
        unsigned mask = 0;
        for (unsigned k = 0; k < n; ++k)
            if (el.gen[k]) mask |= 1u << k;
        weight[mask] = cnt;
        if (cnt > 0) {
            label_names.push_back(el.label);
            label_mask.push_back(mask);
            mult.push_back(static_cast<int>(cnt));
        }
    }
    if (ir.counts.total > static_cast<long long>(max_points))
        throw std::invalid_argument("branch point count exceeds the search bound");

    /* degree-2 subcover filters: one per nonzero dual vector */
    std::vector<unsigned> duals;
    for (unsigned phi = 1; phi < (1u << n); ++phi) duals.push_back(phi);

    /* Klein-four quotient filters and exemptions */
    struct KleinFilter {
        unsigned excluded_mask; // points with this inertia mask drop out (0 = none)
    };
    std::vector<KleinFilter> klein;
    SearchOutcome outcome;
    auto quotient_type = [&](unsigned h) {
        std::vector<long long> cond;
        for (unsigned phi = 1; phi < (1u << n); ++phi) {
            if (h != 0 && parity(phi, h)) continue; // dual must vanish on N
            long long c = 0;
            for (unsigned g = 1; g < (1u << n); ++g)
                if (parity(phi, g)) c += weight[g];
            cond.push_back(c);
        }
        std::sort(cond.begin(), cond.end());
        return std::make_pair(cond[0], cond[1]);
    };
    auto mask_label = [&](unsigned mask) {
        std::string s;
        for (unsigned k = 0; k < n; ++k)
            if (mask & (1u << k)) s += static_cast<char>('a' + k);
        return s;
    };
    if (n == 3) {
        for (unsigned h = 1; h < 8; ++h) {
            auto [c1, c2] = quotient_type(h);
            if (c1 == 4 && c2 == 4) {
                klein.push_back({h});
            } else {
                std::ostringstream os;
                os << "quotient by <" << mask_label(h) << ">: type (" << c1 << ","
                   << c2 << ") has no classification data";
                outcome.exemptions.push_back(os.str());
            }
        }
    } else {
        auto [c1, c2] = quotient_type(0);
        if (c1 == 4 && c2 == 4) {
            klein.push_back({0});
        } else {
            std::ostringstream os;
            os << "rank-2 cover of type (" << c1 << "," << c2
               << ") has no classification data";
            outcome.exemptions.push_back(os.str());
        }
    }

    /* enumerate candidates */
    std::set<Blocks> candidates;
    {
        std::vector<int> remaining = mult;
        Blocks cur;
        enum_partitions(remaining, cur, candidates);
    }

    std::map<std::vector<unsigned>, Blocks> survivors; // partition -> witness
    for (const Blocks& cand : candidates) {
        bool ok = true;
        for (unsigned phi : duals) {
            Blocks induced;
            for (auto& blk : cand) {
                std::vector<int> keep;
                for (int id : blk)
                    if (parity(phi, label_mask[id])) keep.push_back(id);
                if (!keep.empty()) induced.push_back(std::move(keep));
            }
            if (!z2_admissible(sizes_of(induced))) {
                ok = false;
                break;
            }
        }
        if (ok)
            for (auto& kf : klein) {
                Blocks induced;
                for (auto& blk : cand) {
                    std::vector<int> keep;
                    for (int id : blk)
                        if (kf.excluded_mask == 0 || label_mask[id] != kf.excluded_mask)
                            keep.push_back(id);
                    if (!keep.empty()) induced.push_back(std::move(keep));
                }
                if (!klein4_admissible(sizes_of(induced), true)) {
                    ok = false;
                    break;
                }
            }
        if (!ok) continue;
        std::vector<unsigned> part = sizes_of(cand);
        if (!survivors.count(part)) survivors[part] = cand;
    }

    /* canonical output order: descending parts, then lexicographic */
    std::vector<std::vector<unsigned>> order;
    for (auto& [p_, w] : survivors) order.push_back(p_);
    std::sort(order.begin(), order.end(), std::greater<>());
    for (auto& part : order) {
        outcome.survivors.push_back(part);
        std::vector<std::vector<std::string>> witness;
        for (auto& blk : survivors[part]) {
            std::vector<std::string> names;
            for (int id : blk) names.push_back(label_names[id]);
            witness.push_back(std::move(names));
        }
        outcome.witnesses.push_back(std::move(witness));
    }
    return outcome;
}

} // namespace ascend
