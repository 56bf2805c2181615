#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "typed_graph.hpp"

namespace mosearch {

// Pattern element indices: the left-hand side occupies [0, lhs_nodes.size());
// created nodes continue that index space; each condition's extension nodes
// do the same (conditions extend the lhs only, never created nodes).
struct PatternNode {
    int type;  // node type index, may be abstract
    friend auto operator<=>(const PatternNode&, const PatternNode&) = default;
};

struct PatternEdge {
    int type;  // edge type index
    int src;
    int dst;
    friend auto operator<=>(const PatternEdge&, const PatternEdge&) = default;
};

// One application condition: a connected extension of the lhs. As a NAC the
// rule applies only if no extension of the match covers it; as a PAC at least
// one must exist. Extension nodes bind pairwise-distinct model nodes and must
// avoid the nodes bound to the lhs slots in `exclude`; they may coincide with
// any other matched node (a partner counted here can play a second role in
// the same match).
struct ConditionPattern {
    std::vector<PatternNode> nodes;
    std::vector<PatternEdge> edges;
    std::vector<int> exclude;  // lhs slots whose bound nodes cannot serve as extensions
    friend auto operator<=>(const ConditionPattern&, const ConditionPattern&) = default;
};

enum class EditKind { CreateNode, DeleteNode, AddEdge, RemoveEdge, ChangeEdge, SwapEdge };
enum class RepairKind { None, Nac, Pac, LbSingle, LbMulti, Iterative };
enum class Phase { Problem, Solution };

inline const char* to_string(EditKind k) {
    switch (k) {
        case EditKind::CreateNode: return "create_node";
        case EditKind::DeleteNode: return "delete_node";
        case EditKind::AddEdge: return "add_edge";
        case EditKind::RemoveEdge: return "remove_edge";
        case EditKind::ChangeEdge: return "change_edge";
        case EditKind::SwapEdge: return "swap_edge";
    }
    return "?";
}

inline const char* to_string(RepairKind k) {
    switch (k) {
        case RepairKind::None: return "none";
        case RepairKind::Nac: return "nac";
        case RepairKind::Pac: return "pac";
        case RepairKind::LbSingle: return "lb_single";
        case RepairKind::LbMulti: return "lb_multi";
        case RepairKind::Iterative: return "iterative";
    }
    return "?";
}

inline const char* to_string(Phase p) { return p == Phase::Problem ? "problem" : "solution"; }

struct Taxonomy {
    EditKind edit = EditKind::CreateNode;
    RepairKind repair = RepairKind::None;
    Phase phase = Phase::Problem;
};

// In-place graph transformation rule. Deleting a node implicitly deletes all
// of its incident model edges (no dangling veto).
struct Rule {
    std::string name;
    MetamodelPtr mm;
    std::vector<PatternNode> lhs_nodes;
    std::vector<PatternEdge> lhs_edges;
    std::vector<int> delete_nodes;          // indices into lhs_nodes
    std::vector<int> delete_edges;          // indices into lhs_edges
    std::vector<PatternNode> create_nodes;  // indices continue after lhs_nodes
    std::vector<PatternEdge> create_edges;
    std::vector<ConditionPattern> nacs;
    std::vector<ConditionPattern> pacs;
    Taxonomy taxonomy;
    std::vector<std::string> provenance;  // generation notes, one per contributing case

    int lhs_size() const { return static_cast<int>(lhs_nodes.size()); }

    void validate() const;
};

using Match = std::vector<NodeId>;  // lhs node index -> model node id

// A match became invalid because the model changed underneath it.
struct StaleMatchError : std::runtime_error {
    explicit StaleMatchError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void validate_condition(const Rule& r, const ConditionPattern& c, const char* label) {
    const int L = r.lhs_size();
    const int K = static_cast<int>(c.nodes.size());
    if (c.edges.empty()) throw std::invalid_argument(r.name + ": " + label + " without edges");
    // union-find: bucket 0 = the whole lhs, buckets 1..K = extension nodes
    std::vector<int> parent(static_cast<std::size_t>(K) + 1);
    for (int i = 0; i <= K; ++i) parent[static_cast<std::size_t>(i)] = i;
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    };
    auto bucket = [&](int idx) { return idx < L ? 0 : idx - L + 1; };
    bool touches_lhs = false;
    for (const PatternEdge& e : c.edges) {
        auto node_type = [&](int idx) -> int {
            if (idx < 0) throw std::invalid_argument(r.name + ": negative condition endpoint");
            if (idx < L) return r.lhs_nodes[static_cast<std::size_t>(idx)].type;
            if (idx < L + K) return c.nodes[static_cast<std::size_t>(idx - L)].type;
            throw std::invalid_argument(r.name + ": condition endpoint out of range");
        };
        const EdgeType& et = r.mm->edge_type(e.type);
        if (!r.mm->conforms(node_type(e.src), r.mm->node_type_index(et.source)))
            throw std::invalid_argument(r.name + ": condition edge source type mismatch");
        if (!r.mm->conforms(node_type(e.dst), r.mm->node_type_index(et.target)))
            throw std::invalid_argument(r.name + ": condition edge target type mismatch");
        if (e.src < L || e.dst < L) touches_lhs = true;
        parent[static_cast<std::size_t>(find(bucket(e.src)))] = find(bucket(e.dst));
    }
    if (!touches_lhs) throw std::invalid_argument(r.name + ": " + label + " does not reference the lhs");
    for (int i = 1; i <= K; ++i)
        if (find(i) != find(0)) throw std::invalid_argument(r.name + ": " + label + " extension is disconnected");
    for (int s : c.exclude)
        if (s < 0 || s >= L) throw std::invalid_argument(r.name + ": " + label + " excludes a slot outside the lhs");
}

}  // namespace detail

inline void Rule::validate() const {
    if (!mm) throw std::invalid_argument("rule without metamodel: " + name);
    const int L = lhs_size();
    const int C = static_cast<int>(create_nodes.size());
    for (const PatternNode& n : lhs_nodes) mm->node_type(n.type);
    for (const PatternNode& n : create_nodes) {
        if (mm->node_type(n.type).is_abstract)
            throw std::invalid_argument(name + ": creates node of abstract type");
    }
    auto pattern_type = [&](int idx) -> int {
        if (idx < 0 || idx >= L + C) throw std::invalid_argument(name + ": pattern index out of range");
        return idx < L ? lhs_nodes[static_cast<std::size_t>(idx)].type
                       : create_nodes[static_cast<std::size_t>(idx - L)].type;
    };
    auto check_edge = [&](const PatternEdge& e, bool lhs_only) {
        const EdgeType& et = mm->edge_type(e.type);
        if (lhs_only && (e.src >= L || e.dst >= L))
            throw std::invalid_argument(name + ": lhs edge endpoint outside lhs");
        if (!mm->conforms(pattern_type(e.src), mm->node_type_index(et.source)))
            throw std::invalid_argument(name + ": edge source type mismatch");
        if (!mm->conforms(pattern_type(e.dst), mm->node_type_index(et.target)))
            throw std::invalid_argument(name + ": edge target type mismatch");
    };
    for (std::size_t a = 0; a < lhs_edges.size(); ++a) {
        check_edge(lhs_edges[a], true);
        for (std::size_t b = a + 1; b < lhs_edges.size(); ++b)
            if (lhs_edges[a] == lhs_edges[b]) throw std::invalid_argument(name + ": duplicate lhs edge");
    }
    std::vector<bool> node_deleted(static_cast<std::size_t>(L), false);
    for (int i : delete_nodes) {
        if (i < 0 || i >= L) throw std::invalid_argument(name + ": deleted node outside lhs");
        if (node_deleted[static_cast<std::size_t>(i)]) throw std::invalid_argument(name + ": node deleted twice");
        node_deleted[static_cast<std::size_t>(i)] = true;
    }
    std::vector<bool> edge_deleted(lhs_edges.size(), false);
    for (int i : delete_edges) {
        if (i < 0 || i >= static_cast<int>(lhs_edges.size()))
            throw std::invalid_argument(name + ": deleted edge index out of range");
        if (edge_deleted[static_cast<std::size_t>(i)]) throw std::invalid_argument(name + ": edge deleted twice");
        edge_deleted[static_cast<std::size_t>(i)] = true;
    }
    for (const PatternEdge& e : create_edges) {
        check_edge(e, false);
        if ((e.src < L && node_deleted[static_cast<std::size_t>(e.src)]) ||
            (e.dst < L && node_deleted[static_cast<std::size_t>(e.dst)]))
            throw std::invalid_argument(name + ": created edge touches a deleted node");
        if (std::find(lhs_edges.begin(), lhs_edges.end(), e) != lhs_edges.end())
            throw std::invalid_argument(name + ": created edge already in lhs");
    }
    for (const ConditionPattern& c : nacs) detail::validate_condition(*this, c, "NAC");
    for (const ConditionPattern& c : pacs) detail::validate_condition(*this, c, "PAC");
}

namespace detail {

// Backtracking search for one condition pattern over a fixed match. Extension
// nodes must bind to model nodes distinct from each other and from the nodes
// bound to the condition's excluded lhs slots; other matched nodes are fair
// game, so a node bound in an unrelated role still counts as a witness.
inline bool condition_extension_exists(const Model& m, const Rule& r, const ConditionPattern& c,
                                       const Match& binding) {
    const int L = r.lhs_size();
    const int K = static_cast<int>(c.nodes.size());

    // edges fully inside the lhs are plain presence checks
    for (const PatternEdge& e : c.edges) {
        if (e.src < L && e.dst < L) {
            if (!m.has_edge(e.type, binding[static_cast<std::size_t>(e.src)], binding[static_cast<std::size_t>(e.dst)]))
                return false;
        }
    }
    if (K == 0) return true;

    // Degree-shaped conditions (every extension node carries exactly one edge
    // to one shared lhs anchor) reduce to counting eligible partners.
    if (K <= 16) {
        bool shaped = true;
        int anchor = -1, etype = -1;
        bool anchor_is_src = false;
        int incident[16] = {};
        for (const PatternEdge& e : c.edges) {
            if (e.src < L && e.dst < L) continue;  // checked above
            if (e.src >= L && e.dst >= L) {
                shaped = false;
                break;
            }
            const bool ext_is_dst = e.dst >= L;
            const int ext_idx = (ext_is_dst ? e.dst : e.src) - L;
            const int anchor_idx = ext_is_dst ? e.src : e.dst;
            ++incident[ext_idx];
            if (anchor == -1) {
                anchor = anchor_idx;
                etype = e.type;
                anchor_is_src = ext_is_dst;
            } else if (anchor != anchor_idx || etype != e.type || anchor_is_src != ext_is_dst) {
                shaped = false;
                break;
            }
        }
        if (shaped && anchor >= 0) {
            const int ext_type = c.nodes[0].type;
            for (int k = 0; k < K; ++k)
                if (incident[k] != 1 || c.nodes[static_cast<std::size_t>(k)].type != ext_type)
                    shaped = false;
            if (shaped) {
                const Metamodel& mm = m.metamodel();
                const int declared = anchor_is_src ? mm.target_index(etype) : mm.source_index(etype);
                const bool need_type = !mm.conforms(declared, ext_type);
                const NodeId a = binding[static_cast<std::size_t>(anchor)];
                int found = 0;
                auto visit = [&](NodeId v) {
                    if (need_type && !mm.conforms(m.node_type(v), ext_type)) return true;
                    for (int s : c.exclude)
                        if (binding[static_cast<std::size_t>(s)] == v) return true;
                    return ++found < K;
                };
                if (anchor_is_src)
                    m.each_out_neighbor(etype, a, visit);
                else
                    m.each_in_neighbor(etype, a, visit);
                return found >= K;
            }
        }
    }

    std::vector<NodeId> ext(static_cast<std::size_t>(K));
    std::vector<bool> ext_bound(static_cast<std::size_t>(K), false);

    auto resolved = [&](int idx, NodeId& out) -> bool {
        if (idx < L) {
            out = binding[static_cast<std::size_t>(idx)];
            return true;
        }
        const int k = idx - L;
        if (!ext_bound[static_cast<std::size_t>(k)]) return false;
        out = ext[static_cast<std::size_t>(k)];
        return true;
    };

    auto consistent_so_far = [&](int just_bound) -> bool {
        for (const PatternEdge& e : c.edges) {
            if (e.src - L != just_bound && e.dst - L != just_bound) continue;
            NodeId s, d;
            if (resolved(e.src, s) && resolved(e.dst, d)) {
                if (!m.has_edge(e.type, s, d)) return false;
            }
        }
        return true;
    };

    std::vector<NodeId> candidates;
    auto collect_candidates = [&](int k) {
        candidates.clear();
        const int me = L + k;
        // anchor on any edge to an already-resolved endpoint, else scan by type
        for (const PatternEdge& e : c.edges) {
            NodeId other;
            if (e.src == me && resolved(e.dst, other)) {
                candidates = m.in_neighbors(e.type, other);
                return;
            }
            if (e.dst == me && resolved(e.src, other)) {
                candidates = m.out_neighbors(e.type, other);
                return;
            }
        }
        candidates = m.nodes_conforming(c.nodes[static_cast<std::size_t>(k)].type);
    };

    auto taken = [&](NodeId v) -> bool {
        for (int s : c.exclude)
            if (binding[static_cast<std::size_t>(s)] == v) return true;
        for (int k = 0; k < K; ++k)
            if (ext_bound[static_cast<std::size_t>(k)] && ext[static_cast<std::size_t>(k)] == v) return true;
        return false;
    };

    // recursive lambda via explicit stack-free recursion
    std::vector<std::vector<NodeId>> cand_stack(static_cast<std::size_t>(K));
    std::vector<std::size_t> pos(static_cast<std::size_t>(K), 0);
    int k = 0;
    collect_candidates(0);
    cand_stack[0] = candidates;
    pos[0] = 0;
    while (k >= 0) {
        bool advanced = false;
        while (pos[static_cast<std::size_t>(k)] < cand_stack[static_cast<std::size_t>(k)].size()) {
            const NodeId v = cand_stack[static_cast<std::size_t>(k)][pos[static_cast<std::size_t>(k)]++];
            if (!m.metamodel().conforms(m.node_type(v), c.nodes[static_cast<std::size_t>(k)].type)) continue;
            if (taken(v)) continue;
            ext[static_cast<std::size_t>(k)] = v;
            ext_bound[static_cast<std::size_t>(k)] = true;
            if (!consistent_so_far(k)) {
                ext_bound[static_cast<std::size_t>(k)] = false;
                continue;
            }
            if (k == K - 1) return true;
            ++k;
            collect_candidates(k);
            cand_stack[static_cast<std::size_t>(k)] = candidates;
            pos[static_cast<std::size_t>(k)] = 0;
            advanced = true;
            break;
        }
        if (!advanced) {
            ext_bound[static_cast<std::size_t>(k)] = false;
            --k;
            if (k >= 0) ext_bound[static_cast<std::size_t>(k)] = false;
        }
    }
    return false;
}

inline bool conditions_hold(const Rule& r, const Model& m, const Match& binding) {
    // created edges between two lhs nodes must not already exist
    const int L = r.lhs_size();
    for (const PatternEdge& e : r.create_edges) {
        if (e.src < L && e.dst < L &&
            m.has_edge(e.type, binding[static_cast<std::size_t>(e.src)], binding[static_cast<std::size_t>(e.dst)]))
            return false;
    }
    for (const ConditionPattern& c : r.nacs)
        if (condition_extension_exists(m, r, c, binding)) return false;
    for (const ConditionPattern& c : r.pacs)
        if (!condition_extension_exists(m, r, c, binding)) return false;
    return true;
}

template <typename OnMatch>
inline void enumerate_matches(const Rule& r, const Model& m, OnMatch&& on_match) {
    const int L = r.lhs_size();
    Match binding(static_cast<std::size_t>(L), 0);
    std::vector<bool> bound(static_cast<std::size_t>(L), false);

    if (L == 0) {
        if (conditions_hold(r, m, binding)) on_match(binding);
        return;
    }

    auto edges_ok = [&](int i) -> bool {
        for (const PatternEdge& e : r.lhs_edges) {
            const bool src_ready = e.src == i || (e.src < i && bound[static_cast<std::size_t>(e.src)]);
            const bool dst_ready = e.dst == i || (e.dst < i && bound[static_cast<std::size_t>(e.dst)]);
            if ((e.src == i || e.dst == i) && src_ready && dst_ready) {
                if (!m.has_edge(e.type, binding[static_cast<std::size_t>(e.src)], binding[static_cast<std::size_t>(e.dst)]))
                    return false;
            }
        }
        return true;
    };

    // Per-level binding plan, fixed by pattern shape: a node with an lhs edge
    // to an earlier node draws candidates from that node's adjacency, anyone
    // else from the (memoized) per-type node list. The model never changes
    // during enumeration, so existence checks are unnecessary and type checks
    // only matter when the pattern type is narrower than the edge endpoint.
    const Metamodel& mm = m.metamodel();
    struct LevelPlan {
        int anchor_edge = -1;  // index into lhs_edges, -1 = type scan
        bool via_in = false;   // candidates are edge sources found through in-index
        bool check_type = false;
    };
    std::vector<LevelPlan> plan(static_cast<std::size_t>(L));
    for (int i = 0; i < L; ++i) {
        LevelPlan& p = plan[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < r.lhs_edges.size(); ++k) {
            const PatternEdge& e = r.lhs_edges[k];
            if (e.src == i && e.dst < i) {
                p.anchor_edge = static_cast<int>(k);
                p.via_in = true;
                p.check_type = !mm.conforms(mm.source_index(e.type), r.lhs_nodes[static_cast<std::size_t>(i)].type);
                break;
            }
            if (e.dst == i && e.src < i) {
                p.anchor_edge = static_cast<int>(k);
                p.via_in = false;
                p.check_type = !mm.conforms(mm.target_index(e.type), r.lhs_nodes[static_cast<std::size_t>(i)].type);
                break;
            }
        }
    }

    std::vector<std::vector<NodeId>> anchored_cand(static_cast<std::size_t>(L));

    auto candidates_for = [&](int i) -> const std::vector<NodeId>& {
        const LevelPlan& p = plan[static_cast<std::size_t>(i)];
        if (p.anchor_edge < 0) return m.nodes_conforming(r.lhs_nodes[static_cast<std::size_t>(i)].type);
        const PatternEdge& e = r.lhs_edges[static_cast<std::size_t>(p.anchor_edge)];
        anchored_cand[static_cast<std::size_t>(i)] =
            p.via_in ? m.in_neighbors(e.type, binding[static_cast<std::size_t>(e.dst)])
                     : m.out_neighbors(e.type, binding[static_cast<std::size_t>(e.src)]);
        return anchored_cand[static_cast<std::size_t>(i)];
    };

    std::vector<const std::vector<NodeId>*> cand(static_cast<std::size_t>(L), nullptr);
    std::vector<std::size_t> pos(static_cast<std::size_t>(L), 0);
    int i = 0;
    cand[0] = &candidates_for(0);
    pos[0] = 0;
    bool stop = false;
    while (i >= 0 && !stop) {
        bool advanced = false;
        while (pos[static_cast<std::size_t>(i)] < cand[static_cast<std::size_t>(i)]->size()) {
            const NodeId v = (*cand[static_cast<std::size_t>(i)])[pos[static_cast<std::size_t>(i)]++];
            if (plan[static_cast<std::size_t>(i)].check_type &&
                !mm.conforms(m.node_type(v), r.lhs_nodes[static_cast<std::size_t>(i)].type))
                continue;
            bool dup = false;
            for (int j = 0; j < i; ++j)
                if (bound[static_cast<std::size_t>(j)] && binding[static_cast<std::size_t>(j)] == v) dup = true;
            if (dup) continue;
            binding[static_cast<std::size_t>(i)] = v;
            bound[static_cast<std::size_t>(i)] = true;
            if (!edges_ok(i)) {
                bound[static_cast<std::size_t>(i)] = false;
                continue;
            }
            if (i == L - 1) {
                if (conditions_hold(r, m, binding)) {
                    if (!on_match(binding)) {
                        stop = true;
                        break;
                    }
                }
                bound[static_cast<std::size_t>(i)] = false;
                continue;
            }
            ++i;
            cand[static_cast<std::size_t>(i)] = &candidates_for(i);
            pos[static_cast<std::size_t>(i)] = 0;
            advanced = true;
            break;
        }
        if (!advanced && !stop) {
            bound[static_cast<std::size_t>(i)] = false;
            --i;
            if (i >= 0) bound[static_cast<std::size_t>(i)] = false;
        }
    }
}

}  // namespace detail

// All injective matches of the rule's lhs, in lexicographic order of the
// bound node-id tuples.
inline std::vector<Match> find_matches(const Rule& r, const Model& m) {
    std::vector<Match> out;
    detail::enumerate_matches(r, m, [&](const Match& b) {
        out.push_back(b);
        return true;
    });
    return out;
}

inline bool applicable(const Rule& r, const Model& m) {
    bool found = false;
    detail::enumerate_matches(r, m, [&](const Match&) {
        found = true;
        return false;
    });
    return found;
}

inline std::size_t count_matches(const Rule& r, const Model& m) {
    std::size_t n = 0;
    detail::enumerate_matches(r, m, [&](const Match&) {
        ++n;
        return true;
    });
    return n;
}

// The index-th match in enumeration order, without materializing the rest.
inline std::optional<Match> nth_match(const Rule& r, const Model& m, std::size_t index) {
    std::optional<Match> out;
    std::size_t n = 0;
    detail::enumerate_matches(r, m, [&](const Match& b) {
        if (n++ == index) {
            out = b;
            return false;
        }
        return true;
    });
    return out;
}

// Applies the rule at the given match and returns the transformed copy.
// The input model is left untouched. Throws StaleMatchError if the match no
// longer fits the model.
inline Model apply(const Rule& r, const Model& m, const Match& match) {
    const int L = r.lhs_size();
    if (static_cast<int>(match.size()) != L) throw StaleMatchError(r.name + ": match arity mismatch");
    for (int i = 0; i < L; ++i) {
        const NodeId v = match[static_cast<std::size_t>(i)];
        if (!m.has_node(v)) throw StaleMatchError(r.name + ": bound node vanished");
        if (!m.metamodel().conforms(m.node_type(v), r.lhs_nodes[static_cast<std::size_t>(i)].type))
            throw StaleMatchError(r.name + ": bound node changed type");
    }
    for (const PatternEdge& e : r.lhs_edges) {
        if (!m.has_edge(e.type, match[static_cast<std::size_t>(e.src)], match[static_cast<std::size_t>(e.dst)]))
            throw StaleMatchError(r.name + ": bound edge vanished");
    }

    Model out = m;
    for (int idx : r.delete_edges) {
        const PatternEdge& e = r.lhs_edges[static_cast<std::size_t>(idx)];
        out.remove_edge(e.type, match[static_cast<std::size_t>(e.src)], match[static_cast<std::size_t>(e.dst)]);
    }
    std::vector<bool> node_deleted(static_cast<std::size_t>(L), false);
    for (int idx : r.delete_nodes) {
        node_deleted[static_cast<std::size_t>(idx)] = true;
        out.remove_node(match[static_cast<std::size_t>(idx)]);
    }
    std::vector<NodeId> created;
    created.reserve(r.create_nodes.size());
    for (const PatternNode& n : r.create_nodes) created.push_back(out.add_node(n.type));
    for (const PatternEdge& e : r.create_edges) {
        auto resolve = [&](int idx) -> NodeId {
            return idx < L ? match[static_cast<std::size_t>(idx)] : created[static_cast<std::size_t>(idx - L)];
        };
        out.add_edge(e.type, resolve(e.src), resolve(e.dst));
    }
    return out;
}

// Canonical description of a rule's effect, used to deduplicate rules that
// both generation phases produce. Names, taxonomy and provenance are ignored;
// condition order is normalized.
inline std::string structural_signature(const Rule& r) {
    std::ostringstream os;
    auto put_nodes = [&](const std::vector<PatternNode>& ns) {
        for (const PatternNode& n : ns) os << n.type << ',';
        os << ';';
    };
    auto put_edges = [&](const std::vector<PatternEdge>& es) {
        for (const PatternEdge& e : es) os << e.type << ':' << e.src << '>' << e.dst << ',';
        os << ';';
    };
    put_nodes(r.lhs_nodes);
    put_edges(r.lhs_edges);
    for (int i : r.delete_nodes) os << i << ',';
    os << ';';
    for (int i : r.delete_edges) os << i << ',';
    os << ';';
    put_nodes(r.create_nodes);
    put_edges(r.create_edges);
    auto conditions = [&](const std::vector<ConditionPattern>& cs, char tag) {
        std::vector<std::string> parts;
        for (const ConditionPattern& c : cs) {
            std::ostringstream cs_os;
            for (const PatternNode& n : c.nodes) cs_os << n.type << ',';
            cs_os << '|';
            for (const PatternEdge& e : c.edges) cs_os << e.type << ':' << e.src << '>' << e.dst << ',';
            cs_os << '|';
            for (int s : c.exclude) cs_os << s << ',';
            parts.push_back(cs_os.str());
        }
        std::sort(parts.begin(), parts.end());
        os << tag;
        for (const std::string& p : parts) os << p << '&';
    };
    conditions(r.nacs, 'N');
    conditions(r.pacs, 'P');
    return os.str();
}

}  // namespace mosearch
