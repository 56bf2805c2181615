#pragma once

#include <mosearch/rng.hpp>
#include <mosearch/rules.hpp>
#include <mosearch/typed_graph.hpp>

#include <optional>
#include <vector>

namespace test_helpers {

using namespace mosearch;

// Sprint/WorkItem shape: each sprint needs 1..* items, each item sits in 0..1
// sprints (refinable to exactly one).
inline MetamodelPtr sp_like_mm() {
    return make_metamodel(
        {
            {"Sprint", false, std::nullopt, {}},
            {"WorkItem", false, std::nullopt, {{"Effort", AttrType::Integer}}},
        },
        {
            {"isPlannedFor", "Sprint", "WorkItem", mult_unbounded(1), mult(0, 1)},
        });
}

// Two plain types joined by one edge type with the given bounds.
inline MetamodelPtr ab_mm(Multiplicity per_source, Multiplicity per_target) {
    return make_metamodel(
        {
            {"A", false, std::nullopt, {}},
            {"B", false, std::nullopt, {}},
        },
        {
            {"e", "A", "B", per_source, per_target},
        });
}

// Independent match oracle: enumerates every injective, type-correct node
// tuple by brute force and filters on edges and conditions with its own
// recursive search. Deliberately naive.
inline bool oracle_condition_exists(const Model& m, const Rule& r, const ConditionPattern& c,
                                    const std::vector<NodeId>& binding, std::vector<NodeId>& ext) {
    const int L = r.lhs_size();
    const std::size_t k = ext.size();
    if (k == c.nodes.size()) {
        for (const PatternEdge& e : c.edges) {
            auto resolve = [&](int idx) { return idx < L ? binding[std::size_t(idx)] : ext[std::size_t(idx - L)]; };
            if (!m.has_edge(e.type, resolve(e.src), resolve(e.dst))) return false;
        }
        return true;
    }
    for (const auto& [id, node] : m.nodes()) {
        if (!m.metamodel().conforms(node.type, c.nodes[k].type)) continue;
        bool used = false;
        for (int s : c.exclude)
            if (binding[std::size_t(s)] == id) used = true;
        for (NodeId b : ext)
            if (b == id) used = true;
        if (used) continue;
        ext.push_back(id);
        if (oracle_condition_exists(m, r, c, binding, ext)) {
            ext.pop_back();
            return true;
        }
        ext.pop_back();
    }
    return false;
}

inline void oracle_matches_rec(const Model& m, const Rule& r, std::vector<NodeId>& binding,
                               std::vector<Match>& out) {
    const int L = r.lhs_size();
    if (static_cast<int>(binding.size()) == L) {
        for (const PatternEdge& e : r.lhs_edges)
            if (!m.has_edge(e.type, binding[std::size_t(e.src)], binding[std::size_t(e.dst)])) return;
        for (const PatternEdge& e : r.create_edges) {
            if (e.src < L && e.dst < L && m.has_edge(e.type, binding[std::size_t(e.src)], binding[std::size_t(e.dst)]))
                return;
        }
        std::vector<NodeId> ext;
        for (const ConditionPattern& c : r.nacs)
            if (oracle_condition_exists(m, r, c, binding, ext)) return;
        for (const ConditionPattern& c : r.pacs)
            if (!oracle_condition_exists(m, r, c, binding, ext)) return;
        out.push_back(binding);
        return;
    }
    const std::size_t i = binding.size();
    for (const auto& [id, node] : m.nodes()) {
        if (!m.metamodel().conforms(node.type, r.lhs_nodes[i].type)) continue;
        bool used = false;
        for (NodeId b : binding)
            if (b == id) used = true;
        if (used) continue;
        binding.push_back(id);
        oracle_matches_rec(m, r, binding, out);
        binding.pop_back();
    }
}

inline std::vector<Match> oracle_matches(const Rule& r, const Model& m) {
    std::vector<Match> out;
    std::vector<NodeId> binding;
    oracle_matches_rec(m, r, binding, out);
    return out;
}

// Structurally valid random instance: nodes first, then edges sampled from
// the remaining legal slots.
inline Model random_model(const MetamodelPtr& mm, Rng& rng, std::size_t max_nodes_per_type,
                          double edge_density = 0.4) {
    Model m(mm);
    for (int t = 0; t < static_cast<int>(mm->node_types().size()); ++t) {
        if (mm->node_type(t).is_abstract) continue;
        const auto n = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(max_nodes_per_type)));
        for (std::size_t i = 0; i < n; ++i) m.add_node(t);
    }
    for (int e = 0; e < static_cast<int>(mm->edge_types().size()); ++e) {
        const EdgeType& et = mm->edge_type(e);
        auto sources = m.nodes_conforming(mm->node_type_index(et.source));
        auto targets = m.nodes_conforming(mm->node_type_index(et.target));
        for (NodeId s : sources)
            for (NodeId t : targets) {
                if (s == t) continue;
                if (rng.uniform_real() < edge_density) m.add_edge(e, s, t);
            }
    }
    return m;
}

}  // namespace test_helpers
