#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

namespace mosearch {

using NodeId = std::uint32_t;

// Bounds on how many edges of one type a node may carry at one end.
// An absent upper bound means unbounded ("*" in the JSON schema).
struct Multiplicity {
    std::uint32_t lower = 0;
    std::optional<std::uint32_t> upper;  // nullopt = unbounded

    bool unbounded() const { return !upper.has_value(); }
    bool fixed() const { return upper && *upper == lower; }

    bool contains(std::size_t count) const {
        if (count < lower) return false;
        return !upper || count <= *upper;
    }

    void validate() const {
        if (upper && *upper == 0) throw std::invalid_argument("multiplicity upper bound must be positive");
        if (upper && *upper < lower) throw std::invalid_argument("multiplicity upper bound below lower bound");
    }

    friend bool operator==(const Multiplicity&, const Multiplicity&) = default;
};

inline Multiplicity mult(std::uint32_t lower, std::uint32_t upper) { return {lower, upper}; }
inline Multiplicity mult_unbounded(std::uint32_t lower) { return {lower, std::nullopt}; }

enum class AttrType { Integer, Real, String };

using AttrValue = std::variant<std::int64_t, double, std::string>;
using AttrMap = std::map<std::string, AttrValue>;

struct NodeType {
    std::string name;
    bool is_abstract = false;
    std::optional<std::string> parent;  // at most one level of subtyping
    std::map<std::string, AttrType> attributes;
};

// Directed edge type between two node types. per_source bounds the number of
// edges of this type each source node carries (the multiplicity written at the
// target end of an association); per_target bounds the count at each target.
struct EdgeType {
    std::string name;
    std::string source;
    std::string target;
    Multiplicity per_source;
    Multiplicity per_target;
};

// Which end of an edge type a node occupies; also selects the bound that
// applies to that node's count (Source -> per_source, Target -> per_target).
enum class End { Source, Target };

inline const char* to_string(End e) { return e == End::Source ? "source" : "target"; }

class Metamodel {
public:
    Metamodel(std::vector<NodeType> node_types, std::vector<EdgeType> edge_types)
        : node_types_(std::move(node_types)), edge_types_(std::move(edge_types)) {
        validate();
    }

    const std::vector<NodeType>& node_types() const { return node_types_; }
    const std::vector<EdgeType>& edge_types() const { return edge_types_; }

    int node_type_index(const std::string& name) const {
        auto it = node_index_.find(name);
        if (it == node_index_.end()) throw std::invalid_argument("unknown node type: " + name);
        return it->second;
    }

    int edge_type_index(const std::string& name) const {
        auto it = edge_index_.find(name);
        if (it == edge_index_.end()) throw std::invalid_argument("unknown edge type: " + name);
        return it->second;
    }

    const NodeType& node_type(int i) const { return node_types_.at(static_cast<std::size_t>(i)); }
    const EdgeType& edge_type(int i) const { return edge_types_.at(static_cast<std::size_t>(i)); }

    int source_index(int edge) const { return source_index_.at(static_cast<std::size_t>(edge)); }
    int target_index(int edge) const { return target_index_.at(static_cast<std::size_t>(edge)); }

    // true if a node of type `concrete` can stand where `declared` is required
    bool conforms(int concrete, int declared) const {
        return concrete == declared || parent_index_[static_cast<std::size_t>(concrete)] == declared;
    }

    bool conforms(const std::string& concrete, const std::string& declared) const {
        return conforms(node_type_index(concrete), node_type_index(declared));
    }

    // attribute schema including inherited attributes
    std::optional<AttrType> attribute_type(int node_type_idx, const std::string& attr) const {
        const NodeType* t = &node_type(node_type_idx);
        auto it = t->attributes.find(attr);
        if (it != t->attributes.end()) return it->second;
        if (t->parent) {
            const NodeType& p = node_type(node_type_index(*t->parent));
            auto pit = p.attributes.find(attr);
            if (pit != p.attributes.end()) return pit->second;
        }
        return std::nullopt;
    }

private:
    void validate() {
        for (const auto& nt : node_types_) {
            if (nt.name.empty()) throw std::invalid_argument("node type with empty name");
            if (node_index_.count(nt.name)) throw std::invalid_argument("duplicate node type: " + nt.name);
            node_index_[nt.name] = static_cast<int>(node_index_.size());
        }
        parent_index_.assign(node_types_.size(), -1);
        for (std::size_t i = 0; i < node_types_.size(); ++i) {
            const auto& nt = node_types_[i];
            if (!nt.parent) continue;
            auto it = node_index_.find(*nt.parent);
            if (it == node_index_.end()) throw std::invalid_argument("unknown parent type: " + *nt.parent);
            if (node_types_[static_cast<std::size_t>(it->second)].parent)
                throw std::invalid_argument("subtyping deeper than one level at: " + nt.name);
            parent_index_[i] = it->second;
        }
        for (const auto& et : edge_types_) {
            if (et.name.empty()) throw std::invalid_argument("edge type with empty name");
            if (edge_index_.count(et.name)) throw std::invalid_argument("duplicate edge type: " + et.name);
            edge_index_[et.name] = static_cast<int>(edge_index_.size());
            auto src = node_index_.find(et.source);
            auto dst = node_index_.find(et.target);
            if (src == node_index_.end()) throw std::invalid_argument("unknown source type in edge: " + et.name);
            if (dst == node_index_.end()) throw std::invalid_argument("unknown target type in edge: " + et.name);
            source_index_.push_back(src->second);
            target_index_.push_back(dst->second);
            et.per_source.validate();
            et.per_target.validate();
        }
    }

    std::vector<NodeType> node_types_;
    std::vector<EdgeType> edge_types_;
    std::map<std::string, int> node_index_;
    std::map<std::string, int> edge_index_;
    std::vector<int> parent_index_;
    std::vector<int> source_index_;
    std::vector<int> target_index_;
};

using MetamodelPtr = std::shared_ptr<const Metamodel>;

inline MetamodelPtr make_metamodel(std::vector<NodeType> node_types, std::vector<EdgeType> edge_types) {
    return std::make_shared<const Metamodel>(std::move(node_types), std::move(edge_types));
}

// Refined multiplicities layered over a metamodel. A refinement may only
// narrow the base bounds of one end of one edge type.
class ConstraintSet {
public:
    void refine(std::string edge, End end, Multiplicity m) {
        m.validate();
        refinements_[{std::move(edge), end}] = m;
    }

    const Multiplicity* find(const std::string& edge, End end) const {
        auto it = refinements_.find({edge, end});
        return it == refinements_.end() ? nullptr : &it->second;
    }

    bool empty() const { return refinements_.empty(); }
    std::size_t size() const { return refinements_.size(); }

    const std::map<std::pair<std::string, End>, Multiplicity>& entries() const { return refinements_; }

    void validate(const Metamodel& mm) const {
        for (const auto& [key, m] : refinements_) {
            const EdgeType& et = mm.edge_type(mm.edge_type_index(key.first));
            const Multiplicity& base = key.second == End::Source ? et.per_source : et.per_target;
            if (m.lower < base.lower)
                throw std::invalid_argument("refinement widens lower bound of " + key.first);
            if (base.upper && (!m.upper || *m.upper > *base.upper))
                throw std::invalid_argument("refinement widens upper bound of " + key.first);
        }
    }

private:
    std::map<std::pair<std::string, End>, Multiplicity> refinements_;
};

inline Multiplicity effective_bounds(const EdgeType& et, End end, const ConstraintSet* cs) {
    if (cs) {
        if (const Multiplicity* m = cs->find(et.name, end)) return *m;
    }
    return end == End::Source ? et.per_source : et.per_target;
}

// Shape of one edge type's effective bounds, the driver for rule generation.
// a_end = per-source count bounds (n..m), b_end = per-target count bounds (k..l).
struct PatternClass {
    Multiplicity a_end;
    Multiplicity b_end;
    bool a_fixed = false;      // n == m
    bool b_fixed = false;      // k == l
    bool a_open = false;       // n == 0
    bool b_open = false;       // k == 0
    bool a_unbounded = false;  // m == *
    bool b_unbounded = false;  // l == *
};

inline PatternClass classify_pattern(const EdgeType& et, const ConstraintSet* cs = nullptr) {
    PatternClass pc;
    pc.a_end = effective_bounds(et, End::Source, cs);
    pc.b_end = effective_bounds(et, End::Target, cs);
    pc.a_fixed = pc.a_end.fixed();
    pc.b_fixed = pc.b_end.fixed();
    pc.a_open = pc.a_end.lower == 0;
    pc.b_open = pc.b_end.lower == 0;
    pc.a_unbounded = pc.a_end.unbounded();
    pc.b_unbounded = pc.b_end.unbounded();
    return pc;
}

// Typed instance graph. Structural conformance (types exist, endpoints match
// the edge type's declaration, no parallel edges of one type) is enforced on
// every mutation, so a Model can never hold a structurally invalid graph.
// Multiplicity conformance is a separate query (check_conformance).
class Model {
public:
    struct Node {
        int type = -1;
        AttrMap attrs;
    };

    struct Edge {
        int type;
        NodeId src;
        NodeId dst;
        friend auto operator<=>(const Edge&, const Edge&) = default;
    };

    explicit Model(MetamodelPtr mm) : mm_(std::move(mm)) {
        if (!mm_) throw std::invalid_argument("model requires a metamodel");
    }

    const Metamodel& metamodel() const { return *mm_; }
    const MetamodelPtr& metamodel_ptr() const { return mm_; }

    NodeId add_node(const std::string& type, AttrMap attrs = {}) {
        return add_node(mm_->node_type_index(type), std::move(attrs));
    }

    NodeId add_node(int type, AttrMap attrs = {}) {
        NodeId id = next_id_++;
        insert_node(id, type, std::move(attrs));
        return id;
    }

    // loader path: explicit ids from a file
    void add_node_with_id(NodeId id, int type, AttrMap attrs = {}) {
        if (nodes_.count(id)) throw std::invalid_argument("duplicate node id " + std::to_string(id));
        insert_node(id, type, std::move(attrs));
        next_id_ = std::max(next_id_, id + 1);
    }

    void remove_node(NodeId id) {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) throw std::invalid_argument("remove_node: no node " + std::to_string(id));
        // drop incident edges first
        std::vector<Edge> doomed;
        for (const Edge& e : edges_)
            if (e.src == id || e.dst == id) doomed.push_back(e);
        for (const Edge& e : doomed) erase_edge(e);
        nodes_.erase(it);
        conforming_cache_.clear();
    }

    void add_edge(const std::string& type, NodeId src, NodeId dst) {
        add_edge(mm_->edge_type_index(type), src, dst);
    }

    void add_edge(int type, NodeId src, NodeId dst) {
        const EdgeType& et = mm_->edge_type(type);
        check_endpoint(src, mm_->source_index(type), et.name, "source");
        check_endpoint(dst, mm_->target_index(type), et.name, "target");
        Edge e{type, src, dst};
        if (edges_.count(e))
            throw std::invalid_argument("parallel edge of type " + et.name);
        edges_.insert(e);
        in_index_.insert({type, dst, src});
    }

    void remove_edge(int type, NodeId src, NodeId dst) {
        Edge e{type, src, dst};
        if (!edges_.count(e))
            throw std::invalid_argument("remove_edge: no such edge of type " + mm_->edge_type(type).name);
        erase_edge(e);
    }

    bool has_node(NodeId id) const { return nodes_.count(id) != 0; }
    bool has_edge(int type, NodeId src, NodeId dst) const { return edges_.count({type, src, dst}) != 0; }

    int node_type(NodeId id) const { return node_at(id).type; }
    const AttrMap& attrs(NodeId id) const { return node_at(id).attrs; }
    AttrMap& attrs(NodeId id) { return const_cast<AttrMap&>(node_at(id).attrs); }

    const std::map<NodeId, Node>& nodes() const { return nodes_; }
    const std::set<Edge>& edges() const { return edges_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    std::vector<NodeId> nodes_of_type(int type) const {
        std::vector<NodeId> out;
        for (const auto& [id, n] : nodes_)
            if (n.type == type) out.push_back(id);
        return out;
    }

    // nodes whose type is `declared` or a direct subtype of it, ascending id;
    // memoized until the node set changes. The cache makes concurrent reads of
    // one Model instance unsafe; copies are independent.
    const std::vector<NodeId>& nodes_conforming(int declared) const {
        auto it = conforming_cache_.find(declared);
        if (it != conforming_cache_.end()) return it->second;
        std::vector<NodeId> out;
        for (const auto& [id, n] : nodes_)
            if (mm_->conforms(n.type, declared)) out.push_back(id);
        return conforming_cache_.emplace(declared, std::move(out)).first->second;
    }

    std::vector<NodeId> out_neighbors(int type, NodeId src) const {
        std::vector<NodeId> out;
        for (auto it = edges_.lower_bound({type, src, 0}); it != edges_.end() && it->type == type && it->src == src; ++it)
            out.push_back(it->dst);
        return out;
    }

    std::vector<NodeId> in_neighbors(int type, NodeId dst) const {
        std::vector<NodeId> out;
        for (auto it = in_index_.lower_bound({type, dst, 0});
             it != in_index_.end() && std::get<0>(*it) == type && std::get<1>(*it) == dst; ++it)
            out.push_back(std::get<2>(*it));
        return out;
    }

    // allocation-free neighbor walks; fn returns false to stop early
    template <typename Fn>
    void each_out_neighbor(int type, NodeId src, Fn&& fn) const {
        for (auto it = edges_.lower_bound({type, src, 0}); it != edges_.end() && it->type == type && it->src == src; ++it)
            if (!fn(it->dst)) return;
    }

    template <typename Fn>
    void each_in_neighbor(int type, NodeId dst, Fn&& fn) const {
        for (auto it = in_index_.lower_bound({type, dst, 0});
             it != in_index_.end() && std::get<0>(*it) == type && std::get<1>(*it) == dst; ++it)
            if (!fn(std::get<2>(*it))) return;
    }

    std::size_t out_degree(int type, NodeId src) const {
        std::size_t n = 0;
        for (auto it = edges_.lower_bound({type, src, 0}); it != edges_.end() && it->type == type && it->src == src; ++it)
            ++n;
        return n;
    }

    std::size_t in_degree(int type, NodeId dst) const {
        std::size_t n = 0;
        for (auto it = in_index_.lower_bound({type, dst, 0});
             it != in_index_.end() && std::get<0>(*it) == type && std::get<1>(*it) == dst; ++it)
            ++n;
        return n;
    }

private:
    const Node& node_at(NodeId id) const {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) throw std::invalid_argument("no node " + std::to_string(id));
        return it->second;
    }

    void insert_node(NodeId id, int type, AttrMap attrs) {
        const NodeType& nt = mm_->node_type(type);
        if (nt.is_abstract) throw std::invalid_argument("cannot instantiate abstract type " + nt.name);
        for (const auto& [name, value] : attrs) {
            auto declared = mm_->attribute_type(type, name);
            if (!declared) throw std::invalid_argument("unknown attribute " + name + " on " + nt.name);
            const bool ok = (*declared == AttrType::Integer && std::holds_alternative<std::int64_t>(value)) ||
                            (*declared == AttrType::Real && std::holds_alternative<double>(value)) ||
                            (*declared == AttrType::String && std::holds_alternative<std::string>(value));
            if (!ok) throw std::invalid_argument("attribute type mismatch for " + name + " on " + nt.name);
        }
        nodes_.emplace(id, Node{type, std::move(attrs)});
        conforming_cache_.clear();
    }

    void check_endpoint(NodeId id, int declared, const std::string& edge, const char* role) const {
        auto it = nodes_.find(id);
        if (it == nodes_.end())
            throw std::invalid_argument(std::string("edge ") + edge + ": missing " + role + " node");
        if (!mm_->conforms(it->second.type, declared))
            throw std::invalid_argument(std::string("edge ") + edge + ": " + role + " node has wrong type");
    }

    void erase_edge(const Edge& e) {
        edges_.erase(e);
        in_index_.erase({e.type, e.dst, e.src});
    }

    MetamodelPtr mm_;
    std::map<NodeId, Node> nodes_;
    std::set<Edge> edges_;                                // ordered by (type, src, dst)
    std::set<std::tuple<int, NodeId, NodeId>> in_index_;  // (type, dst, src)
    NodeId next_id_ = 0;
    mutable std::map<int, std::vector<NodeId>> conforming_cache_;
};

inline std::size_t count_incident(const Model& m, NodeId node, int edge_type, End end) {
    return end == End::Source ? m.out_degree(edge_type, node) : m.in_degree(edge_type, node);
}

enum class ViolationKind { Lower, Upper };

struct ConformanceViolation {
    NodeId node;
    int edge_type;
    End end;
    ViolationKind kind;
    std::size_t actual;
    Multiplicity bound;
};

// Multiplicity conformance under the metamodel's base bounds, optionally
// tightened by a constraint set. Entries come out sorted by node id, then
// edge type, then end.
inline std::vector<ConformanceViolation> check_conformance(const Model& m, const ConstraintSet* cs = nullptr) {
    const Metamodel& mm = m.metamodel();
    std::vector<ConformanceViolation> out;
    for (int e = 0; e < static_cast<int>(mm.edge_types().size()); ++e) {
        const EdgeType& et = mm.edge_type(e);
        const Multiplicity src_bound = effective_bounds(et, End::Source, cs);
        const Multiplicity dst_bound = effective_bounds(et, End::Target, cs);
        for (NodeId id : m.nodes_conforming(mm.node_type_index(et.source))) {
            const std::size_t c = m.out_degree(e, id);
            if (c < src_bound.lower)
                out.push_back({id, e, End::Source, ViolationKind::Lower, c, src_bound});
            else if (src_bound.upper && c > *src_bound.upper)
                out.push_back({id, e, End::Source, ViolationKind::Upper, c, src_bound});
        }
        for (NodeId id : m.nodes_conforming(mm.node_type_index(et.target))) {
            const std::size_t c = m.in_degree(e, id);
            if (c < dst_bound.lower)
                out.push_back({id, e, End::Target, ViolationKind::Lower, c, dst_bound});
            else if (dst_bound.upper && c > *dst_bound.upper)
                out.push_back({id, e, End::Target, ViolationKind::Upper, c, dst_bound});
        }
    }
    std::sort(out.begin(), out.end(), [](const ConformanceViolation& a, const ConformanceViolation& b) {
        return std::tie(a.node, a.edge_type, a.end) < std::tie(b.node, b.edge_type, b.end);
    });
    return out;
}

}  // namespace mosearch
