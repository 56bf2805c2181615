#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "operators.hpp"
#include "rng.hpp"
#include "rulegen.hpp"
#include "typed_graph.hpp"

namespace mosearch {

enum class Direction { Minimize, Maximize };

inline const char* to_string(Direction d) { return d == Direction::Minimize ? "min" : "max"; }

struct Objective {
    std::string name;
    Direction direction;
    std::function<double(const Model&)> eval;
};

// Runtime knobs attached to an instance (velocity for sprint planning, ...).
using EvalParams = std::map<std::string, double>;

// One case study: metamodel, solution constraints, generation scope,
// objectives, hand-written baseline operators and a random instance generator.
struct ProblemPack {
    std::string id;
    MetamodelPtr metamodel;
    ConstraintSet solution_constraints;
    GenerationScope scope;
    std::vector<Objective> objectives;
    EvalParams eval_defaults;
    // size knobs accepted by the generator, in CLI order, with defaults
    std::vector<std::pair<std::string, double>> instance_defaults;
    std::function<Model(const std::map<std::string, double>&, Rng&)> generate_fn;
    // feasibility violations beyond multiplicity conformance
    std::function<std::size_t(const Model&, const EvalParams&)> extra_violations;
    std::vector<OperatorPtr> manual_operators;

    Model make_instance(const std::map<std::string, double>& overrides, Rng& rng) const {
        std::map<std::string, double> sizes;
        for (const auto& [k, v] : instance_defaults) sizes[k] = v;
        for (const auto& [k, v] : overrides) {
            if (!sizes.count(k))
                throw std::invalid_argument(id + ": unknown instance parameter " + k);
            sizes[k] = v;
        }
        return generate_fn(sizes, rng);
    }

    std::vector<OperatorPtr> generated_operators(const GenerationOptions& opts = {}) const {
        return to_operators(generate_acpsos(metamodel, solution_constraints, scope, opts).rules);
    }

    std::size_t total_violations(const Model& m, const EvalParams& params) const {
        std::size_t n = check_conformance(m, &solution_constraints).size();
        if (extra_violations) n += extra_violations(m, params);
        return n;
    }
};

namespace problems_detail {

inline std::size_t size_param(const std::map<std::string, double>& sizes, const std::string& key) {
    const double v = sizes.at(key);
    if (v < 0 || v != std::floor(v) || v > 1e9)
        throw std::invalid_argument("instance parameter " + key + " must be a small non-negative integer");
    return static_cast<std::size_t>(v);
}

inline double population_sd(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return std::sqrt(var / static_cast<double>(xs.size()));
}

inline double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

inline std::int64_t int_attr(const Model& m, NodeId id, const std::string& key) {
    const AttrMap& a = m.attrs(id);
    auto it = a.find(key);
    if (it == a.end())
        throw std::invalid_argument("node " + std::to_string(id) + " lacks attribute " + key);
    return std::get<std::int64_t>(it->second);
}

inline double real_attr(const Model& m, NodeId id, const std::string& key) {
    const AttrMap& a = m.attrs(id);
    auto it = a.find(key);
    if (it == a.end())
        throw std::invalid_argument("node " + std::to_string(id) + " lacks attribute " + key);
    return std::get<double>(it->second);
}

}  // namespace problems_detail

// ---------------------------------------------------------------------------
// Class responsibility assignment

// CRA index: sum of per-class cohesion minus coupling over ordered class
// pairs. Ratios with a zero denominator contribute 0. Unassigned features
// contribute nothing.
inline double cra_index(const Model& m) {
    const Metamodel& mm = m.metamodel();
    const int class_t = mm.node_type_index("Class");
    const int method_t = mm.node_type_index("Method");
    const int attribute_t = mm.node_type_index("Attribute");
    const int enc = mm.edge_type_index("encapsulates");
    const int data_dep = mm.edge_type_index("dataDep");
    const int func_dep = mm.edge_type_index("funcDep");

    const std::vector<NodeId> classes = m.nodes_of_type(class_t);
    if (classes.empty()) return 0.0;
    std::map<NodeId, std::size_t> class_pos;
    for (std::size_t i = 0; i < classes.size(); ++i) class_pos[classes[i]] = i;

    const std::size_t n = classes.size();
    std::vector<double> methods(n, 0.0), attributes(n, 0.0);
    // feature -> positions of its encapsulating classes (at most one when conformant)
    std::map<NodeId, std::vector<std::size_t>> owner;
    for (std::size_t i = 0; i < n; ++i) {
        for (NodeId f : m.out_neighbors(enc, classes[i])) {
            owner[f].push_back(i);
            if (m.node_type(f) == method_t) methods[i] += 1.0;
            else if (m.node_type(f) == attribute_t) attributes[i] += 1.0;
        }
    }

    std::vector<std::vector<double>> mai(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> mmi(n, std::vector<double>(n, 0.0));
    for (const Model::Edge& e : m.edges()) {
        if (e.type != data_dep && e.type != func_dep) continue;
        auto si = owner.find(e.src);
        auto di = owner.find(e.dst);
        if (si == owner.end() || di == owner.end()) continue;
        auto& table = e.type == data_dep ? mai : mmi;
        for (std::size_t a : si->second)
            for (std::size_t b : di->second) table[a][b] += 1.0;
    }

    using problems_detail::safe_ratio;
    double index = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        index += safe_ratio(mai[i][i], methods[i] * attributes[i]);
        index += safe_ratio(mmi[i][i], methods[i] * (methods[i] - 1.0));
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            index -= safe_ratio(mai[i][j], methods[i] * attributes[j]);
            index -= safe_ratio(mmi[i][j], methods[i] * (methods[j] - 1.0));
        }
    }
    return index;
}

// ---------------------------------------------------------------------------
// Sprint planning

// (effort deviation, satisfaction index): population standard deviations over
// sprints of total assigned effort and of mean assigned importance. An empty
// sprint contributes 0 to both per-sprint values; no sprints at all gives
// (0, 0) and is handled by the feasibility count instead.
inline std::pair<double, double> sp_objectives(const Model& m) {
    const Metamodel& mm = m.metamodel();
    const int sprint_t = mm.node_type_index("Sprint");
    const int ipf = mm.edge_type_index("isPlannedFor");

    const std::vector<NodeId> sprints = m.nodes_of_type(sprint_t);
    if (sprints.empty()) return {0.0, 0.0};
    std::vector<double> efforts, importances;
    efforts.reserve(sprints.size());
    importances.reserve(sprints.size());
    for (NodeId s : sprints) {
        const std::vector<NodeId> items = m.out_neighbors(ipf, s);
        double total = 0.0, imp = 0.0;
        for (NodeId w : items) {
            total += static_cast<double>(problems_detail::int_attr(m, w, "Effort"));
            imp += static_cast<double>(problems_detail::int_attr(m, w, "Importance"));
        }
        efforts.push_back(total);
        importances.push_back(items.empty() ? 0.0 : imp / static_cast<double>(items.size()));
    }
    return {problems_detail::population_sd(efforts), problems_detail::population_sd(importances)};
}

// Minimum sprint count: ceil(total backlog effort / velocity), at least 1.
inline std::size_t sp_min_sprint_count(const Model& m, double velocity) {
    if (velocity <= 0.0) throw std::invalid_argument("velocity must be positive");
    const Metamodel& mm = m.metamodel();
    const int work_item_t = mm.node_type_index("WorkItem");
    double total = 0.0;
    for (NodeId w : m.nodes_of_type(work_item_t))
        total += static_cast<double>(problems_detail::int_attr(m, w, "Effort"));
    const double needed = std::ceil(total / velocity);
    return std::max<std::size_t>(1, static_cast<std::size_t>(needed));
}

// ---------------------------------------------------------------------------
// Next release problem

namespace problems_detail {

struct NrpTypes {
    int release_t, artifact_t, realization_t, requirement_t, customer_t;
    int selected, dependencies, realizes, realized_by, requires_e;

    explicit NrpTypes(const Metamodel& mm)
        : release_t(mm.node_type_index("NextRelease")),
          artifact_t(mm.node_type_index("SoftwareArtifact")),
          realization_t(mm.node_type_index("Realization")),
          requirement_t(mm.node_type_index("Requirement")),
          customer_t(mm.node_type_index("Customer")),
          selected(mm.edge_type_index("selected")),
          dependencies(mm.edge_type_index("dependencies")),
          realizes(mm.edge_type_index("realizes")),
          realized_by(mm.edge_type_index("realizedBy")),
          requires_e(mm.edge_type_index("requires")) {}
};

inline bool nrp_selected(const Model& m, const NrpTypes& t, NodeId artifact) {
    return m.in_degree(t.selected, artifact) > 0;
}

// An artifact is effective when it and its entire transitive dependency
// closure are selected. Throws on a dependency cycle.
inline bool nrp_effective(const Model& m, const NrpTypes& t, NodeId artifact,
                          std::map<NodeId, int>& state) {
    auto it = state.find(artifact);
    if (it != state.end()) {
        if (it->second == 1) throw std::runtime_error("dependency cycle among software artifacts");
        return it->second == 2;
    }
    state[artifact] = 1;
    bool ok = nrp_selected(m, t, artifact);
    // walk all dependencies even once the outcome is settled, so cycles are
    // detected regardless of the current selection
    for (NodeId d : m.out_neighbors(t.dependencies, artifact))
        if (!nrp_effective(m, t, d, state)) ok = false;
    state[artifact] = ok ? 2 : 3;
    return ok;
}

}  // namespace problems_detail

// (cost, satisfaction): cost sums the costs of selected artifacts; a
// realization is fulfilled when its artifact plus transitive dependencies are
// all selected; each customer contributes weight times the best fulfilled
// percentage per required requirement.
inline std::pair<double, double> nrp_objectives(const Model& m) {
    using namespace problems_detail;
    const NrpTypes t(m.metamodel());

    double cost = 0.0;
    std::map<NodeId, int> state;
    for (NodeId a : m.nodes_of_type(t.artifact_t)) {
        if (nrp_selected(m, t, a)) cost += real_attr(m, a, "cost");
        nrp_effective(m, t, a, state);  // also surfaces cycles on unselected parts
    }

    std::map<NodeId, double> best;  // requirement -> best fulfilled percentage
    for (NodeId r : m.nodes_of_type(t.realization_t)) {
        const std::vector<NodeId> targets = m.out_neighbors(t.realizes, r);
        if (targets.empty()) continue;
        if (!nrp_effective(m, t, targets.front(), state)) continue;
        const double pct = real_attr(m, r, "percentage");
        for (NodeId q : m.in_neighbors(t.realized_by, r)) {
            auto [it, fresh] = best.emplace(q, pct);
            if (!fresh) it->second = std::max(it->second, pct);
        }
    }

    double satisfaction = 0.0;
    for (NodeId c : m.nodes_of_type(t.customer_t)) {
        const double w = real_attr(m, c, "weight");
        for (NodeId q : m.out_neighbors(t.requires_e, c)) {
            auto it = best.find(q);
            if (it != best.end()) satisfaction += w * it->second;
        }
    }
    return {cost, satisfaction};
}

// ---------------------------------------------------------------------------
// Pack construction

namespace problems_detail {

inline MetamodelPtr cra_metamodel() {
    return make_metamodel(
        {
            {"Class", false, std::nullopt, {}},
            {"Feature", true, std::nullopt, {{"name", AttrType::String}}},
            {"Method", false, "Feature", {}},
            {"Attribute", false, "Feature", {}},
        },
        {
            {"encapsulates", "Class", "Feature", mult_unbounded(1), mult(0, 1)},
            {"dataDep", "Method", "Attribute", mult_unbounded(0), mult_unbounded(0)},
            {"funcDep", "Method", "Method", mult_unbounded(0), mult_unbounded(0)},
        });
}

inline MetamodelPtr sp_metamodel() {
    return make_metamodel(
        {
            {"Plan", false, std::nullopt, {}},
            {"Sprint", false, std::nullopt, {}},
            {"WorkItem", false, std::nullopt,
             {{"Effort", AttrType::Integer}, {"Importance", AttrType::Integer}}},
        },
        {
            {"sprints", "Plan", "Sprint", mult_unbounded(0), mult(1, 1)},
            {"backlog", "Plan", "WorkItem", mult_unbounded(0), mult(1, 1)},
            {"isPlannedFor", "Sprint", "WorkItem", mult_unbounded(1), mult(0, 1)},
        });
}

inline MetamodelPtr nrp_metamodel() {
    return make_metamodel(
        {
            {"NextRelease", false, std::nullopt, {}},
            {"Customer", false, std::nullopt, {{"weight", AttrType::Real}}},
            {"Requirement", false, std::nullopt, {}},
            {"Realization", false, std::nullopt, {{"percentage", AttrType::Real}}},
            {"SoftwareArtifact", false, std::nullopt, {{"cost", AttrType::Real}}},
        },
        {
            {"requires", "Customer", "Requirement", mult_unbounded(0), mult_unbounded(0)},
            {"realizedBy", "Requirement", "Realization", mult_unbounded(0), mult(1, 1)},
            {"realizes", "Realization", "SoftwareArtifact", mult(1, 1), mult_unbounded(0)},
            {"dependencies", "SoftwareArtifact", "SoftwareArtifact", mult_unbounded(0),
             mult_unbounded(0)},
            {"selected", "NextRelease", "SoftwareArtifact", mult_unbounded(1), mult(0, 1)},
        });
}

// Draws `count` distinct pairs (a in [0, na), b in [0, nb)), optionally
// excluding the diagonal.
inline std::vector<std::pair<std::size_t, std::size_t>> distinct_pairs(std::size_t na,
                                                                       std::size_t nb, bool no_self,
                                                                       std::size_t count, Rng& rng,
                                                                       const char* what) {
    std::size_t possible = na * nb;
    if (no_self) possible -= std::min(na, nb);
    if (count > possible)
        throw std::invalid_argument(std::string("requested more ") + what +
                                    " than available pairs");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<std::pair<std::size_t, std::size_t>> out;
    while (out.size() < count) {
        std::size_t a = rng.index(na);
        std::size_t b = rng.index(nb);
        if (no_self && a == b) continue;
        if (seen.insert({a, b}).second) out.push_back({a, b});
    }
    return out;
}

inline Model cra_instance(const std::map<std::string, double>& sizes, Rng& rng) {
    const std::size_t attributes = size_param(sizes, "attributes");
    const std::size_t methods = size_param(sizes, "methods");
    const std::size_t data_deps = size_param(sizes, "data_deps");
    const std::size_t func_deps = size_param(sizes, "func_deps");

    Model m(cra_metamodel());
    std::vector<NodeId> ms, as;
    for (std::size_t i = 0; i < methods; ++i)
        ms.push_back(m.add_node("Method", {{"name", std::string("m") + std::to_string(i + 1)}}));
    for (std::size_t i = 0; i < attributes; ++i)
        as.push_back(m.add_node("Attribute", {{"name", std::string("a") + std::to_string(i + 1)}}));
    for (auto [i, j] : distinct_pairs(methods, attributes, false, data_deps, rng,
                                      "data dependencies"))
        m.add_edge("dataDep", ms[i], as[j]);
    for (auto [i, j] : distinct_pairs(methods, methods, true, func_deps, rng,
                                      "functional dependencies"))
        m.add_edge("funcDep", ms[i], ms[j]);
    return m;
}

inline Model sp_instance(const std::map<std::string, double>& sizes, Rng& rng) {
    const std::size_t stakeholders = size_param(sizes, "stakeholders");
    const std::size_t work_items = size_param(sizes, "work_items");
    const std::size_t effort = size_param(sizes, "backlog_effort");
    if (stakeholders == 0) throw std::invalid_argument("need at least one stakeholder");
    if (work_items == 0) throw std::invalid_argument("need at least one work item");
    if (effort < work_items)
        throw std::invalid_argument("backlog effort below one point per work item");

    // split the backlog effort into work_items parts, each at least 1
    std::set<std::size_t> cuts;
    while (cuts.size() + 1 < work_items)
        cuts.insert(static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(effort) - 1)));
    std::vector<std::size_t> bounds(cuts.begin(), cuts.end());
    bounds.push_back(effort);

    std::vector<std::int64_t> stakeholder_importance;
    for (std::size_t i = 0; i < stakeholders; ++i)
        stakeholder_importance.push_back(rng.uniform_int(1, 10));

    Model m(sp_metamodel());
    const NodeId plan = m.add_node("Plan");
    std::size_t prev = 0;
    for (std::size_t b : bounds) {
        const auto item_effort = static_cast<std::int64_t>(b - prev);
        prev = b;
        const std::int64_t importance = stakeholder_importance[rng.index(stakeholders)];
        const NodeId w = m.add_node("WorkItem", {{"Effort", item_effort}, {"Importance", importance}});
        m.add_edge("backlog", plan, w);
    }
    return m;
}

inline Model nrp_instance(const std::map<std::string, double>& sizes, Rng& rng) {
    const std::size_t customers = size_param(sizes, "customers");
    const std::size_t requirements = size_param(sizes, "requirements");
    const std::size_t artifacts = size_param(sizes, "artifacts");
    if (requirements == 0 || artifacts == 0)
        throw std::invalid_argument("need at least one requirement and one artifact");

    Model m(nrp_metamodel());
    m.add_node("NextRelease");

    std::vector<NodeId> sa;
    for (std::size_t i = 0; i < artifacts; ++i)
        sa.push_back(m.add_node("SoftwareArtifact",
                                {{"cost", static_cast<double>(rng.uniform_int(1, 10))}}));
    // dependencies point from later to earlier artifacts, so the graph is a DAG
    for (std::size_t i = 1; i < artifacts; ++i) {
        const std::size_t want = rng.index(std::min<std::size_t>(i, 4) + 1);
        std::set<std::size_t> picked;
        while (picked.size() < want) picked.insert(rng.index(i));
        for (std::size_t j : picked) m.add_edge("dependencies", sa[i], sa[j]);
    }

    std::vector<NodeId> reqs;
    for (std::size_t i = 0; i < requirements; ++i) {
        const NodeId q = m.add_node("Requirement");
        reqs.push_back(q);
        const std::size_t realizations = 1 + rng.index(3);
        for (std::size_t r = 0; r < realizations; ++r) {
            const NodeId real = m.add_node(
                "Realization",
                {{"percentage", static_cast<double>(rng.uniform_int(1, 100))}});
            m.add_edge("realizedBy", q, real);
            m.add_edge("realizes", real, sa[rng.index(artifacts)]);
        }
    }

    for (std::size_t i = 0; i < customers; ++i) {
        const NodeId c = m.add_node("Customer", {{"weight", 1.0}});
        bool any = false;
        for (NodeId q : reqs)
            if (rng.uniform_real() < 0.3) {
                m.add_edge("requires", c, q);
                any = true;
            }
        if (!any) m.add_edge("requires", c, reqs[rng.index(requirements)]);
    }
    return m;
}

// -- manual baselines --------------------------------------------------------

inline Rule manual_rule(const MetamodelPtr& mm, std::string name, EditKind edit, RepairKind repair) {
    Rule r;
    r.name = std::move(name);
    r.mm = mm;
    r.taxonomy = {edit, repair, Phase::Solution};
    r.provenance = {"hand-written baseline"};
    return r;
}

inline std::vector<OperatorPtr> cra_manual_operators(const MetamodelPtr& mm) {
    const int class_t = mm->node_type_index("Class");
    const int feature_t = mm->node_type_index("Feature");
    const int enc = mm->edge_type_index("encapsulates");
    std::vector<Rule> rules;

    {
        // create a class around one unassigned feature
        Rule r = manual_rule(mm, "create_class", EditKind::CreateNode, RepairKind::Nac);
        r.lhs_nodes = {{feature_t}};
        r.create_nodes = {{class_t}};
        r.create_edges = {{enc, 1, 0}};
        r.nacs = {{{{class_t}}, {{enc, 1, 0}}}};
        rules.push_back(std::move(r));
    }
    {
        Rule r = manual_rule(mm, "assign_feature", EditKind::AddEdge, RepairKind::Nac);
        r.lhs_nodes = {{class_t}, {feature_t}};
        r.create_edges = {{enc, 0, 1}};
        r.nacs = {{{{class_t}}, {{enc, 2, 1}}}};
        rules.push_back(std::move(r));
    }
    {
        Rule r = manual_rule(mm, "move_feature", EditKind::ChangeEdge, RepairKind::None);
        r.lhs_nodes = {{class_t}, {feature_t}, {class_t}};
        r.lhs_edges = {{enc, 0, 1}};
        r.delete_edges = {0};
        r.create_edges = {{enc, 2, 1}};
        rules.push_back(std::move(r));
    }
    {
        Rule r = manual_rule(mm, "delete_empty_class", EditKind::DeleteNode, RepairKind::Nac);
        r.lhs_nodes = {{class_t}};
        r.delete_nodes = {0};
        r.nacs = {{{{feature_t}}, {{enc, 0, 1}}}};
        rules.push_back(std::move(r));
    }
    return to_operators(rules);
}

inline std::vector<OperatorPtr> sp_manual_operators(const MetamodelPtr& mm) {
    const int plan_t = mm->node_type_index("Plan");
    const int sprint_t = mm->node_type_index("Sprint");
    const int work_item_t = mm->node_type_index("WorkItem");
    const int spr = mm->edge_type_index("sprints");
    const int ipf = mm->edge_type_index("isPlannedFor");
    std::vector<Rule> rules;

    {
        // create a sprint under the plan and seed it with one unassigned item
        Rule r = manual_rule(mm, "create_sprint", EditKind::CreateNode, RepairKind::Nac);
        r.lhs_nodes = {{plan_t}, {work_item_t}};
        r.create_nodes = {{sprint_t}};
        r.create_edges = {{spr, 0, 2}, {ipf, 2, 1}};
        r.nacs = {{{{sprint_t}}, {{ipf, 2, 1}}}};
        rules.push_back(std::move(r));
    }
    {
        Rule r = manual_rule(mm, "add_work_item", EditKind::AddEdge, RepairKind::Nac);
        r.lhs_nodes = {{sprint_t}, {work_item_t}};
        r.create_edges = {{ipf, 0, 1}};
        r.nacs = {{{{sprint_t}}, {{ipf, 2, 1}}}};
        rules.push_back(std::move(r));
    }
    {
        Rule r = manual_rule(mm, "move_work_item", EditKind::ChangeEdge, RepairKind::None);
        r.lhs_nodes = {{sprint_t}, {work_item_t}, {sprint_t}};
        r.lhs_edges = {{ipf, 0, 1}};
        r.delete_edges = {0};
        r.create_edges = {{ipf, 2, 1}};
        rules.push_back(std::move(r));
    }
    {
        Rule r = manual_rule(mm, "delete_empty_sprint", EditKind::DeleteNode, RepairKind::Nac);
        r.lhs_nodes = {{sprint_t}};
        r.delete_nodes = {0};
        r.nacs = {{{{work_item_t}}, {{ipf, 0, 1}}}};
        rules.push_back(std::move(r));
    }
    return to_operators(rules);
}

// The release node mutated by the hand-written release operators.
inline std::optional<NodeId> nrp_release(const Model& m, const NrpTypes& t) {
    const std::vector<NodeId> rs = m.nodes_of_type(t.release_t);
    if (rs.empty()) return std::nullopt;
    return rs.front();
}

inline void nrp_add(Model& m, const NrpTypes& t, NodeId release, NodeId artifact) {
    if (!nrp_selected(m, t, artifact)) m.add_edge(t.selected, release, artifact);
}

inline void nrp_remove(Model& m, const NrpTypes& t, NodeId artifact) {
    for (NodeId r : m.in_neighbors(t.selected, artifact)) m.remove_edge(t.selected, r, artifact);
}

inline std::vector<OperatorPtr> nrp_manual_operators(const MetamodelPtr& mm) {
    const NrpTypes t(*mm);
    std::vector<OperatorPtr> ops;

    // toggle one artifact, but only in ways that keep dependencies satisfied:
    // add when every direct dependency is selected, remove when no selected
    // artifact still depends on it
    auto toggle_eligible = [t](const Model& m) {
        std::vector<NodeId> out;
        if (!nrp_release(m, t)) return out;
        for (NodeId a : m.nodes_of_type(t.artifact_t)) {
            if (nrp_selected(m, t, a)) {
                bool blocked = false;
                for (NodeId d : m.in_neighbors(t.dependencies, a))
                    if (nrp_selected(m, t, d)) { blocked = true; break; }
                if (!blocked) out.push_back(a);
            } else {
                bool ready = true;
                for (NodeId d : m.out_neighbors(t.dependencies, a))
                    if (!nrp_selected(m, t, d)) { ready = false; break; }
                if (ready) out.push_back(a);
            }
        }
        return out;
    };
    ops.push_back(std::make_shared<ProgramOperator>(
        "modify_software_artifact",
        [toggle_eligible](const Model& m) { return toggle_eligible(m).size(); },
        [toggle_eligible, t](const Model& m, std::size_t i) {
            Model out = m;
            const NodeId a = toggle_eligible(m).at(i);
            if (nrp_selected(out, t, a)) nrp_remove(out, t, a);
            else nrp_add(out, t, *nrp_release(out, t), a);
            return out;
        }));

    // larger steps: add an artifact with its direct dependencies, or remove
    // one together with its selected direct dependents
    ops.push_back(std::make_shared<ProgramOperator>(
        "modify_sa_with_dependencies",
        [t](const Model& m) {
            return nrp_release(m, t) ? m.nodes_of_type(t.artifact_t).size() : std::size_t{0};
        },
        [t](const Model& m, std::size_t i) {
            Model out = m;
            const NodeId a = m.nodes_of_type(t.artifact_t).at(i);
            if (nrp_selected(out, t, a)) {
                nrp_remove(out, t, a);
                for (NodeId d : out.in_neighbors(t.dependencies, a))
                    if (nrp_selected(out, t, d)) nrp_remove(out, t, d);
            } else {
                const NodeId release = *nrp_release(out, t);
                nrp_add(out, t, release, a);
                for (NodeId d : out.out_neighbors(t.dependencies, a)) nrp_add(out, t, release, d);
            }
            return out;
        }));

    // among realizations whose artifact or direct dependencies are missing,
    // complete the one with the highest percentage
    auto best_unfulfilled = [t](const Model& m) -> std::optional<NodeId> {
        if (!nrp_release(m, t)) return std::nullopt;
        std::optional<NodeId> best;
        double best_pct = 0.0;
        for (NodeId r : m.nodes_of_type(t.realization_t)) {
            const std::vector<NodeId> targets = m.out_neighbors(t.realizes, r);
            if (targets.empty()) continue;
            const NodeId a = targets.front();
            bool missing = !nrp_selected(m, t, a);
            for (NodeId d : m.out_neighbors(t.dependencies, a))
                if (!nrp_selected(m, t, d)) { missing = true; break; }
            if (!missing) continue;
            const double pct = real_attr(m, r, "percentage");
            if (!best || pct > best_pct) {
                best = r;
                best_pct = pct;
            }
        }
        return best;
    };
    ops.push_back(std::make_shared<ProgramOperator>(
        "assign_highest_realisation",
        [best_unfulfilled](const Model& m) { return best_unfulfilled(m) ? std::size_t{1} : std::size_t{0}; },
        [best_unfulfilled, t](const Model& m, std::size_t) {
            Model out = m;
            const NodeId r = best_unfulfilled(m).value();
            const NodeId a = out.out_neighbors(t.realizes, r).front();
            const NodeId release = *nrp_release(out, t);
            nrp_add(out, t, release, a);
            for (NodeId d : out.out_neighbors(t.dependencies, a)) nrp_add(out, t, release, d);
            return out;
        }));

    // repair direct dependencies: pull in missing dependencies of a selected
    // artifact, or drop selected dependents of an unselected one
    auto fix_eligible = [t](const Model& m) {
        std::vector<NodeId> out;
        if (!nrp_release(m, t)) return out;
        for (NodeId a : m.nodes_of_type(t.artifact_t)) {
            if (nrp_selected(m, t, a)) {
                for (NodeId d : m.out_neighbors(t.dependencies, a))
                    if (!nrp_selected(m, t, d)) { out.push_back(a); break; }
            } else {
                for (NodeId d : m.in_neighbors(t.dependencies, a))
                    if (nrp_selected(m, t, d)) { out.push_back(a); break; }
            }
        }
        return out;
    };
    ops.push_back(std::make_shared<ProgramOperator>(
        "fix_dependencies",
        [fix_eligible](const Model& m) { return fix_eligible(m).size(); },
        [fix_eligible, t](const Model& m, std::size_t i) {
            Model out = m;
            const NodeId a = fix_eligible(m).at(i);
            if (nrp_selected(out, t, a)) {
                const NodeId release = *nrp_release(out, t);
                for (NodeId d : out.out_neighbors(t.dependencies, a)) nrp_add(out, t, release, d);
            } else {
                for (NodeId d : out.in_neighbors(t.dependencies, a))
                    if (nrp_selected(out, t, d)) nrp_remove(out, t, d);
            }
            return out;
        }));
    return ops;
}

}  // namespace problems_detail

inline ProblemPack make_pack(const std::string& name) {
    using namespace problems_detail;
    ProblemPack pack;
    pack.id = name;
    if (name == "cra") {
        pack.metamodel = cra_metamodel();
        pack.solution_constraints.refine("encapsulates", End::Target, mult(1, 1));
        pack.scope = {{"Class"}, {"encapsulates"}};
        pack.objectives = {{"cra_index", Direction::Maximize, cra_index}};
        pack.instance_defaults = {
            {"attributes", 5}, {"methods", 4}, {"data_deps", 8}, {"func_deps", 6}};
        pack.generate_fn = cra_instance;
        pack.manual_operators = cra_manual_operators(pack.metamodel);
    } else if (name == "sp") {
        pack.metamodel = sp_metamodel();
        pack.solution_constraints.refine("sprints", End::Source, mult_unbounded(1));
        pack.solution_constraints.refine("isPlannedFor", End::Target, mult(1, 1));
        pack.scope = {{"Sprint"}, {"isPlannedFor"}};
        pack.objectives = {
            {"effort_deviation", Direction::Minimize,
             [](const Model& m) { return sp_objectives(m).first; }},
            {"satisfaction_index", Direction::Minimize,
             [](const Model& m) { return sp_objectives(m).second; }},
        };
        pack.eval_defaults = {{"velocity", 50.0}};
        pack.instance_defaults = {{"stakeholders", 5}, {"work_items", 119}, {"backlog_effort", 455}};
        pack.generate_fn = sp_instance;
        pack.extra_violations = [](const Model& m, const EvalParams& p) -> std::size_t {
            const double velocity = p.count("velocity") ? p.at("velocity") : 50.0;
            const std::size_t needed = sp_min_sprint_count(m, velocity);
            const std::size_t have =
                m.nodes_of_type(m.metamodel().node_type_index("Sprint")).size();
            return have < needed ? needed - have : 0;
        };
        pack.manual_operators = sp_manual_operators(pack.metamodel);
    } else if (name == "nrp") {
        pack.metamodel = nrp_metamodel();
        pack.scope = {{}, {"selected"}};
        pack.objectives = {
            {"cost", Direction::Minimize, [](const Model& m) { return nrp_objectives(m).first; }},
            {"satisfaction", Direction::Maximize,
             [](const Model& m) { return nrp_objectives(m).second; }},
        };
        pack.instance_defaults = {{"customers", 5}, {"requirements", 25}, {"artifacts", 63}};
        pack.generate_fn = nrp_instance;
        pack.manual_operators = nrp_manual_operators(pack.metamodel);
    } else {
        throw std::invalid_argument("unknown problem pack: " + name);
    }
    return pack;
}

inline const std::vector<std::string>& pack_names() {
    static const std::vector<std::string> names = {"cra", "sp", "nrp"};
    return names;
}

}  // namespace mosearch
