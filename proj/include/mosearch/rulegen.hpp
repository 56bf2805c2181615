#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rules.hpp"
#include "typed_graph.hpp"

namespace mosearch {

// Which node and edge types the search may mutate. Repairs still consider
// every edge type incident to a mutable node, scoped or not.
struct GenerationScope {
    std::vector<std::string> node_types;
    std::vector<std::string> edge_types;
};

struct GenerationOptions {
    std::size_t combination_cap = 64;  // max combined repair rules per node type
};

struct RuleSet {
    std::vector<Rule> rules;
};

namespace rulegen_detail {

enum class FragVariant {
    Free,            // this edge type imposes nothing
    AttachPlain,     // connect the new node to n partners
    AttachNac,       // as above, partners guarded against saturation
    LbSingle,        // steal the n partners from one donor
    LbMulti,         // steal one partner each from n donors
    Guard,           // deletion allowed only with exactly n partners, each survivor keeps k
    ReassignSingle,  // hand all n partners to one receiver
    ReassignMulti,   // hand one partner each to n receivers
};

struct FragmentAlt {
    FragVariant variant = FragVariant::Free;
    int edge_type = -1;
    End focal_end = End::Source;  // which end of the edge the focal node occupies
    Multiplicity focal_bounds;    // (n, m): edges the focal node must carry
    Multiplicity partner_bounds;  // (k, l): edges each partner must carry
    int focal_decl = -1;          // declared node type at the focal end
    int partner_decl = -1;        // declared node type at the partner end

    RepairKind kind() const {
        switch (variant) {
            case FragVariant::Free:
            case FragVariant::AttachPlain: return RepairKind::None;
            case FragVariant::AttachNac: return RepairKind::Nac;
            case FragVariant::LbSingle:
            case FragVariant::ReassignSingle: return RepairKind::LbSingle;
            case FragVariant::LbMulti:
            case FragVariant::ReassignMulti: return RepairKind::LbMulti;
            case FragVariant::Guard:
                return focal_bounds.lower == 0 ? RepairKind::Nac : RepairKind::Pac;
        }
        return RepairKind::None;
    }

    // suffix contribution; empty for attach/free
    const char* tag() const {
        switch (variant) {
            case FragVariant::LbSingle:
            case FragVariant::ReassignSingle: return "lb_single";
            case FragVariant::LbMulti:
            case FragVariant::ReassignMulti: return "lb_multi";
            case FragVariant::Guard: return focal_bounds.lower == 0 ? "" : "pac";
            default: return "";
        }
    }
};

using FragmentAlts = std::vector<FragmentAlt>;

// One (edge type, end) the focal node type occupies, with effective bounds.
struct Incidence {
    int edge_type;
    End focal_end;
    Multiplicity focal_bounds;
    Multiplicity partner_bounds;
    int focal_decl;
    int partner_decl;
};

inline std::vector<Incidence> incidences(const Metamodel& mm, int node_type,
                                         const ConstraintSet* cs) {
    std::vector<Incidence> out;
    for (std::size_t e = 0; e < mm.edge_types().size(); ++e) {
        const EdgeType& et = mm.edge_type(static_cast<int>(e));
        const int src = mm.node_type_index(et.source);
        const int dst = mm.node_type_index(et.target);
        if (mm.conforms(node_type, src))
            out.push_back({static_cast<int>(e), End::Source,
                           effective_bounds(et, End::Source, cs),
                           effective_bounds(et, End::Target, cs), src, dst});
        if (mm.conforms(node_type, dst))
            out.push_back({static_cast<int>(e), End::Target,
                           effective_bounds(et, End::Target, cs),
                           effective_bounds(et, End::Source, cs), dst, src});
    }
    return out;
}

// Pattern index placeholders resolved once the final lhs size is known.
constexpr int kFocalCreated = -1;     // the node being created
constexpr int kExtBase = 1 << 20;     // extension j inside a condition

inline PatternEdge oriented(const FragmentAlt& f, int focal_slot, int partner_slot) {
    return f.focal_end == End::Source ? PatternEdge{f.edge_type, focal_slot, partner_slot}
                                      : PatternEdge{f.edge_type, partner_slot, focal_slot};
}

inline std::string bound_text(const Multiplicity& b) {
    std::string s = std::to_string(b.lower) + "..";
    return s + (b.upper ? std::to_string(*b.upper) : "*");
}

// forbid `count` further partners on a focal-side node (receiver overflow);
// `exclude` lists lhs slots whose edges at `around` do not survive the edit
inline void saturation_nac_on(Rule& r, const FragmentAlt& f, int around, std::uint32_t count,
                              std::vector<int> exclude = {}) {
    ConditionPattern c;
    for (std::uint32_t j = 0; j < count; ++j) {
        c.nodes.push_back({f.partner_decl});
        c.edges.push_back(oriented(f, around, kExtBase + static_cast<int>(j)));
    }
    c.exclude = std::move(exclude);
    r.nacs.push_back(std::move(c));
}

// Appends one fragment's pattern contribution. `focal` is the focal node's
// slot: 0 for delete rules, kFocalCreated for create rules.
inline void append_fragment(Rule& r, const Metamodel& mm, const FragmentAlt& f, int focal) {
    const std::string ename = mm.edge_type(f.edge_type).name;
    const std::string pname = mm.node_type(f.partner_decl).name;
    const std::string fname = mm.node_type(f.focal_decl).name;
    const std::uint32_t n = f.focal_bounds.lower;
    const std::uint32_t k = f.partner_bounds.lower;

    auto add_lhs = [&](int type) {
        r.lhs_nodes.push_back({type});
        return static_cast<int>(r.lhs_nodes.size()) - 1;
    };
    auto saturation_nac = [&](int around_partner, std::uint32_t count) {
        // forbid `count` further focal-end nodes on this partner
        ConditionPattern c;
        for (std::uint32_t j = 0; j < count; ++j) {
            c.nodes.push_back({f.focal_decl});
            c.edges.push_back(oriented(f, kExtBase + static_cast<int>(j), around_partner));
        }
        r.nacs.push_back(std::move(c));
    };
    auto keep_pac = [&](int around_focal_side, std::uint32_t count, std::vector<int> stolen) {
        // require `count` partners on a focal-end node beyond the stolen ones
        ConditionPattern c;
        for (std::uint32_t j = 0; j < count; ++j) {
            c.nodes.push_back({f.partner_decl});
            c.edges.push_back(oriented(f, around_focal_side, kExtBase + static_cast<int>(j)));
        }
        c.exclude = std::move(stolen);
        r.pacs.push_back(std::move(c));
    };
    auto partner_keep_pac = [&](int partner, std::uint32_t count) {
        // require `count` focal-end nodes on this partner beyond the deleted focal
        ConditionPattern c;
        for (std::uint32_t j = 0; j < count; ++j) {
            c.nodes.push_back({f.focal_decl});
            c.edges.push_back(oriented(f, kExtBase + static_cast<int>(j), partner));
        }
        c.exclude = {focal};
        r.pacs.push_back(std::move(c));
    };
    auto degree_cap_nac = [&](std::vector<int> pictured) {
        // forbid any partner beyond the pictured ones
        ConditionPattern c;
        c.nodes.push_back({f.partner_decl});
        c.edges.push_back(oriented(f, focal, kExtBase));
        c.exclude = std::move(pictured);
        r.nacs.push_back(std::move(c));
    };

    switch (f.variant) {
        case FragVariant::Free:
            return;
        case FragVariant::AttachPlain:
        case FragVariant::AttachNac: {
            for (std::uint32_t i = 0; i < n; ++i) {
                const int b = add_lhs(f.partner_decl);
                r.create_edges.push_back(oriented(f, focal, b));
                if (f.variant == FragVariant::AttachNac)
                    saturation_nac(b, *f.partner_bounds.upper);
            }
            r.provenance.push_back(ename + ": new " + fname + " links to " + std::to_string(n) +
                                   " " + pname + " (needs " + bound_text(f.focal_bounds) + ")" +
                                   (f.variant == FragVariant::AttachNac
                                        ? "; each chosen " + pname + " must be below its cap of " +
                                              std::to_string(*f.partner_bounds.upper)
                                        : ""));
            return;
        }
        case FragVariant::LbSingle: {
            const int donor = add_lhs(f.focal_decl);
            std::vector<int> stolen;
            for (std::uint32_t i = 0; i < n; ++i) {
                const int b = add_lhs(f.partner_decl);
                r.lhs_edges.push_back(oriented(f, donor, b));
                r.delete_edges.push_back(static_cast<int>(r.lhs_edges.size()) - 1);
                r.create_edges.push_back(oriented(f, focal, b));
                stolen.push_back(b);
            }
            keep_pac(donor, n, std::move(stolen));
            r.provenance.push_back(ename + ": new " + fname + " takes " + std::to_string(n) +
                                   " " + pname + " from one donor " + fname +
                                   ", which must keep " + std::to_string(n) + " more");
            return;
        }
        case FragVariant::LbMulti: {
            for (std::uint32_t i = 0; i < n; ++i) {
                const int donor = add_lhs(f.focal_decl);
                const int b = add_lhs(f.partner_decl);
                r.lhs_edges.push_back(oriented(f, donor, b));
                r.delete_edges.push_back(static_cast<int>(r.lhs_edges.size()) - 1);
                r.create_edges.push_back(oriented(f, focal, b));
                keep_pac(donor, n, {b});
            }
            r.provenance.push_back(ename + ": new " + fname + " takes one " + pname + " each from " +
                                   std::to_string(n) + " donor " + fname +
                                   "s, each keeping " + std::to_string(n) + " more");
            return;
        }
        case FragVariant::Guard: {
            std::vector<int> partners;
            for (std::uint32_t i = 0; i < n; ++i) {
                const int b = add_lhs(f.partner_decl);
                r.lhs_edges.push_back(oriented(f, focal, b));
                partners.push_back(b);
            }
            degree_cap_nac(partners);
            for (int b : partners) partner_keep_pac(b, k);
            r.provenance.push_back(ename + ": deletion pictures exactly " + std::to_string(n) +
                                   " " + pname + (n == 1 ? "" : "s") + "; each must keep " +
                                   std::to_string(k) + " " + fname + (k == 1 ? "" : "s"));
            return;
        }
        case FragVariant::ReassignSingle: {
            std::vector<int> partners;
            for (std::uint32_t i = 0; i < n; ++i) partners.push_back(add_lhs(f.partner_decl));
            const int recv = add_lhs(f.focal_decl);
            for (int b : partners) {
                r.lhs_edges.push_back(oriented(f, focal, b));
                r.create_edges.push_back(oriented(f, recv, b));
            }
            degree_cap_nac(partners);
            if (f.focal_bounds.upper)
                saturation_nac_on(r, f, recv, *f.focal_bounds.upper - n + 1, {focal});
            r.provenance.push_back(ename + ": the " + std::to_string(n) + " " + pname +
                                   (n == 1 ? " moves" : "s move") + " to one other " + fname);
            return;
        }
        case FragVariant::ReassignMulti: {
            std::vector<int> partners;
            for (std::uint32_t i = 0; i < n; ++i) partners.push_back(add_lhs(f.partner_decl));
            for (int b : partners) {
                const int recv = add_lhs(f.focal_decl);
                r.lhs_edges.push_back(oriented(f, focal, b));
                r.create_edges.push_back(oriented(f, recv, b));
                if (f.focal_bounds.upper) saturation_nac_on(r, f, recv, *f.focal_bounds.upper, {focal});
            }
            degree_cap_nac(partners);
            r.provenance.push_back(ename + ": each of the " + std::to_string(n) + " " + pname +
                                   "s moves to its own other " + fname);
            return;
        }
    }
}

// Replace placeholder indices now that the lhs is complete.
inline void finalize_indices(Rule& r) {
    const int L = r.lhs_size();
    auto patch = [&](int idx) {
        if (idx == kFocalCreated) return L;  // single created node sits at L
        return idx;
    };
    for (PatternEdge& e : r.lhs_edges) {
        e.src = patch(e.src);
        e.dst = patch(e.dst);
    }
    for (PatternEdge& e : r.create_edges) {
        e.src = patch(e.src);
        e.dst = patch(e.dst);
    }
    for (auto* conds : {&r.nacs, &r.pacs})
        for (ConditionPattern& c : *conds)
            for (PatternEdge& e : c.edges) {
                if (e.src >= kExtBase) e.src = L + (e.src - kExtBase);
                if (e.dst >= kExtBase) e.dst = L + (e.dst - kExtBase);
            }
}

inline RepairKind combined_kind(const std::vector<FragmentAlt>& picked) {
    RepairKind kind = RepairKind::None;
    int contributing = 0;
    for (const FragmentAlt& f : picked) {
        const RepairKind fk = f.kind();
        if (fk == RepairKind::None) continue;
        ++contributing;
        kind = fk;
    }
    if (contributing == 0) return RepairKind::None;
    if (contributing > 1) return RepairKind::Iterative;
    return kind;
}

inline std::string priority_suffix(const std::vector<FragmentAlt>& picked) {
    int best = -1;  // 0 pac, 1 lb_single, 2 lb_multi
    for (const FragmentAlt& f : picked) {
        const std::string t = f.tag();
        int rank = t == "lb_multi" ? 2 : t == "lb_single" ? 1 : t == "pac" ? 0 : -1;
        best = std::max(best, rank);
    }
    switch (best) {
        case 2: return "_lb_multi";
        case 1: return "_lb_single";
        case 0: return "_pac";
        default: return "";
    }
}

inline std::string qualified_suffix(const Metamodel& mm, const std::vector<FragmentAlt>& picked) {
    std::string s;
    for (const FragmentAlt& f : picked) {
        const std::string t = f.tag();
        if (!t.empty()) s += "_" + t + "_" + mm.edge_type(f.edge_type).name;
    }
    return s;
}

}  // namespace rulegen_detail

// Combines per-edge repair alternatives into full rules, one per element of
// the cartesian product. Exposed separately so the combination policy (and
// its cap) can be tested on synthetic fragment sets.
struct NodeRuleContext {
    MetamodelPtr mm;
    int node_type = -1;
    EditKind edit = EditKind::CreateNode;
    Phase phase = Phase::Problem;
    std::size_t combination_cap = 64;
};

inline std::vector<Rule> generate_iterative_repairs(
    const NodeRuleContext& ctx, const std::vector<rulegen_detail::FragmentAlts>& per_edge) {
    using namespace rulegen_detail;
    const Metamodel& mm = *ctx.mm;
    const std::string tname = mm.node_type(ctx.node_type).name;
    const std::string base =
        (ctx.edit == EditKind::CreateNode ? "create_" : "delete_") + tname;

    std::size_t combos = 1;
    for (const FragmentAlts& alts : per_edge) {
        combos *= alts.size();
        if (combos > ctx.combination_cap)
            throw std::runtime_error(base + ": repair combinations for node type " + tname +
                                     " exceed cap " + std::to_string(ctx.combination_cap));
    }

    std::vector<Rule> out;
    std::vector<std::size_t> pick(per_edge.size(), 0);
    std::vector<std::string> names;
    bool collision = false;
    for (std::size_t idx = 0; idx < combos; ++idx) {
        std::vector<FragmentAlt> picked;
        {
            std::size_t rest = idx;
            for (std::size_t e = 0; e < per_edge.size(); ++e) {
                pick[e] = rest % per_edge[e].size();
                rest /= per_edge[e].size();
                picked.push_back(per_edge[e][pick[e]]);
            }
        }
        Rule r;
        r.mm = ctx.mm;
        const int focal = ctx.edit == EditKind::CreateNode ? kFocalCreated : 0;
        if (ctx.edit == EditKind::CreateNode) {
            r.create_nodes = {{ctx.node_type}};
        } else {
            r.lhs_nodes = {{ctx.node_type}};
            r.delete_nodes = {0};
        }
        for (const FragmentAlt& f : picked) append_fragment(r, mm, f, focal);
        finalize_indices(r);
        r.taxonomy = {ctx.edit, combined_kind(picked), ctx.phase};
        r.name = base + priority_suffix(picked);
        names.push_back(base + qualified_suffix(mm, picked));
        for (const Rule& prev : out)
            if (prev.name == r.name) collision = true;
        out.push_back(std::move(r));
    }
    if (collision)
        for (std::size_t i = 0; i < out.size(); ++i) out[i].name = names[i];
    for (Rule& r : out) r.validate();
    return out;
}

inline std::vector<Rule> generate_create_node_rules(const MetamodelPtr& mm,
                                                    const ConstraintSet* cs,
                                                    const std::string& node_type, Phase phase,
                                                    const GenerationOptions& opt = {}) {
    using namespace rulegen_detail;
    const int t = mm->node_type_index(node_type);
    if (mm->node_type(t).is_abstract)
        throw std::invalid_argument("cannot generate rules for abstract type " + node_type);

    std::vector<FragmentAlts> per_edge;
    for (const Incidence& inc : incidences(*mm, t, cs)) {
        const std::uint32_t n = inc.focal_bounds.lower;
        const bool focal_fixed = inc.focal_bounds.fixed();
        const bool partner_fixed = inc.partner_bounds.fixed();
        FragmentAlt proto{FragVariant::Free, inc.edge_type,    inc.focal_end, inc.focal_bounds,
                          inc.partner_bounds, inc.focal_decl, inc.partner_decl};
        if (n == 0) {
            per_edge.push_back({proto});
            continue;
        }
        if (focal_fixed && partner_fixed) return {};  // no consistent single-step creation exists
        FragmentAlts alts;
        if (!inc.partner_bounds.upper) {
            proto.variant = FragVariant::AttachPlain;
            alts.push_back(proto);
        } else if (!partner_fixed) {
            proto.variant = FragVariant::AttachNac;
            alts.push_back(proto);
        }
        const bool donors_possible = inc.partner_bounds.upper && !focal_fixed;
        if (donors_possible) {
            proto.variant = FragVariant::LbSingle;
            alts.push_back(proto);
            if (n > 1) {
                proto.variant = FragVariant::LbMulti;
                alts.push_back(proto);
            }
        }
        per_edge.push_back(std::move(alts));
    }
    NodeRuleContext ctx{mm, t, EditKind::CreateNode, phase, opt.combination_cap};
    return generate_iterative_repairs(ctx, per_edge);
}

inline std::vector<Rule> generate_delete_node_rules(const MetamodelPtr& mm,
                                                    const ConstraintSet* cs,
                                                    const std::string& node_type, Phase phase,
                                                    const GenerationOptions& opt = {}) {
    using namespace rulegen_detail;
    const int t = mm->node_type_index(node_type);
    if (mm->node_type(t).is_abstract)
        throw std::invalid_argument("cannot generate rules for abstract type " + node_type);

    std::vector<FragmentAlts> per_edge;
    for (const Incidence& inc : incidences(*mm, t, cs)) {
        const std::uint32_t n = inc.focal_bounds.lower;
        const std::uint32_t k = inc.partner_bounds.lower;
        const bool focal_fixed = inc.focal_bounds.fixed();
        const bool partner_fixed = inc.partner_bounds.fixed();
        FragmentAlt proto{FragVariant::Free, inc.edge_type,    inc.focal_end, inc.focal_bounds,
                          inc.partner_bounds, inc.focal_decl, inc.partner_decl};
        if (k == 0) {
            per_edge.push_back({proto});
            continue;
        }
        if (focal_fixed && partner_fixed) return {};  // partner loss cannot be repaired atomically
        FragmentAlts alts;
        if (!partner_fixed) {
            proto.variant = FragVariant::Guard;
            alts.push_back(proto);
        } else if (n == 0) {
            proto.variant = FragVariant::Guard;  // nothing to reassign: bare delete guarded by NAC
            alts.push_back(proto);
        } else {
            proto.variant = FragVariant::ReassignSingle;
            alts.push_back(proto);
            if (k > 1 && n > 1) {
                proto.variant = FragVariant::ReassignMulti;
                alts.push_back(proto);
            }
        }
        per_edge.push_back(std::move(alts));
    }
    NodeRuleContext ctx{mm, t, EditKind::DeleteNode, phase, opt.combination_cap};
    return generate_iterative_repairs(ctx, per_edge);
}

inline std::vector<Rule> generate_edge_rules(const MetamodelPtr& mm, const ConstraintSet* cs,
                                             const std::string& edge_type, Phase phase,
                                             const GenerationOptions& = {}) {
    using namespace rulegen_detail;
    const int e = mm->edge_type_index(edge_type);
    const EdgeType& et = mm->edge_type(e);
    const int S = mm->node_type_index(et.source);
    const int G = mm->node_type_index(et.target);
    const Multiplicity src_b = effective_bounds(et, End::Source, cs);
    const Multiplicity dst_b = effective_bounds(et, End::Target, cs);
    const std::uint32_t n = src_b.lower;
    const std::uint32_t k = dst_b.lower;

    FragmentAlt along{FragVariant::Free, e, End::Source, src_b, dst_b, S, G};

    std::vector<Rule> out;
    auto finish = [&](Rule& r, RepairKind kind, const std::string& name) {
        r.mm = mm;
        r.name = name;
        finalize_indices(r);
        r.taxonomy.repair = kind;
        r.taxonomy.phase = phase;
        r.validate();
        out.push_back(std::move(r));
    };

    if (src_b.fixed()) {
        Rule r;
        r.lhs_nodes = {{S}, {G}, {S}, {G}};
        r.lhs_edges = {{e, 0, 1}, {e, 2, 3}};
        r.delete_edges = {0, 1};
        r.create_edges = {{e, 0, 3}, {e, 2, 1}};
        r.taxonomy.edit = EditKind::SwapEdge;
        r.provenance.push_back(et.name + ": each " + et.source + " keeps exactly " +
                               std::to_string(n) + "; two pairs exchange partners");
        finish(r, RepairKind::None, "swap_" + et.name);
        return out;
    }
    if (dst_b.fixed()) {
        Rule r;
        r.lhs_nodes = {{S}, {G}, {S}};
        r.lhs_edges = {{e, 0, 1}};
        r.delete_edges = {0};
        r.create_edges = {{e, 2, 1}};
        r.taxonomy.edit = EditKind::ChangeEdge;
        RepairKind kind = RepairKind::None;
        if (n > 0) {
            ConditionPattern pac;
            for (std::uint32_t j = 0; j < n; ++j) {
                pac.nodes.push_back({G});
                pac.edges.push_back({e, 0, kExtBase + static_cast<int>(j)});
            }
            pac.exclude = {1};  // the moved target no longer counts for the donor
            r.pacs.push_back(std::move(pac));
            kind = RepairKind::Pac;
        }
        if (src_b.upper) {
            saturation_nac_on(r, along, 2, *src_b.upper);
            if (kind == RepairKind::None) kind = RepairKind::Nac;
        }
        r.provenance.push_back(et.name + ": each " + et.target + " keeps exactly " +
                               std::to_string(k) + ", so the edge moves to another " + et.source +
                               (n > 0 ? "; the donor must keep " + std::to_string(n) : "") +
                               (src_b.upper ? "; the receiver must be below " +
                                                  std::to_string(*src_b.upper)
                                            : ""));
        finish(r, kind, "change_" + et.name);
        return out;
    }

    {
        Rule r;
        r.lhs_nodes = {{S}, {G}};
        r.create_edges = {{e, 0, 1}};
        r.taxonomy.edit = EditKind::AddEdge;
        RepairKind kind = RepairKind::None;
        if (src_b.upper) {
            saturation_nac_on(r, along, 0, *src_b.upper);
            kind = RepairKind::Nac;
        }
        if (dst_b.upper) {
            ConditionPattern nac;
            for (std::uint32_t j = 0; j < *dst_b.upper; ++j) {
                nac.nodes.push_back({S});
                nac.edges.push_back({e, kExtBase + static_cast<int>(j), 1});
            }
            r.nacs.push_back(std::move(nac));
            kind = RepairKind::Nac;
        }
        r.provenance.push_back(et.name + ": connect a " + et.source + " to a " + et.target +
                               (kind == RepairKind::Nac ? "; capped ends must have room" : ""));
        finish(r, kind, "add_" + et.name);
    }
    {
        Rule r;
        r.lhs_nodes = {{S}, {G}};
        r.lhs_edges = {{e, 0, 1}};
        r.delete_edges = {0};
        r.taxonomy.edit = EditKind::RemoveEdge;
        RepairKind kind = RepairKind::None;
        if (n > 0) {
            ConditionPattern pac;
            for (std::uint32_t j = 0; j < n; ++j) {
                pac.nodes.push_back({G});
                pac.edges.push_back({e, 0, kExtBase + static_cast<int>(j)});
            }
            pac.exclude = {1};  // the removed edge's target does not count
            r.pacs.push_back(std::move(pac));
            kind = RepairKind::Pac;
        }
        if (k > 0) {
            ConditionPattern pac;
            for (std::uint32_t j = 0; j < k; ++j) {
                pac.nodes.push_back({S});
                pac.edges.push_back({e, kExtBase + static_cast<int>(j), 1});
            }
            pac.exclude = {0};  // the removed edge's source does not count
            r.pacs.push_back(std::move(pac));
            kind = RepairKind::Pac;
        }
        r.provenance.push_back(et.name + ": disconnect a " + et.source + " from a " + et.target +
                               (kind == RepairKind::Pac ? "; ends with lower bounds must keep them"
                                                        : ""));
        finish(r, kind, "remove_" + et.name);
    }
    return out;
}

inline RuleSet generate_phase_rules(const MetamodelPtr& mm, const ConstraintSet* cs,
                                    const GenerationScope& scope, Phase phase,
                                    const GenerationOptions& opt = {}) {
    const std::set<std::string> want_nodes(scope.node_types.begin(), scope.node_types.end());
    const std::set<std::string> want_edges(scope.edge_types.begin(), scope.edge_types.end());
    for (const std::string& n : want_nodes) mm->node_type_index(n);
    for (const std::string& e : want_edges) mm->edge_type_index(e);

    RuleSet rs;
    for (const NodeType& nt : mm->node_types()) {
        if (!want_nodes.count(nt.name)) continue;
        for (Rule& r : generate_create_node_rules(mm, cs, nt.name, phase, opt))
            rs.rules.push_back(std::move(r));
        for (Rule& r : generate_delete_node_rules(mm, cs, nt.name, phase, opt))
            rs.rules.push_back(std::move(r));
    }
    for (const EdgeType& et : mm->edge_types()) {
        if (!want_edges.count(et.name)) continue;
        for (Rule& r : generate_edge_rules(mm, cs, et.name, phase, opt))
            rs.rules.push_back(std::move(r));
    }
    return rs;
}

// Two-phase generation: once against the base metamodel bounds, once against
// the refined bounds, returning the structurally deduplicated union.
inline RuleSet generate_acpsos(const MetamodelPtr& mm, const ConstraintSet& solution_constraints,
                               const GenerationScope& scope, const GenerationOptions& opt = {}) {
    solution_constraints.validate(*mm);
    RuleSet problem = generate_phase_rules(mm, nullptr, scope, Phase::Problem, opt);
    RuleSet solution =
        generate_phase_rules(mm, &solution_constraints, scope, Phase::Solution, opt);

    RuleSet out;
    std::set<std::string> seen;
    std::map<std::string, int> name_uses;
    for (RuleSet* part : {&problem, &solution}) {
        for (Rule& r : part->rules) {
            if (!seen.insert(structural_signature(r)).second) continue;
            if (name_uses.count(r.name)) r.name += "_p2";  // later phase, distinct structure
            name_uses[r.name]++;
            out.rules.push_back(std::move(r));
        }
    }
    return out;
}

}  // namespace mosearch
