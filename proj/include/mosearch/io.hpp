#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mosearch/evolve.hpp"
#include "mosearch/problems.hpp"
#include "mosearch/rules.hpp"
#include "mosearch/typed_graph.hpp"

namespace mosearch {

using Json = nlohmann::ordered_json;

// Shortest representation that round-trips a double exactly.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline Json multiplicity_to_json(const Multiplicity& m) {
    Json j = Json::array();
    j.push_back(m.lower);
    if (m.upper)
        j.push_back(*m.upper);
    else
        j.push_back("*");
    return j;
}

inline Multiplicity multiplicity_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("multiplicity must be [lower, upper]");
    const std::uint32_t lower = j[0].get<std::uint32_t>();
    Multiplicity m = mult_unbounded(lower);
    if (!j[1].is_string()) {
        m = mult(lower, j[1].get<std::uint32_t>());
    } else if (j[1].get<std::string>() != "*") {
        throw std::invalid_argument("multiplicity upper bound must be a number or \"*\"");
    }
    m.validate();
    return m;
}

inline const char* to_string(AttrType t) {
    switch (t) {
        case AttrType::Integer: return "integer";
        case AttrType::Real: return "real";
        case AttrType::String: return "string";
    }
    return "?";
}

inline AttrType attr_type_from_string(const std::string& s) {
    if (s == "integer") return AttrType::Integer;
    if (s == "real") return AttrType::Real;
    if (s == "string") return AttrType::String;
    throw std::invalid_argument("unknown attribute type: " + s);
}

inline End end_from_string(const std::string& s) {
    if (s == "source") return End::Source;
    if (s == "target") return End::Target;
    throw std::invalid_argument("edge end must be \"source\" or \"target\": " + s);
}

inline Json metamodel_to_json(const Metamodel& mm, const ConstraintSet& cs = {}) {
    Json j;
    j["node_types"] = Json::array();
    for (const NodeType& nt : mm.node_types()) {
        Json n;
        n["name"] = nt.name;
        if (nt.is_abstract) n["abstract"] = true;
        if (nt.parent) n["parent"] = *nt.parent;
        if (!nt.attributes.empty()) {
            Json attrs;
            for (const auto& [name, type] : nt.attributes) attrs[name] = to_string(type);
            n["attributes"] = std::move(attrs);
        }
        j["node_types"].push_back(std::move(n));
    }
    j["edge_types"] = Json::array();
    for (const EdgeType& et : mm.edge_types()) {
        Json e;
        e["name"] = et.name;
        e["source"] = et.source;
        e["target"] = et.target;
        e["target_mult"] = multiplicity_to_json(et.per_source);
        e["source_mult"] = multiplicity_to_json(et.per_target);
        j["edge_types"].push_back(std::move(e));
    }
    if (!cs.empty()) {
        j["refinements"] = Json::array();
        for (const auto& [key, m] : cs.entries()) {
            Json r;
            r["edge"] = key.first;
            r["end"] = to_string(key.second);
            r["mult"] = multiplicity_to_json(m);
            j["refinements"].push_back(std::move(r));
        }
    }
    return j;
}

namespace io_detail {

inline ConstraintSet refinements_from_json(const Metamodel& mm, const Json& list) {
    ConstraintSet cs;
    for (const Json& r : list) {
        const std::string edge = r.at("edge").get<std::string>();
        mm.edge_type_index(edge);  // unknown edge type throws here
        cs.refine(edge, end_from_string(r.at("end").get<std::string>()),
                  multiplicity_from_json(r.at("mult")));
    }
    cs.validate(mm);
    return cs;
}

}  // namespace io_detail

inline std::pair<MetamodelPtr, ConstraintSet> metamodel_from_json(const Json& j) {
    std::vector<NodeType> node_types;
    for (const Json& n : j.at("node_types")) {
        NodeType nt;
        nt.name = n.at("name").get<std::string>();
        nt.is_abstract = n.value("abstract", false);
        if (n.contains("parent")) nt.parent = n.at("parent").get<std::string>();
        if (n.contains("attributes"))
            for (const auto& [name, type] : n.at("attributes").items())
                nt.attributes[name] = attr_type_from_string(type.get<std::string>());
        node_types.push_back(std::move(nt));
    }
    std::vector<EdgeType> edge_types;
    for (const Json& e : j.at("edge_types")) {
        EdgeType et;
        et.name = e.at("name").get<std::string>();
        et.source = e.at("source").get<std::string>();
        et.target = e.at("target").get<std::string>();
        et.per_source = multiplicity_from_json(e.at("target_mult"));
        et.per_target = multiplicity_from_json(e.at("source_mult"));
        edge_types.push_back(std::move(et));
    }
    MetamodelPtr mm = make_metamodel(std::move(node_types), std::move(edge_types));
    ConstraintSet cs;
    if (j.contains("refinements")) cs = io_detail::refinements_from_json(*mm, j.at("refinements"));
    return {std::move(mm), std::move(cs)};
}

// Accepts either a bare refinement list or an object holding one.
inline ConstraintSet constraints_from_json(const Metamodel& mm, const Json& j) {
    return io_detail::refinements_from_json(mm, j.is_array() ? j : j.at("refinements"));
}

inline Json model_to_json(const Model& m, const EvalParams& params = {}) {
    Json j;
    j["nodes"] = Json::array();
    for (const auto& [id, node] : m.nodes()) {
        Json n;
        n["id"] = id;
        n["type"] = m.metamodel().node_types()[static_cast<std::size_t>(node.type)].name;
        if (!node.attrs.empty()) {
            Json attrs;
            for (const auto& [name, value] : node.attrs) {
                if (const auto* i = std::get_if<std::int64_t>(&value))
                    attrs[name] = *i;
                else if (const auto* d = std::get_if<double>(&value))
                    attrs[name] = *d;
                else
                    attrs[name] = std::get<std::string>(value);
            }
            n["attrs"] = std::move(attrs);
        }
        j["nodes"].push_back(std::move(n));
    }
    j["edges"] = Json::array();
    for (const auto& e : m.edges()) {
        Json edge;
        edge["type"] = m.metamodel().edge_types()[static_cast<std::size_t>(e.type)].name;
        edge["source"] = e.src;
        edge["target"] = e.dst;
        j["edges"].push_back(std::move(edge));
    }
    if (!params.empty()) {
        Json p;
        for (const auto& [key, value] : params) p[key] = value;
        j["params"] = std::move(p);
    }
    return j;
}

inline std::pair<Model, EvalParams> model_from_json(MetamodelPtr mm, const Json& j) {
    Model m(mm);
    for (const Json& n : j.at("nodes")) {
        const std::string type_name = n.at("type").get<std::string>();
        const int type = mm->node_type_index(type_name);
        AttrMap attrs;
        if (n.contains("attrs")) {
            const auto& schema = mm->node_types()[static_cast<std::size_t>(type)];
            const NodeType* parent =
                schema.parent
                    ? &mm->node_types()[static_cast<std::size_t>(mm->node_type_index(*schema.parent))]
                    : nullptr;
            for (const auto& [name, value] : n.at("attrs").items()) {
                const AttrType* declared = nullptr;
                if (auto it = schema.attributes.find(name); it != schema.attributes.end())
                    declared = &it->second;
                else if (parent)
                    if (auto up = parent->attributes.find(name); up != parent->attributes.end())
                        declared = &up->second;
                if (!declared)
                    throw std::invalid_argument("node type " + type_name +
                                                " has no attribute " + name);
                switch (*declared) {
                    case AttrType::Integer:
                        if (!value.is_number_integer())
                            throw std::invalid_argument("attribute " + name +
                                                        " must be an integer");
                        attrs[name] = value.get<std::int64_t>();
                        break;
                    case AttrType::Real:
                        if (!value.is_number())
                            throw std::invalid_argument("attribute " + name + " must be a number");
                        attrs[name] = value.get<double>();
                        break;
                    case AttrType::String:
                        if (!value.is_string())
                            throw std::invalid_argument("attribute " + name + " must be a string");
                        attrs[name] = value.get<std::string>();
                        break;
                }
            }
        }
        m.add_node_with_id(n.at("id").get<NodeId>(), type, std::move(attrs));
    }
    for (const Json& e : j.at("edges"))
        m.add_edge(e.at("type").get<std::string>(), e.at("source").get<NodeId>(),
                   e.at("target").get<NodeId>());
    EvalParams params;
    if (j.contains("params"))
        for (const auto& [key, value] : j.at("params").items()) params[key] = value.get<double>();
    return {std::move(m), std::move(params)};
}

namespace io_detail {

inline Json pattern_to_json(const Metamodel& mm, const std::vector<PatternNode>& nodes,
                            const std::vector<PatternEdge>& edges) {
    Json j;
    j["nodes"] = Json::array();
    for (const PatternNode& n : nodes)
        j["nodes"].push_back(mm.node_types()[static_cast<std::size_t>(n.type)].name);
    j["edges"] = Json::array();
    for (const PatternEdge& e : edges) {
        Json edge;
        edge["type"] = mm.edge_types()[static_cast<std::size_t>(e.type)].name;
        edge["source"] = e.src;
        edge["target"] = e.dst;
        j["edges"].push_back(std::move(edge));
    }
    return j;
}

}  // namespace io_detail

// Dump format: node entries are type names; integer endpoints index the lhs
// nodes first, then created nodes (create edges) or the condition's own
// extension nodes (nacs/pacs). A condition's "exclude" lists the lhs slots
// its extensions must not reuse.
inline Json ruleset_to_json(const Metamodel& mm, const std::vector<Rule>& rules,
                            bool with_notes = false) {
    Json list = Json::array();
    for (const Rule& r : rules) {
        Json j;
        j["name"] = r.name;
        if (with_notes) j["notes"] = r.provenance;
        j["taxonomy"] = {{"edit", to_string(r.taxonomy.edit)},
                         {"repair", to_string(r.taxonomy.repair)},
                         {"phase", to_string(r.taxonomy.phase)}};
        j["lhs"] = io_detail::pattern_to_json(mm, r.lhs_nodes, r.lhs_edges);
        j["create"] = io_detail::pattern_to_json(mm, r.create_nodes, r.create_edges);
        Json del;
        del["nodes"] = r.delete_nodes;
        del["edges"] = r.delete_edges;
        j["delete"] = std::move(del);
        auto condition_json = [&](const ConditionPattern& c) {
            Json cj = io_detail::pattern_to_json(mm, c.nodes, c.edges);
            if (!c.exclude.empty()) cj["exclude"] = c.exclude;
            return cj;
        };
        j["nacs"] = Json::array();
        for (const ConditionPattern& c : r.nacs) j["nacs"].push_back(condition_json(c));
        j["pacs"] = Json::array();
        for (const ConditionPattern& c : r.pacs) j["pacs"].push_back(condition_json(c));
        list.push_back(std::move(j));
    }
    return list;
}

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path);
}

inline void write_json_file(const std::string& path, const Json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

// Field values are identifiers and numbers; no quoting needed.
inline std::string csv_line(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    line += '\n';
    return line;
}

inline std::string front_csv(const ProblemPack& pack, const Front& front) {
    std::vector<std::string> header;
    for (const Objective& o : pack.objectives) header.push_back(o.name);
    std::string csv = csv_line(header);
    for (const Individual& ind : front.individuals) {
        std::vector<std::string> cells;
        for (double v : natural_objectives(pack, ind.objectives))
            cells.push_back(format_double(v));
        csv += csv_line(cells);
    }
    return csv;
}

inline std::string log_csv(const ProblemPack& pack, const std::vector<GenerationLogRow>& log) {
    const bool with_hv = pack.objectives.size() >= 2;
    std::vector<std::string> header{"generation"};
    for (const Objective& o : pack.objectives) header.push_back("best_" + o.name);
    header.push_back("feasible");
    header.push_back("front_size");
    if (with_hv) header.push_back("hypervolume");
    std::string csv = csv_line(header);
    for (const GenerationLogRow& row : log) {
        std::vector<std::string> cells{std::to_string(row.generation)};
        for (double v : row.best) cells.push_back(format_double(v));
        cells.push_back(std::to_string(row.feasible_count));
        cells.push_back(std::to_string(row.front_size));
        if (with_hv) cells.push_back(format_double(row.hypervolume.value_or(0.0)));
        csv += csv_line(cells);
    }
    return csv;
}

}  // namespace mosearch
