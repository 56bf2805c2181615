#include <catch2/catch_amalgamated.hpp>

#include <mosearch/rng.hpp>
#include <mosearch/rules.hpp>
#include <mosearch/typed_graph.hpp>

#include "helpers.hpp"

#include <algorithm>
#include <set>

using namespace mosearch;
using test_helpers::ab_mm;
using test_helpers::oracle_matches;
using test_helpers::sp_like_mm;

namespace {

// LHS: one Sprint, one WorkItem that is in no sprint yet; adds the edge.
Rule assign_rule(MetamodelPtr mm) {
    Rule r;
    r.name = "assign";
    r.mm = mm;
    r.lhs_nodes = {{0}, {1}};  // Sprint, WorkItem
    r.create_edges = {{0, 0, 1}};
    ConditionPattern nac;
    nac.nodes = {{0}};  // extension: another sprint already has the item
    nac.edges = {{0, 2, 1}};
    r.nacs = {nac};
    r.taxonomy = {EditKind::AddEdge, RepairKind::Nac, Phase::Problem};
    return r;
}

Rule create_sprint_rule(MetamodelPtr mm) {
    Rule r;
    r.name = "create_sprint";
    r.mm = mm;
    r.create_nodes = {{0}};
    r.taxonomy = {EditKind::CreateNode, RepairKind::None, Phase::Problem};
    return r;
}

}  // namespace

TEST_CASE("rule validation rejects malformed rules") {
    auto mm = sp_like_mm();

    Rule bad_edge;
    bad_edge.mm = mm;
    bad_edge.lhs_nodes = {{0}};
    bad_edge.lhs_edges = {{0, 0, 5}};  // dangling node ref
    CHECK_THROWS_AS(bad_edge.validate(), std::invalid_argument);

    Rule dup_edge;
    dup_edge.mm = mm;
    dup_edge.lhs_nodes = {{0}, {1}};
    dup_edge.lhs_edges = {{0, 0, 1}, {0, 0, 1}};
    CHECK_THROWS_AS(dup_edge.validate(), std::invalid_argument);

    Rule bad_type;
    bad_type.mm = mm;
    bad_type.lhs_nodes = {{0}, {0}};
    bad_type.lhs_edges = {{0, 0, 1}};  // isPlannedFor wants WorkItem target
    CHECK_THROWS_AS(bad_type.validate(), std::invalid_argument);

    Rule disconnected_nac;
    disconnected_nac.mm = mm;
    disconnected_nac.lhs_nodes = {{0}};
    ConditionPattern c;
    c.nodes = {{0}, {1}};  // second extension has no edge into the pattern
    c.edges = {{0, 0, 2}};
    disconnected_nac.nacs = {c};
    CHECK_THROWS_AS(disconnected_nac.validate(), std::invalid_argument);

    Rule bad_exclude = assign_rule(mm);
    bad_exclude.nacs[0].exclude = {5};  // no such lhs slot
    CHECK_THROWS_AS(bad_exclude.validate(), std::invalid_argument);

    Rule ok = assign_rule(mm);
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("matching enumerates injective embeddings in id order") {
    auto mm = sp_like_mm();
    Model m(mm);
    NodeId s1 = m.add_node("Sprint");
    NodeId s2 = m.add_node("Sprint");
    NodeId w1 = m.add_node("WorkItem");
    NodeId w2 = m.add_node("WorkItem");
    m.add_edge(0, s1, w1);

    Rule r = assign_rule(mm);
    r.validate();

    // w1 is already planned (NAC), so only w2 is assignable, by either sprint.
    auto matches = find_matches(r, m);
    REQUIRE(matches.size() == 2);
    CHECK(matches[0] == Match{s1, w2});
    CHECK(matches[1] == Match{s2, w2});
    CHECK(applicable(r, m));
}

TEST_CASE("empty lhs matches exactly once") {
    auto mm = sp_like_mm();
    Model empty(mm);
    Rule r = create_sprint_rule(mm);
    r.validate();
    auto matches = find_matches(r, empty);
    REQUIRE(matches.size() == 1);
    CHECK(matches[0].empty());

    Model next = apply(r, empty, matches[0]);
    CHECK(next.node_count() == 1);
    CHECK(empty.node_count() == 0);
    CHECK(next.nodes_of_type(0).size() == 1);
}

TEST_CASE("application performs the full edit") {
    auto mm = sp_like_mm();
    Model m(mm);
    NodeId s = m.add_node("Sprint");
    NodeId w = m.add_node("WorkItem", {{"Effort", std::int64_t{3}}});

    Rule r = assign_rule(mm);
    auto matches = find_matches(r, m);
    REQUIRE(matches.size() == 1);
    Model after = apply(r, m, matches[0]);
    CHECK(after.has_edge(0, s, w));
    CHECK(m.edge_count() == 0);

    // the NAC now blocks a second application
    CHECK(find_matches(r, after).empty());
    CHECK_FALSE(applicable(r, after));

    // node deletion drops the incident edge implicitly
    Rule del;
    del.mm = mm;
    del.name = "delete_sprint";
    del.lhs_nodes = {{0}};
    del.delete_nodes = {0};
    del.taxonomy = {EditKind::DeleteNode, RepairKind::None, Phase::Problem};
    del.validate();
    auto dm = find_matches(del, after);
    REQUIRE(dm.size() == 1);
    Model gone = apply(del, after, dm[0]);
    CHECK_FALSE(gone.has_node(s));
    CHECK(gone.edge_count() == 0);
    CHECK(gone.has_node(w));
}

TEST_CASE("stale matches are rejected") {
    auto mm = sp_like_mm();
    Model m(mm);
    NodeId s = m.add_node("Sprint");
    m.add_node("WorkItem");

    Rule r = assign_rule(mm);
    auto matches = find_matches(r, m);
    REQUIRE(matches.size() == 1);

    Model later = m;
    later.remove_node(s);
    CHECK_THROWS_AS(apply(r, later, matches[0]), StaleMatchError);
}

TEST_CASE("created edges must not already exist") {
    auto mm = sp_like_mm();
    Model m(mm);
    NodeId s = m.add_node("Sprint");
    NodeId w = m.add_node("WorkItem");
    m.add_edge(0, s, w);

    Rule plain;  // same as assign but with no NAC at all
    plain.mm = mm;
    plain.name = "assign_plain";
    plain.lhs_nodes = {{0}, {1}};
    plain.create_edges = {{0, 0, 1}};
    plain.taxonomy = {EditKind::AddEdge, RepairKind::None, Phase::Problem};
    plain.validate();

    CHECK(find_matches(plain, m).empty());  // the only embedding would duplicate the edge
}

TEST_CASE("pac requires context") {
    auto mm = ab_mm(mult_unbounded(1), mult(0, 1));
    // move edge from one A to another; donor must keep one other B
    Rule change;
    change.mm = mm;
    change.name = "change";
    change.lhs_nodes = {{0}, {1}, {0}};  // donor A, B, receiver A
    change.lhs_edges = {{0, 0, 1}};
    change.delete_edges = {0};
    change.create_edges = {{0, 2, 1}};
    ConditionPattern pac;
    pac.nodes = {{1}};  // donor keeps another B
    pac.edges = {{0, 0, 3}};
    pac.exclude = {1};  // the moved B does not count
    change.pacs = {pac};
    change.taxonomy = {EditKind::ChangeEdge, RepairKind::Pac, Phase::Problem};
    change.validate();

    Model m(mm);
    NodeId a1 = m.add_node("A");
    NodeId a2 = m.add_node("A");
    NodeId b1 = m.add_node("B");
    m.add_edge(0, a1, b1);

    CHECK(find_matches(change, m).empty());  // donor would be left empty

    NodeId b2 = m.add_node("B");
    m.add_edge(0, a1, b2);
    auto ms = find_matches(change, m);
    REQUIRE(ms.size() == 2);  // move either b to a2
    Model after = apply(change, m, ms[0]);
    CHECK(after.has_edge(0, a2, b1));
    CHECK_FALSE(after.has_edge(0, a1, b1));
    CHECK(after.has_edge(0, a1, b2));
}

TEST_CASE("structural signatures ignore names and detect equality") {
    auto mm = sp_like_mm();
    Rule a = assign_rule(mm);
    Rule b = assign_rule(mm);
    b.name = "something_else";
    b.taxonomy.phase = Phase::Solution;
    CHECK(structural_signature(a) == structural_signature(b));

    Rule c = assign_rule(mm);
    c.nacs.clear();
    CHECK(structural_signature(a) != structural_signature(c));
}

TEST_CASE("matcher agrees with brute-force oracle") {
    auto mm = sp_like_mm();
    Rng rng(7);

    std::vector<Rule> rules;
    rules.push_back(assign_rule(mm));
    rules.push_back(create_sprint_rule(mm));

    Rule remove_edge;
    remove_edge.mm = mm;
    remove_edge.name = "unassign";
    remove_edge.lhs_nodes = {{0}, {1}};
    remove_edge.lhs_edges = {{0, 0, 1}};
    remove_edge.delete_edges = {0};
    ConditionPattern pac;  // sprint keeps another item
    pac.nodes = {{1}};
    pac.edges = {{0, 0, 2}};
    pac.exclude = {1};
    remove_edge.pacs = {pac};
    remove_edge.taxonomy = {EditKind::RemoveEdge, RepairKind::Pac, Phase::Problem};
    rules.push_back(remove_edge);

    Rule del_guard;
    del_guard.mm = mm;
    del_guard.name = "delete_guarded";
    del_guard.lhs_nodes = {{0}, {1}};
    del_guard.lhs_edges = {{0, 0, 1}};
    del_guard.delete_nodes = {0};
    ConditionPattern nac;  // no second item
    nac.nodes = {{1}};
    nac.edges = {{0, 0, 2}};
    nac.exclude = {1};
    del_guard.nacs = {nac};
    del_guard.taxonomy = {EditKind::DeleteNode, RepairKind::Nac, Phase::Problem};
    rules.push_back(del_guard);

    Rule shared;  // another sprint plans one of this sprint's items
    shared.mm = mm;
    shared.name = "has_shared_item";
    shared.lhs_nodes = {{0}};
    ConditionPattern chain;  // extension chain keeps the matcher off the degree fast path
    chain.nodes = {{1}, {0}};
    chain.edges = {{0, 0, 1}, {0, 2, 1}};
    chain.exclude = {0};
    shared.pacs = {chain};
    shared.taxonomy = {EditKind::DeleteNode, RepairKind::Pac, Phase::Problem};
    rules.push_back(shared);

    for (auto& r : rules) r.validate();

    for (int round = 0; round < 120; ++round) {
        Model m = test_helpers::random_model(mm, rng, 4);
        for (const auto& r : rules) {
            auto fast = find_matches(r, m);
            auto slow = oracle_matches(r, m);
            REQUIRE(fast.size() == slow.size());
            CHECK(std::is_sorted(fast.begin(), fast.end()));
            CHECK(std::set<Match>(fast.begin(), fast.end()) ==
                  std::set<Match>(slow.begin(), slow.end()));
            CHECK(applicable(r, m) == !fast.empty());
        }
    }
}

TEST_CASE("matches bind distinct nodes") {
    auto mm = ab_mm(mult_unbounded(0), mult_unbounded(0));
    Model m(mm);
    NodeId a = m.add_node("A");
    NodeId b1 = m.add_node("B");
    NodeId b2 = m.add_node("B");
    m.add_edge(0, a, b1);
    m.add_edge(0, a, b2);

    Rule two_b;
    two_b.mm = mm;
    two_b.name = "pair";
    two_b.lhs_nodes = {{0}, {1}, {1}};
    two_b.lhs_edges = {{0, 0, 1}, {0, 0, 2}};
    two_b.taxonomy = {EditKind::AddEdge, RepairKind::None, Phase::Problem};
    two_b.validate();

    auto ms = find_matches(two_b, m);
    REQUIRE(ms.size() == 2);  // (b1,b2) and (b2,b1); never (b1,b1)
    for (const auto& match : ms) CHECK(match[1] != match[2]);
}

TEST_CASE("conditions may witness nodes bound in other roles") {
    auto mm = sp_like_mm();
    Model m(mm);
    NodeId s = m.add_node("Sprint");
    m.add_node("WorkItem");
    NodeId w = m.add_node("WorkItem");
    m.add_edge(0, s, w);

    // lhs picks a sprint and any item; the condition asks whether the sprint
    // plans some item, with no slot excluded
    Rule probe;
    probe.mm = mm;
    probe.name = "probe";
    probe.lhs_nodes = {{0}, {1}};
    ConditionPattern planned;
    planned.nodes = {{1}};
    planned.edges = {{0, 0, 2}};
    probe.taxonomy = {EditKind::AddEdge, RepairKind::Nac, Phase::Problem};

    probe.nacs = {planned};
    probe.validate();
    // the planned item w witnesses the NAC even when bound at slot 1
    CHECK(find_matches(probe, m).empty());

    probe.nacs[0].exclude = {1};
    // excluding slot 1 hides w from the condition exactly when w is the match
    auto ms = find_matches(probe, m);
    REQUIRE(ms.size() == 1);
    CHECK(ms[0] == Match{s, w});

    probe.nacs.clear();
    probe.pacs = {planned};
    CHECK(find_matches(probe, m).size() == 2);

    probe.pacs[0].exclude = {1};
    auto pm = find_matches(probe, m);
    REQUIRE(pm.size() == 1);
    CHECK(pm[0][1] != w);
}
