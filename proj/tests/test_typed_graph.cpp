#include <catch2/catch_amalgamated.hpp>

#include <mosearch/rng.hpp>
#include <mosearch/typed_graph.hpp>

#include "helpers.hpp"

using namespace mosearch;
using test_helpers::ab_mm;
using test_helpers::sp_like_mm;

TEST_CASE("multiplicity bounds") {
    CHECK(mult(1, 3).contains(2));
    CHECK_FALSE(mult(1, 3).contains(0));
    CHECK_FALSE(mult(1, 3).contains(4));
    CHECK(mult_unbounded(2).contains(1000000));
    CHECK_FALSE(mult_unbounded(2).contains(1));
    CHECK(mult(2, 2).fixed());
    CHECK_FALSE(mult_unbounded(2).fixed());

    CHECK_THROWS_AS((Multiplicity{2, 1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((Multiplicity{0, 0}).validate(), std::invalid_argument);
    CHECK_NOTHROW(mult_unbounded(0).validate());
}

TEST_CASE("metamodel validation") {
    CHECK_THROWS(make_metamodel({{"A", false, std::nullopt, {}}, {"A", false, std::nullopt, {}}}, {}));
    CHECK_THROWS(make_metamodel({{"A", false, "Missing", {}}}, {}));
    // two levels of subtyping
    CHECK_THROWS(make_metamodel(
        {{"A", false, std::nullopt, {}}, {"B", false, "A", {}}, {"C", false, "B", {}}}, {}));
    CHECK_THROWS(make_metamodel({{"A", false, std::nullopt, {}}},
                                {{"e", "A", "Missing", mult(0, 1), mult(0, 1)}}));

    auto mm = sp_like_mm();
    CHECK(mm->node_type_index("Sprint") == 0);
    CHECK(mm->edge_type_index("isPlannedFor") == 0);
    CHECK_THROWS_AS(mm->node_type_index("Nope"), std::invalid_argument);
}

TEST_CASE("constraint sets only narrow") {
    auto mm = sp_like_mm();
    ConstraintSet cs;
    cs.refine("isPlannedFor", End::Target, mult(1, 1));
    CHECK_NOTHROW(cs.validate(*mm));

    ConstraintSet widen_lower;
    widen_lower.refine("isPlannedFor", End::Source, mult(0, 2));  // base lower is 1
    CHECK_THROWS_AS(widen_lower.validate(*mm), std::invalid_argument);

    ConstraintSet widen_upper;
    widen_upper.refine("isPlannedFor", End::Target, mult_unbounded(0));  // base upper is 1
    CHECK_THROWS_AS(widen_upper.validate(*mm), std::invalid_argument);
}

TEST_CASE("pattern classification") {
    auto mm = sp_like_mm();
    const EdgeType& et = mm->edge_type(0);

    PatternClass base = classify_pattern(et);
    CHECK(base.a_end == mult_unbounded(1));
    CHECK(base.b_end == mult(0, 1));
    CHECK_FALSE(base.a_fixed);
    CHECK_FALSE(base.b_fixed);
    CHECK_FALSE(base.a_open);
    CHECK(base.b_open);
    CHECK(base.a_unbounded);
    CHECK_FALSE(base.b_unbounded);

    ConstraintSet cs;
    cs.refine("isPlannedFor", End::Target, mult(1, 1));
    PatternClass refined = classify_pattern(et, &cs);
    CHECK(refined.b_fixed);
    CHECK_FALSE(refined.b_open);

    auto fixed_mm = ab_mm(mult(2, 2), mult_unbounded(0));
    PatternClass fixed = classify_pattern(fixed_mm->edge_type(0));
    CHECK(fixed.a_fixed);
    CHECK(fixed.b_open);
    CHECK(fixed.b_unbounded);
}

TEST_CASE("model structural guarantees") {
    auto mm = make_metamodel(
        {
            {"Class", false, std::nullopt, {}},
            {"Feature", true, std::nullopt, {{"name", AttrType::String}}},
            {"Method", false, "Feature", {}},
            {"Attribute", false, "Feature", {}},
        },
        {
            {"encapsulates", "Class", "Feature", mult_unbounded(1), mult(0, 1)},
        });
    Model m(mm);

    CHECK_THROWS_AS(m.add_node("Feature"), std::invalid_argument);  // abstract

    NodeId c = m.add_node("Class");
    NodeId f = m.add_node("Method", {{"name", std::string("run")}});
    CHECK_THROWS_AS(m.add_node("Method", {{"nope", std::int64_t{1}}}), std::invalid_argument);
    CHECK_THROWS_AS(m.add_node("Method", {{"name", std::int64_t{1}}}), std::invalid_argument);

    m.add_edge("encapsulates", c, f);  // Method conforms to Feature
    CHECK_THROWS_AS(m.add_edge("encapsulates", c, f), std::invalid_argument);  // parallel
    CHECK_THROWS_AS(m.add_edge("encapsulates", f, c), std::invalid_argument);  // wrong types
    CHECK(m.has_edge(0, c, f));

    NodeId a = m.add_node("Attribute");
    m.add_edge("encapsulates", c, a);
    CHECK(m.out_degree(0, c) == 2);
    CHECK(count_incident(m, c, 0, End::Source) == 2);
    CHECK(count_incident(m, f, 0, End::Target) == 1);

    // deleting a node drops its incident edges
    Model copy = m;
    m.remove_node(c);
    CHECK(m.edge_count() == 0);
    CHECK_FALSE(m.has_node(c));
    CHECK(copy.edge_count() == 2);  // value semantics: the copy kept its shape

    CHECK_THROWS_AS(m.remove_node(c), std::invalid_argument);
    CHECK_THROWS_AS(m.remove_edge(0, c, f), std::invalid_argument);
}

TEST_CASE("conformance reporting") {
    auto mm = sp_like_mm();

    SECTION("empty model has no violations") {
        Model m(mm);
        CHECK(check_conformance(m).empty());
    }

    SECTION("sprint without items breaks its lower bound") {
        Model m(mm);
        NodeId s = m.add_node("Sprint");
        auto v = check_conformance(m);
        REQUIRE(v.size() == 1);
        CHECK(v[0].node == s);
        CHECK(v[0].end == End::Source);
        CHECK(v[0].kind == ViolationKind::Lower);
        CHECK(v[0].actual == 0);
    }

    SECTION("item claimed by two sprints breaks the upper bound") {
        Model m(mm);
        NodeId s1 = m.add_node("Sprint");
        NodeId s2 = m.add_node("Sprint");
        NodeId w = m.add_node("WorkItem");
        m.add_edge(0, s1, w);
        m.add_edge(0, s2, w);
        auto v = check_conformance(m);
        REQUIRE(v.size() == 1);
        CHECK(v[0].node == w);
        CHECK(v[0].end == End::Target);
        CHECK(v[0].kind == ViolationKind::Upper);
        CHECK(v[0].actual == 2);
    }

    SECTION("refinement surfaces new violations") {
        Model m(mm);
        NodeId s = m.add_node("Sprint");
        NodeId w1 = m.add_node("WorkItem");
        NodeId w2 = m.add_node("WorkItem");
        m.add_edge(0, s, w1);
        CHECK(check_conformance(m).empty());

        ConstraintSet cs;
        cs.refine("isPlannedFor", End::Target, mult(1, 1));
        auto v = check_conformance(m, &cs);
        REQUIRE(v.size() == 1);
        CHECK(v[0].node == w2);
        CHECK(v[0].kind == ViolationKind::Lower);
    }
}

TEST_CASE("violations never shrink under refinement") {
    auto mm = sp_like_mm();
    ConstraintSet cs;
    cs.refine("isPlannedFor", End::Target, mult(1, 1));
    Rng rng(20240817);
    for (int i = 0; i < 200; ++i) {
        Model m = test_helpers::random_model(mm, rng, 5);
        auto base = check_conformance(m);
        auto refined = check_conformance(m, &cs);
        for (const auto& v : base) {
            bool found = false;
            for (const auto& r : refined)
                if (r.node == v.node && r.edge_type == v.edge_type && r.end == v.end && r.kind == v.kind)
                    found = true;
            CHECK(found);
        }
    }
}

TEST_CASE("classification agrees with direct bound comparison") {
    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
        const auto lo = static_cast<std::uint32_t>(rng.uniform_int(0, 3));
        Multiplicity a = rng.uniform_real() < 0.3
                             ? mult_unbounded(lo)
                             : mult(lo, static_cast<std::uint32_t>(rng.uniform_int(std::max(1u, lo), lo + 3)));
        const auto lo2 = static_cast<std::uint32_t>(rng.uniform_int(0, 3));
        Multiplicity b = rng.uniform_real() < 0.3
                             ? mult_unbounded(lo2)
                             : mult(lo2, static_cast<std::uint32_t>(rng.uniform_int(std::max(1u, lo2), lo2 + 3)));
        auto mm = ab_mm(a, b);
        PatternClass pc = classify_pattern(mm->edge_type(0));
        CHECK(pc.a_fixed == (a.upper && *a.upper == a.lower));
        CHECK(pc.b_fixed == (b.upper && *b.upper == b.lower));
        CHECK(pc.a_open == (a.lower == 0));
        CHECK(pc.b_open == (b.lower == 0));
        CHECK(pc.a_unbounded == !a.upper.has_value());
        CHECK(pc.b_unbounded == !b.upper.has_value());
    }
}
