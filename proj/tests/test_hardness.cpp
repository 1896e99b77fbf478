#include <gtest/gtest.h>

#include <algorithm>

#include "corpus.hpp"
#include "pds/bruteforce.hpp"
#include "pds/hardness.hpp"

using namespace pds;
using bruteforce::oracle_ipds;
using bruteforce::oracle_pds;

namespace {

std::vector<std::uint32_t> by_name(const Circuit& c, std::initializer_list<const char*> names) {
    std::vector<std::uint32_t> out;
    for (const char* n : names) out.push_back(c.find(n));
    return out;
}

std::size_t count_role(const Transform& t, Role r) {
    return static_cast<std::size_t>(std::count_if(t.origin.begin(), t.origin.end(), [&](const Origin& o) { return o.role == r; }));
}

std::size_t non_propagating(const PdsInstance& g) {
    std::size_t k = 0;
    for (Vertex v = 0; v < g.vertex_count(); ++v) k += g.is_propagating(v) ? 0 : 1;
    return k;
}

void expect_same(const IpdsInstance& a, const IpdsInstance& b) {
    EXPECT_EQ(a.graph(), b.graph());
    EXPECT_EQ(a.boosters(), b.boosters());
    EXPECT_EQ(a.arcs(), b.arcs());
}

const char* kOr2 = "in x1\nin x2\nout y x1 x2\n";
const char* kAnd2 = "in x1\nin x2\nand a x1 x2\nout y a\n";
const char* kMixed = "in x1\nin x2\nin x3\nor o x1 x2\nand a o x3\nout y a\n";

} // namespace

TEST(Circuit, ParseAndWrite) {
    const auto c = parse_circuit("# comment\nin x1\nin x2\n\nand a x2 x1   # trailing\nout y a\n");
    EXPECT_EQ(c.size(), 4u);
    EXPECT_EQ(c.inputs(), (std::vector<std::uint32_t>{0, 1}));
    EXPECT_EQ(c.output(), 3u);
    EXPECT_EQ(c.gate(2).kind, GateKind::And);
    EXPECT_EQ(write_circuit(c), "in x1\nin x2\nand a x1 x2\nout y a\n");
    EXPECT_EQ(write_circuit(parse_circuit(write_circuit(c))), write_circuit(c));
}

TEST(Circuit, RejectsMalformed) {
    for (const char* bad : {"in x\nbogus g x\nout y g\n", "in x\nout y z\n", "in x\nout y x\nout z x\n",
                            "in x\nin w\nout y x\n", "in x x\nout y x\n", "in x\nin x\nout y x\n", "in x\nand a\nout y a\n",
                            "in x\nor g x x\nout y g\n", "in x\n", "in x\nout y x\nor g y\n", "in\n"})
        EXPECT_THROW(parse_circuit(bad), ParseError) << bad;
}

TEST(Circuit, Eval) {
    const auto orc = parse_circuit(kOr2);
    EXPECT_TRUE(eval_circuit(orc, by_name(orc, {"x1"})));
    EXPECT_FALSE(eval_circuit(orc, {}));
    const auto andc = parse_circuit(kAnd2);
    EXPECT_FALSE(eval_circuit(andc, by_name(andc, {"x1"})));
    EXPECT_TRUE(eval_circuit(andc, by_name(andc, {"x1", "x2"})));
    const auto mixed = parse_circuit(kMixed);
    EXPECT_TRUE(eval_circuit(mixed, by_name(mixed, {"x2", "x3"})));
    EXPECT_FALSE(eval_circuit(mixed, by_name(mixed, {"x1", "x2"})));
    EXPECT_THROW(eval_circuit(mixed, by_name(mixed, {"o"})), Error);
}

TEST(Circuit, MinWeight) {
    EXPECT_EQ(wmcs_min_weight(parse_circuit(kOr2)), 1u);
    const auto and3 = parse_circuit("in x1\nin x2\nin x3\nand a x1 x2 x3\nout y a\n");
    EXPECT_EQ(wmcs_min_weight(and3), 3u);
    EXPECT_FALSE(wmcs_min_weight(and3, 2).has_value());
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto c = random_circuit(1 + s % 6, s % 7, s);
        EXPECT_NO_THROW(c.validate());
        EXPECT_TRUE(eval_circuit(c, c.inputs()));
        ASSERT_TRUE(wmcs_min_weight(c).has_value());
    }
}

TEST(ToIpds, Structure) {
    const auto c = parse_circuit(kMixed);
    const auto t = wmcs_to_ipds_ext(c);
    const PdsInstance& g = t.instance.graph();
    // 3 inputs, or, output, and-gate pair, 2 proxies
    EXPECT_EQ(g.vertex_count(), 9u);
    EXPECT_EQ(t.origin.size(), 9u);
    EXPECT_EQ(count_role(t, Role::Proxy), 2u);
    EXPECT_EQ(t.parameter_shift, 0);
    EXPECT_EQ(g.count(Decision::Undecided), 3u);
    EXPECT_EQ(g.count(Decision::Excluded), 6u);
    EXPECT_EQ(g.count(Decision::Selected), 0u);
    EXPECT_EQ(non_propagating(g), 0u);
    // wires into or/output (3), wires into proxies (2), output to inputs (3)
    EXPECT_EQ(t.instance.arcs().size(), 8u);
    EXPECT_TRUE(t.instance.boosters().empty());
}

TEST(ToIpds, OptimumEqualsWeight) {
    for (const char* text : {kOr2, kAnd2, kMixed}) {
        const auto c = parse_circuit(text);
        EXPECT_EQ(oracle_ipds(wmcs_to_ipds_ext(c).instance).gamma, wmcs_min_weight(c)) << text;
    }
    for (std::uint64_t s = 0; s < 300; ++s) {
        const auto c = random_circuit(1 + s % 5, s % 6, s);
        const auto t = wmcs_to_ipds_ext(c);
        ASSERT_EQ(oracle_ipds(t.instance).gamma, wmcs_min_weight(c)) << write_circuit(c);
        std::size_t expect = 0;
        for (const auto& gate : c.gates()) expect += gate.kind == GateKind::And ? 2 + gate.children.size() : 1;
        EXPECT_EQ(t.instance.vertex_count(), expect);
        EXPECT_EQ(t.origin.size(), expect);
    }
}

TEST(Exclusion, IdentityWithoutAnnotations) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto inst = corpus::random_ipds(s, 8, 12, 2, 2, false);
        const auto t = ipds_ext_to_ipds(inst);
        expect_same(t.instance, inst);
        EXPECT_EQ(t.parameter_shift, 0);
        ASSERT_EQ(t.origin.size(), inst.vertex_count());
        for (Vertex v = 0; v < inst.vertex_count(); ++v) {
            EXPECT_EQ(t.origin[v].role, Role::Original);
            EXPECT_EQ(t.origin[v].source, v);
        }
    }
}

TEST(Exclusion, ForcedVertexInEveryOptimum) {
    PdsInstance k2 = corpus::path(2);
    k2.set_decision(0, Decision::Selected);
    const auto t = ipds_ext_to_ipds(IpdsInstance(k2));
    const PdsInstance& g = t.instance.graph();
    ASSERT_EQ(g.vertex_count(), 4u);
    EXPECT_EQ(g.degree(0), 3u);
    EXPECT_EQ(g.count(Decision::Undecided), 4u);
    const auto o = oracle_ipds(t.instance);
    ASSERT_EQ(o.gamma, 1u);
    for (Vertex v = 0; v < 4; ++v) EXPECT_EQ(ipds_covers(t.instance, VertexList{v}), v == 0) << v;
}

TEST(Exclusion, SingleEdgeCopies) {
    PdsInstance k2 = corpus::path(2);
    k2.set_decision(1, Decision::Excluded);
    const auto t = ipds_ext_to_ipds(IpdsInstance(k2));
    EXPECT_EQ(t.instance.vertex_count(), 3u * 2u + 1u);
    EXPECT_EQ(count_role(t, Role::Clique), 1u);
    EXPECT_EQ(oracle_ipds(t.instance).gamma, oracle_pds(k2).gamma);
}

TEST(Exclusion, PreservesOptimum) {
    std::size_t checked = 0;
    for (std::uint64_t s = 0; checked < 200; ++s) {
        const auto inst = corpus::random_ipds(s, 4, 6, 2, 2);
        const auto before = oracle_ipds(inst);
        const auto t = ipds_ext_to_ipds(inst);
        const PdsInstance& g = inst.graph();
        const std::size_t n = g.vertex_count(), y = g.count(Decision::Excluded), x = g.count(Decision::Selected);
        const std::size_t expect = y == 0 ? n + 2 * x : (n + 1) * n + (n - y) + 2 * x;
        ASSERT_EQ(t.instance.vertex_count(), expect);
        ASSERT_EQ(t.origin.size(), expect);
        EXPECT_EQ(t.instance.graph().count(Decision::Undecided), expect);
        if (!before.gamma) continue;
        ++checked;
        ASSERT_EQ(oracle_ipds(t.instance, *before.gamma).gamma, before.gamma) << write_instance(g);
    }
}

TEST(ImplicationGadget, Identity) {
    const auto inst = corpus::random_ipds(3, 8, 12, 2, 0);
    ASSERT_TRUE(inst.arcs().empty());
    const auto t = eliminate_implication_arcs(inst);
    expect_same(t.instance, inst);
    EXPECT_EQ(t.parameter_shift, 0);
}

TEST(ImplicationGadget, SingleArcAndSharedSource) {
    IpdsInstance one(PdsInstance(2));
    one.add_arc(0, 1);
    const auto t1 = eliminate_implication_arcs(one);
    EXPECT_TRUE(t1.instance.arcs().empty());
    EXPECT_EQ(t1.instance.vertex_count(), 6u);
    EXPECT_EQ(t1.instance.boosters().size(), 4u);
    EXPECT_EQ(oracle_ipds(t1.instance).gamma, oracle_ipds(one).gamma);
    EXPECT_TRUE(ipds_covers(t1.instance, VertexList{0}));
    EXPECT_FALSE(ipds_covers(t1.instance, VertexList{1}));

    IpdsInstance two(PdsInstance(3));
    two.add_arc(0, 1);
    two.add_arc(0, 2);
    const auto t2 = eliminate_implication_arcs(two);
    EXPECT_EQ(t2.instance.vertex_count(), 11u);
    EXPECT_EQ(count_role(t2, Role::Implication), 8u);
    EXPECT_EQ(oracle_ipds(t2.instance).gamma, 1u);
    EXPECT_EQ(oracle_ipds(two).gamma, 1u);
}

TEST(ImplicationGadget, PreservesOptimum) {
    for (std::uint64_t s = 0; s < 300; ++s) {
        const auto inst = corpus::random_ipds(s, 7, 10, 2, 3);
        const auto t = eliminate_implication_arcs(inst);
        const std::size_t a = inst.arcs().size();
        ASSERT_TRUE(t.instance.arcs().empty());
        ASSERT_EQ(t.instance.vertex_count(), inst.vertex_count() + 4 * a);
        ASSERT_EQ(t.instance.graph().edge_count(), inst.graph().edge_count() + 6 * a);
        ASSERT_EQ(t.instance.boosters().size(), inst.boosters().size() + 4 * a);
        ASSERT_EQ(t.origin.size(), t.instance.vertex_count());
        ASSERT_EQ(t.parameter_shift, 0);
        const auto before = oracle_ipds(inst);
        if (before.gamma) { ASSERT_EQ(oracle_ipds(t.instance).gamma, before.gamma) << write_instance(inst.graph()); }
    }
}

TEST(BoosterGadget, Identity) {
    const auto g = corpus::random_extension(4);
    const auto t = eliminate_booster_edges(IpdsInstance(g));
    EXPECT_EQ(t.instance.graph(), g);
    EXPECT_EQ(t.parameter_shift, 0);
}

TEST(BoosterGadget, RejectsArcs) {
    IpdsInstance inst(PdsInstance(2));
    inst.add_arc(0, 1);
    EXPECT_THROW(eliminate_booster_edges(inst), Error);
}

TEST(BoosterGadget, Examples) {
    IpdsInstance k2(corpus::path(2));
    k2.add_booster(0, 1);
    const auto t = eliminate_booster_edges(k2);
    EXPECT_EQ(t.parameter_shift, 1);
    EXPECT_EQ(t.instance.vertex_count(), 2u + 1u + 3u);
    EXPECT_FALSE(t.instance.graph().has_edge(0, 1));
    EXPECT_EQ(*oracle_ipds(k2).gamma + 1, *oracle_pds(t.instance.graph()).gamma);

    IpdsInstance p3(corpus::path(3));
    p3.add_booster(0, 1);
    p3.add_booster(1, 2);
    const auto t3 = eliminate_booster_edges(p3);
    EXPECT_EQ(t3.parameter_shift, 1);
    EXPECT_EQ(count_role(t3, Role::BoosterHub), 1u);
    EXPECT_EQ(count_role(t3, Role::Subdivision), 2u);
    EXPECT_EQ(*oracle_ipds(p3).gamma + 1, *oracle_pds(t3.instance.graph()).gamma);
}

TEST(BoosterGadget, PreservesOptimumUpToShift) {
    for (std::uint64_t s = 0; s < 300; ++s) {
        const auto inst = corpus::random_ipds(s, 7, 10, 3, 0);
        const auto t = eliminate_booster_edges(inst);
        const std::size_t b = inst.boosters().size();
        ASSERT_TRUE(t.instance.plain());
        ASSERT_EQ(t.parameter_shift, b ? 1 : 0);
        ASSERT_EQ(t.instance.vertex_count(), inst.vertex_count() + b + (b ? 3 : 0));
        ASSERT_EQ(t.origin.size(), t.instance.vertex_count());
        const auto before = oracle_ipds(inst), after = oracle_pds(t.instance.graph());
        ASSERT_EQ(before.gamma.has_value(), after.gamma.has_value());
        if (before.gamma) { ASSERT_EQ(*before.gamma + t.parameter_shift, *after.gamma) << write_instance(inst.graph()); }
    }
}

TEST(BoosterGadget, ReusedHub) {
    std::size_t checked = 0;
    for (std::uint64_t s = 0; s < 400; ++s) {
        auto inst = corpus::random_ipds(s, 7, 10, 3, 0, false);
        if (inst.boosters().empty()) continue;
        const Vertex hub = static_cast<Vertex>(s % inst.vertex_count());
        inst.graph().set_decision(hub, Decision::Selected);
        const auto t = eliminate_booster_edges(inst, hub);
        ASSERT_EQ(t.parameter_shift, 0);
        ASSERT_EQ(t.instance.vertex_count(), inst.vertex_count() + inst.boosters().size());
        ASSERT_EQ(oracle_pds(t.instance.graph()).gamma, oracle_ipds(inst).gamma) << write_instance(inst.graph());
        ++checked;
    }
    EXPECT_GE(checked, 100u);
    IpdsInstance k2(corpus::path(2));
    k2.add_booster(0, 1);
    EXPECT_THROW(eliminate_booster_edges(k2, 5), Error);
}

TEST(Simple, Examples) {
    const auto p = corpus::path(4);
    EXPECT_EQ(pds_to_simple(p).instance.graph(), p);
    auto p3 = corpus::path(3);
    p3.set_propagating(1, false);
    const auto t = pds_to_simple(p3);
    EXPECT_EQ(t.instance.vertex_count(), 4u);
    EXPECT_TRUE(t.instance.graph().has_edge(1, 3));
    EXPECT_EQ(oracle_pds(t.instance.graph()).gamma, 1u);
    EXPECT_EQ(oracle_pds(p3).gamma, 1u);
    auto star = corpus::star(3);
    for (Vertex v = 0; v < 4; ++v) star.set_propagating(v, false);
    const auto ts = pds_to_simple(star);
    EXPECT_EQ(ts.instance.vertex_count(), 8u);
    EXPECT_EQ(count_role(ts, Role::SimpleLeaf), 4u);
    EXPECT_EQ(oracle_pds(ts.instance.graph()).gamma, oracle_pds(star).gamma);
}

TEST(Simple, PreservesOptimum) {
    for (std::uint64_t s = 0; s < 300; ++s) {
        const auto g = corpus::random_extension(s, 10, 16);
        const auto t = pds_to_simple(g);
        const PdsInstance& h = t.instance.graph();
        ASSERT_EQ(h.vertex_count(), g.vertex_count() + non_propagating(g));
        ASSERT_EQ(non_propagating(h), 0u);
        const auto before = oracle_pds(g);
        if (before.gamma) { ASSERT_EQ(oracle_pds(h).gamma, before.gamma) << write_instance(g); }
    }
}

TEST(Chain, Examples) {
    for (const char* text : {kOr2, kAnd2, kMixed, "in x1\nin x2\nin x3\nin x4\nand a x1 x2 x3 x4\nout y a\n"}) {
        const auto c = parse_circuit(text);
        const auto r = full_chain(c);
        ASSERT_EQ(r.steps.size(), 5u);
        EXPECT_EQ(r.total_shift, 1);
        const PdsInstance& g = r.instance;
        EXPECT_EQ(non_propagating(g), 0u);
        EXPECT_EQ(g.count(Decision::Undecided), g.vertex_count());
        EXPECT_TRUE(r.steps.back().instance.plain());
        for (const auto& step : r.steps) EXPECT_EQ(step.origin.size(), step.instance.vertex_count());
        const auto o = bruteforce::oracle_pds_branching(g);
        ASSERT_TRUE(o.gamma.has_value());
        EXPECT_EQ(*o.gamma, *wmcs_min_weight(c) + static_cast<std::size_t>(r.total_shift)) << text;
        EXPECT_TRUE(bruteforce::naive_covers(g, o.witness.selected));
    }
}

TEST(Chain, RandomCircuits) {
    for (std::uint64_t s = 0; s < 60; ++s) {
        const auto c = random_circuit(1 + s % 4, s % 5, s);
        const auto r = full_chain(c);
        const auto o = bruteforce::oracle_pds_branching(r.instance);
        ASSERT_TRUE(o.gamma.has_value());
        ASSERT_EQ(*o.gamma, *wmcs_min_weight(c) + static_cast<std::size_t>(r.total_shift)) << write_circuit(c);
    }
}
