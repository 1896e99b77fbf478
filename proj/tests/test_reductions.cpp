#include <gtest/gtest.h>

#include "corpus.hpp"
#include "pds/bruteforce.hpp"
#include "pds/reductions.hpp"

using namespace pds;

namespace {

std::size_t lifted_optimum(const ReductionResult& r, bool& feasible) {
    const auto k = bruteforce::oracle_pds(r.kernel);
    feasible = k.gamma.has_value();
    if (!feasible) return 0;
    return lift_solution(r.log, k.witness).size();
}

PdsInstance triangle_with_tail() {
    PdsInstance g(4);
    g.add_edge(0, 1);
    g.add_edge(0, 2);
    g.add_edge(1, 2);
    g.add_edge(2, 3);
    return g;
}

} // namespace

TEST(Rule, Deg1aExcludesLeaf) {
    const auto a = apply_rule_once(corpus::star(3), RuleId::Deg1a, 1);
    ASSERT_TRUE(a.changed);
    EXPECT_TRUE(a.result.kernel.is_excluded(1));
    EXPECT_EQ(a.result.stats.count(RuleId::Deg1a), 1u);
    EXPECT_FALSE(apply_rule_once(corpus::star(3), RuleId::Deg1a, 0).changed);
}

TEST(Rule, Deg1bPropagatingParent) {
    auto g = corpus::path(2);
    g.set_decision(1, Decision::Excluded);
    const auto a = apply_rule_once(g, RuleId::Deg1b, 1);
    ASSERT_TRUE(a.changed);
    ASSERT_EQ(a.result.kernel.vertex_count(), 1u);
    EXPECT_FALSE(a.result.kernel.is_propagating(0));
}

TEST(Rule, Deg1bNonPropagatingParentSelected) {
    auto g = corpus::path(2);
    g.set_decision(1, Decision::Excluded);
    g.set_propagating(0, false);
    const auto a = apply_rule_once(g, RuleId::Deg1b, 1);
    ASSERT_TRUE(a.changed);
    EXPECT_EQ(a.result.log.forced, (VertexList{0}));
    EXPECT_TRUE(a.result.kernel.is_pre_selected(0));
}

TEST(Rule, TriSelectsCommonNeighbor) {
    const auto a = apply_rule_once(triangle_with_tail(), RuleId::Tri, 0);
    ASSERT_TRUE(a.changed);
    EXPECT_EQ(a.result.log.kernel_to_original, (VertexList{2, 3}));
    EXPECT_TRUE(a.result.kernel.is_pre_selected(0));
    EXPECT_EQ(a.result.log.forced, (VertexList{2}));
}

TEST(Rule, Deg2aExcludesPathInterior) {
    const auto a = apply_rule_once(corpus::path(3), RuleId::Deg2a, 1);
    ASSERT_TRUE(a.changed);
    EXPECT_TRUE(a.result.kernel.is_excluded(1));
    EXPECT_FALSE(apply_rule_once(triangle_with_tail(), RuleId::Deg2a, 0).changed);
}

TEST(Rule, IsolSelects) {
    const auto a = apply_rule_once(PdsInstance(1), RuleId::Isol, 0);
    ASSERT_TRUE(a.changed);
    EXPECT_TRUE(a.result.kernel.is_pre_selected(0));
}

TEST(Rule, OnlyNSelectsOtherNeighbor) {
    auto g = corpus::path(3);
    g.set_propagating(0, false);
    g.set_propagating(2, false);
    g.set_decision(1, Decision::Excluded);
    g.set_decision(0, Decision::Excluded);
    const auto a = apply_rule_once(g, RuleId::OnlyN, 1);
    ASSERT_TRUE(a.changed);
    EXPECT_TRUE(a.result.kernel.is_pre_selected(2));
}

TEST(Rule, ObsNPDeletesObservedExcluded) {
    auto g = corpus::path(2);
    g.set_decision(0, Decision::Selected);
    g.set_decision(1, Decision::Excluded);
    g.set_propagating(1, false);
    const auto a = apply_rule_once(g, RuleId::ObsNP, 1);
    ASSERT_TRUE(a.changed);
    EXPECT_EQ(a.result.kernel.vertex_count(), 1u);
}

TEST(Rule, ObsENeedsPreSelected) {
    const auto g = corpus::path(4);
    for (Vertex v = 0; v < 4; ++v) EXPECT_FALSE(apply_rule_once(g, RuleId::ObsE, v).changed);
    auto h = corpus::star(3);
    h.add_edge(1, 2);
    h.set_decision(0, Decision::Selected);
    const auto a = apply_rule_once(h, RuleId::ObsE, 1);
    ASSERT_TRUE(a.changed);
    EXPECT_FALSE(a.result.kernel.has_edge(1, 2));
    EXPECT_TRUE(a.result.kernel.has_edge(2, 0));
}

TEST(Rule, DomOnStarLeaf) {
    const auto a = apply_rule_once(corpus::star(3), RuleId::Dom, 2);
    ASSERT_TRUE(a.changed);
    EXPECT_TRUE(a.result.kernel.is_excluded(2));
}

TEST(Rule, NecNOnIsolatedPair) {
    const auto r = apply_nonlocal(PdsInstance(2), RuleId::NecN);
    EXPECT_EQ(r.log.forced, (VertexList{0, 1}));
    EXPECT_EQ(r.stats.count(RuleId::NecN), 2u);
}

TEST(Rule, BadSite) { EXPECT_THROW(apply_rule_once(corpus::path(2), RuleId::Deg1a, 5), Error); }

TEST(Nonlocal, DomExcludesStarLeaves) {
    const auto r = apply_nonlocal(corpus::star(3), RuleId::Dom);
    EXPECT_EQ(r.kernel.excluded(), (VertexList{1, 2, 3}));
    EXPECT_THROW(apply_nonlocal(corpus::star(3), RuleId::Tri), Error);
}

TEST(Nonlocal, NecNSingleAndPath) {
    EXPECT_EQ(apply_nonlocal(PdsInstance(1), RuleId::NecN).log.forced, (VertexList{0}));
    EXPECT_TRUE(apply_nonlocal(corpus::path(4), RuleId::NecN).log.forced.empty());
}

TEST(Nonlocal, DomSinglePassIsExhaustive) {
    for (std::uint64_t s = 0; s < 300; ++s) {
        const auto once = apply_nonlocal(corpus::random_extension(s, 10, 16), RuleId::Dom);
        EXPECT_EQ(apply_nonlocal(once.kernel, RuleId::Dom).stats.count(RuleId::Dom), 0u) << "seed " << s;
    }
}

TEST(Local, PathOfTwo) {
    const auto r = apply_local_exhaustive(corpus::path(2));
    EXPECT_EQ(r.log.forced.size(), 1u);
    EXPECT_EQ(r.kernel.count(Decision::Undecided), 0u);
    EXPECT_TRUE(is_power_dominating(corpus::path(2), std::span<const Vertex>(lift_solution(r.log, {}).selected)));
}

TEST(Local, IrreducibleAndEmpty) {
    PdsInstance k4(4);
    for (Vertex u = 0; u < 4; ++u)
        for (Vertex v = u + 1; v < 4; ++v) k4.add_edge(u, v);
    const auto r = apply_local_exhaustive(k4);
    EXPECT_TRUE(r.log.events.empty());
    EXPECT_EQ(r.kernel, k4);
    EXPECT_EQ(apply_local_exhaustive(PdsInstance(0)).kernel.vertex_count(), 0u);
}

TEST(Local, NoGuardLeft) {
    for (std::uint64_t s = 0; s < 300; ++s) {
        const auto r = apply_local_exhaustive(corpus::random_extension(s, 10, 16));
        for (RuleId rule : kLocalRules)
            for (Vertex v = 0; v < r.kernel.vertex_count(); ++v)
                EXPECT_FALSE(apply_rule_once(r.kernel, rule, v).changed) << rule_name(rule) << " seed " << s;
    }
}

TEST(Full, PathOfTen) {
    const auto p = corpus::path(10);
    const auto r = reduce_full(p);
    EXPECT_EQ(r.kernel.count(Decision::Undecided), 0u);
    const auto lifted = lift_solution(r.log, {});
    EXPECT_EQ(lifted.size(), 1u);
    EXPECT_TRUE(is_power_dominating(p, std::span<const Vertex>(lifted.selected)));
}

TEST(Full, TwoTriangles) {
    PdsInstance t(3);
    t.add_edge(0, 1);
    t.add_edge(1, 2);
    t.add_edge(0, 2);
    const auto g = corpus::disjoint_union(t, t);
    bool feasible = false;
    EXPECT_EQ(lifted_optimum(reduce_full(g), feasible), 2u);
    EXPECT_TRUE(feasible);
}

TEST(Full, AlreadyObserved) {
    auto g = corpus::star(4);
    g.set_decision(0, Decision::Selected);
    EXPECT_EQ(reduce_full(g).kernel.count(Decision::Undecided), 0u);
}

TEST(Lift, IdentityAndSelectOnly) {
    const auto g = corpus::path(3);
    const auto none = reduce_full(g, RuleSelection::parse("none"));
    EXPECT_EQ(none.kernel, g);
    EXPECT_EQ(lift_solution(none.log, SolutionSet({1})).selected, (VertexList{1}));
    const auto iso = reduce_full(PdsInstance(1));
    EXPECT_EQ(iso.kernel.count(Decision::Undecided), 0u);
    EXPECT_EQ(lift_solution(iso.log, {}).selected, (VertexList{0}));
    EXPECT_THROW(lift_solution(iso.log, SolutionSet({7})), Error);
}

TEST(Selection, Names) {
    for (auto name : kRuleSelectionNames) EXPECT_NO_THROW(RuleSelection::parse(name));
    EXPECT_THROW(RuleSelection::parse("most"), Error);
    EXPECT_FALSE(RuleSelection::parse("none").any());
}

TEST(Full, SafetyAgainstOracle) {
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const auto g = corpus::random_extension(s, 10, 16);
        const auto o = bruteforce::oracle_pds(g);
        const auto r = reduce_full(g);
        bool feasible = false;
        const auto lifted = lifted_optimum(r, feasible);
        ASSERT_EQ(feasible, o.gamma.has_value()) << write_instance(g);
        if (feasible) { ASSERT_EQ(lifted, *o.gamma) << write_instance(g); }
    }
}

TEST(Full, IdempotentAndBounded) {
    for (std::uint64_t s = 0; s < 500; ++s) {
        const auto g = corpus::random_extension(s, 12, 20);
        const auto r = reduce_full(g);
        EXPECT_TRUE(reduce_full(r.kernel).log.events.empty()) << write_instance(g);
        const std::size_t size = g.vertex_count() + g.edge_count();
        EXPECT_LE(r.log.events.size(), 4 * size * size + 4);
    }
}
