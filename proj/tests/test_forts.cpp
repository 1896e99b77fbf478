#include <gtest/gtest.h>

#include <algorithm>

#include "corpus.hpp"
#include "pds/bruteforce.hpp"
#include "pds/forts.hpp"

using namespace pds;

TEST(IsFort, PathExamples) {
    const auto p = corpus::path(3);
    EXPECT_TRUE(is_fort(p, VertexList{0, 2}));
    EXPECT_FALSE(is_fort(p, VertexList{0}));
    EXPECT_FALSE(is_fort(p, VertexList{}));
}

TEST(IsFort, NonPropagatingOutsideIgnored) {
    auto p = corpus::path(3);
    p.set_propagating(1, false);
    EXPECT_TRUE(is_fort(p, VertexList{0}));
}

TEST(Candidate, Examples) {
    const auto p = corpus::path(3);
    EXPECT_FALSE(fort_from_candidate(p, VertexList{0}).has_value());
    EXPECT_EQ(fort_from_candidate(p, VertexList{})->vertices, (VertexList{0, 1, 2}));
    const auto f = fort_from_candidate(corpus::star(3), VertexList{1});
    ASSERT_TRUE(f.has_value());
    EXPECT_EQ(f->vertices, (VertexList{2, 3}));
    EXPECT_TRUE(is_fort(corpus::star(3), f->vertices));
}

TEST(Minimize, PathCannotShrink) {
    const auto p = corpus::path(3);
    const Fort f{{0, 1, 2}};
    EXPECT_EQ(minimize_fort(p, f, VertexList{0, 1, 2}), f);
    EXPECT_EQ(minimize_fort(p, f, VertexList{}), f);
}

TEST(Minimize, AlreadyMinimal) {
    const auto p = corpus::path(3);
    const Fort f{{0, 2}};
    EXPECT_EQ(minimize_fort(p, f, VertexList{0, 2}), f);
}

TEST(Minimize, StarShrinks) {
    const auto s = corpus::star(4);
    const Fort f{{1, 2, 3, 4}};
    const auto m = minimize_fort(s, f, VertexList{1, 2});
    EXPECT_TRUE(is_fort(s, m.vertices));
    EXPECT_EQ(m.vertices, (VertexList{3, 4}));
}

TEST(Find, AlreadySolved) {
    const auto s = corpus::star(3);
    EXPECT_TRUE(find_forts(s, VertexList{0}, 1).empty());
}

TEST(Find, PathForts) {
    const auto p = corpus::path(3);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto forts = find_forts(p, {}, seed);
        ASSERT_FALSE(forts.empty());
        for (const auto& f : forts)
            EXPECT_TRUE(f.vertices == (VertexList{0, 2}) || f.vertices == (VertexList{0, 1, 2}));
    }
}

TEST(Find, Deterministic) {
    const auto g = generate_random(12, 16, 0.25, 9);
    EXPECT_EQ(find_forts(g, {}, 5), find_forts(g, {}, 5));
}

TEST(Find, Infeasible) {
    auto g = corpus::star(3);
    for (Vertex v = 0; v < 4; ++v) g.set_decision(v, Decision::Excluded);
    EXPECT_THROW(find_forts(g, {}, 0), InfeasibleError);
}

TEST(Find, EmittedFortsAreValidAndUnhit) {
    Rng rng(17);
    for (std::uint64_t s = 0; s < 500; ++s) {
        const auto g = corpus::random_extension(s, 12, 20);
        VertexList h;
        for (Vertex v : g.undecided())
            if (rng.below(5) == 0) h.push_back(v);
        std::vector<Fort> forts;
        try {
            forts = find_forts(g, h, s);
        } catch (const InfeasibleError&) {
            continue;
        }
        VertexList base = g.pre_selected();
        base.insert(base.end(), h.begin(), h.end());
        if (!is_power_dominating(g, std::span<const Vertex>(base))) { EXPECT_FALSE(forts.empty()); }
        for (const auto& f : forts) {
            EXPECT_TRUE(is_fort(g, f.vertices));
            for (Vertex v : closed_neighborhood(g, f.vertices)) EXPECT_EQ(std::count(base.begin(), base.end(), v), 0);
        }
    }
}

TEST(Enumeration, OptimaHitEveryMinimalFort) {
    for (std::uint64_t s = 0; s < 300; ++s) {
        const std::size_t n = 1 + s % 8;
        const auto g = generate_random(n, s % (n * (n - 1) / 2 + 1), 0.5 * static_cast<double>(s % 3), s);
        const auto o = bruteforce::oracle_pds(g);
        ASSERT_TRUE(o.gamma.has_value());
        for (const auto& f : bruteforce::enumerate_minimal_forts(g)) {
            EXPECT_TRUE(is_fort(g, f));
            const auto nf = closed_neighborhood(g, f);
            EXPECT_TRUE(std::any_of(nf.begin(), nf.end(), [&](Vertex v) { return o.witness.contains(v); }));
        }
    }
}
