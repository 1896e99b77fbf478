#pragma once

// Implicating PDS: booster edges (observation crosses in both directions) and
// implication arcs (one way, outside the graph).

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pds/instance.hpp"

namespace pds {

class IpdsInstance {
public:
    using Arc = std::pair<Vertex, Vertex>;

    IpdsInstance() = default;
    explicit IpdsInstance(PdsInstance g) : graph_(std::move(g)) {}

    const PdsInstance& graph() const { return graph_; }
    PdsInstance& graph() { return graph_; }
    std::size_t vertex_count() const { return graph_.vertex_count(); }

    const std::vector<Arc>& boosters() const { return boosters_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    bool plain() const { return boosters_.empty() && arcs_.empty(); }

    bool is_booster(Vertex u, Vertex v) const {
        return std::binary_search(boosters_.begin(), boosters_.end(), ordered(u, v));
    }

    /// Adds the edge uv (if missing) and marks it as a booster edge.
    void add_booster(Vertex u, Vertex v) {
        graph_.add_edge(u, v);
        const Arc e = ordered(u, v);
        auto it = std::lower_bound(boosters_.begin(), boosters_.end(), e);
        if (it == boosters_.end() || *it != e) boosters_.insert(it, e);
    }

    void add_arc(Vertex u, Vertex v) {
        if (u == v) throw Error("implication arc is a self-loop at " + std::to_string(u));
        if (u >= vertex_count() || v >= vertex_count()) throw Error("implication arc out of range");
        if (std::find(arcs_.begin(), arcs_.end(), Arc{u, v}) == arcs_.end()) arcs_.emplace_back(u, v);
    }

    void clear_arcs() { arcs_.clear(); }
    void clear_boosters() { boosters_.clear(); }

private:
    static Arc ordered(Vertex u, Vertex v) { return u < v ? Arc{u, v} : Arc{v, u}; }

    PdsInstance graph_;
    std::vector<Arc> boosters_;  // sorted, u < v
    std::vector<Arc> arcs_;
};

/// Fixpoint of domination, propagation, booster and implication rules,
/// recomputed by sweeps. Booster edges are ordinary neighbors for the
/// first two rules.
inline std::vector<std::uint8_t> observe_ipds(const IpdsInstance& inst, std::span<const Vertex> selection) {
    const PdsInstance& g = inst.graph();
    std::vector<std::uint8_t> obs(g.vertex_count(), 0);
    for (Vertex s : selection) {
        obs[s] = 1;
        for (Vertex u : g.neighbors(s)) obs[u] = 1;
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (Vertex v = 0; v < g.vertex_count(); ++v) {
            if (!obs[v] || !g.is_propagating(v)) continue;
            Vertex last = kNoVertex;
            std::size_t missing = 0;
            for (Vertex u : g.neighbors(v))
                if (!obs[u]) {
                    ++missing;
                    last = u;
                }
            if (missing == 1) {
                obs[last] = 1;
                changed = true;
            }
        }
        for (auto [u, v] : inst.boosters())
            if (obs[u] != obs[v]) {
                obs[u] = obs[v] = 1;
                changed = true;
            }
        for (auto [u, v] : inst.arcs())
            if (obs[u] && !obs[v]) {
                obs[v] = 1;
                changed = true;
            }
    }
    return obs;
}

inline bool ipds_covers(const IpdsInstance& inst, std::span<const Vertex> selection) {
    const auto obs = observe_ipds(inst, selection);
    return std::all_of(obs.begin(), obs.end(), [](auto o) { return o != 0; });
}

} // namespace pds
