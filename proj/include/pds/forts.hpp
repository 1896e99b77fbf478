#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pds/instance.hpp"
#include "pds/propagation.hpp"
#include "pds/rng.hpp"

namespace pds {

class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// A fort: a non-empty vertex set such that no propagating vertex outside it
/// has exactly one neighbor inside. Every power dominating set hits N[F].
struct Fort {
    VertexList vertices;
    friend auto operator<=>(const Fort&, const Fort&) = default;
};

inline bool is_fort(const PdsInstance& inst, std::span<const Vertex> f) {
    if (f.empty()) return false;
    std::vector<std::uint8_t> in(inst.vertex_count(), 0);
    for (Vertex v : f) in[v] = 1;
    std::vector<std::uint32_t> hits(inst.vertex_count(), 0);
    for (Vertex v : f)
        for (Vertex u : inst.neighbors(v)) ++hits[u];
    for (Vertex v = 0; v < inst.vertex_count(); ++v)
        if (!in[v] && inst.is_propagating(v) && hits[v] == 1) return false;
    return true;
}

/// Closed neighborhood N[F], sorted.
inline VertexList closed_neighborhood(const PdsInstance& inst, std::span<const Vertex> f) {
    VertexList out(f.begin(), f.end());
    for (Vertex v : f) out.insert(out.end(), inst.neighbors(v).begin(), inst.neighbors(v).end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// The unobserved vertices of selection s, if any.
inline std::optional<Fort> fort_from_candidate(const PdsInstance& inst, std::span<const Vertex> s) {
    auto state = observe_from(inst, s);
    if (state.all_observed()) return std::nullopt;
    return Fort{state.unobserved_set()};
}

namespace detail {

/// Treats everything outside the fort as observed and tentatively selects
/// pool vertices, keeping each selection that leaves a non-empty fort.
class FortShrinker {
public:
    FortShrinker(const PdsInstance& inst, std::span<const Vertex> fort)
        : inst_(inst), in_fort_(inst.vertex_count(), 0), inside_(inst.vertex_count(), 0), size_(fort.size()) {
        for (Vertex v : fort) in_fort_[v] = 1;
        for (Vertex v : fort)
            for (Vertex u : inst.neighbors(v)) ++inside_[u];
    }

    bool touches(Vertex p) const {
        if (in_fort_[p]) return true;
        return inside_[p] > 0;
    }

    /// Selects p; keeps the result iff the fort stays non-empty.
    bool try_select(Vertex p) {
        undo_.clear();
        std::vector<Vertex> queue;
        auto drop = [&](Vertex v) {
            in_fort_[v] = 0;
            undo_.push_back(v);
            --size_;
            for (Vertex u : inst_.neighbors(v)) {
                --inside_[u];
                if (!in_fort_[u] && inside_[u] == 1 && inst_.is_propagating(u)) queue.push_back(u);
            }
            if (inside_[v] == 1 && inst_.is_propagating(v)) queue.push_back(v);
        };
        if (in_fort_[p]) drop(p);
        for (Vertex u : inst_.neighbors(p))
            if (in_fort_[u]) drop(u);
        while (!queue.empty() && size_ > 0) {
            const Vertex w = queue.back();
            queue.pop_back();
            if (in_fort_[w] || inside_[w] != 1) continue;
            for (Vertex u : inst_.neighbors(w))
                if (in_fort_[u]) {
                    drop(u);
                    break;
                }
        }
        if (size_ > 0) return true;
        for (Vertex v : undo_) {
            in_fort_[v] = 1;
            ++size_;
            for (Vertex u : inst_.neighbors(v)) ++inside_[u];
        }
        return false;
    }

    VertexList fort() const {
        VertexList out;
        for (Vertex v = 0; v < in_fort_.size(); ++v)
            if (in_fort_[v]) out.push_back(v);
        return out;
    }

private:
    const PdsInstance& inst_;
    std::vector<std::uint8_t> in_fort_;
    std::vector<std::uint32_t> inside_;
    std::size_t size_;
    VertexList undo_;
};

} // namespace detail

/// Single pass over the pool in ascending id order: re-select each vertex and
/// keep the smaller unobserved set whenever it is still non-empty.
inline Fort minimize_fort(const PdsInstance& inst, const Fort& f, std::span<const Vertex> pool) {
    if (pool.empty()) return f;
    VertexList order(pool.begin(), pool.end());
    std::sort(order.begin(), order.end());
    detail::FortShrinker shrinker(inst, f.vertices);
    bool changed = false;
    for (Vertex p : order)
        if (shrinker.touches(p)) changed |= shrinker.try_select(p);
    return changed ? Fort{shrinker.fort()} : f;
}

/// Forts from the candidate sequence S_i = H u X u U_i.
///
/// U is the set of undecided vertices outside H, shuffled with `seed`.
/// Starting from U_0 = U, vertex u_i is dropped at step i; if S_{i-1} was
/// not a solution, u_{i-1} is put back first. Every S_i that fails to observe
/// the graph yields the fort V \ R(S_i), minimized against the vertices of U
/// removed so far. The result is deduplicated and sorted.
inline std::vector<Fort> find_forts(const PdsInstance& inst, std::span<const Vertex> hitting_set, std::uint64_t seed) {
    VertexList base = inst.pre_selected();
    base.insert(base.end(), hitting_set.begin(), hitting_set.end());
    std::sort(base.begin(), base.end());
    base.erase(std::unique(base.begin(), base.end()), base.end());

    ObservationState state(inst, base);
    if (state.all_observed()) return {};

    VertexList pool_order;
    for (Vertex v = 0; v < inst.vertex_count(); ++v)
        if (inst.is_undecided(v) && !state.is_selected(v)) pool_order.push_back(v);
    Rng rng(seed);
    rng.shuffle(std::span<Vertex>(pool_order));

    for (Vertex u : pool_order) state.select(u);
    if (!state.all_observed()) throw InfeasibleError("instance has no feasible solution");

    std::vector<std::uint8_t> removed(inst.vertex_count(), 0);
    VertexList pool;
    std::vector<Fort> out;
    bool prev_solution = true;
    for (std::size_t i = 0; i < pool_order.size(); ++i) {
        const Vertex ui = pool_order[i];
        if (!prev_solution) {
            const Vertex back = pool_order[i - 1];
            state.select(back);
            removed[back] = 0;
        }
        state.deselect(ui);
        removed[ui] = 1;
        prev_solution = state.all_observed();
        if (prev_solution) continue;
        pool.clear();
        for (std::size_t j = 0; j <= i; ++j)
            if (removed[pool_order[j]]) pool.push_back(pool_order[j]);
        out.push_back(minimize_fort(inst, Fort{state.unobserved_set()}, pool));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace pds
