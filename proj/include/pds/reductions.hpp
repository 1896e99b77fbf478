#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pds/instance.hpp"
#include "pds/propagation.hpp"

namespace pds {

enum class RuleId : std::uint8_t { Deg1a, Deg1b, Tri, Deg2a, Deg2b, Deg2c, OnlyN, Isol, ObsNP, ObsE, Dom, NecN };

inline constexpr std::size_t kRuleCount = 12;

inline constexpr std::array<RuleId, 10> kLocalRules = {RuleId::Deg1a, RuleId::Deg1b, RuleId::Tri,   RuleId::Deg2a,
                                                       RuleId::Deg2b, RuleId::Deg2c, RuleId::OnlyN, RuleId::Isol,
                                                       RuleId::ObsNP, RuleId::ObsE};

inline constexpr std::string_view rule_name(RuleId r) {
    constexpr std::array<std::string_view, kRuleCount> names = {"Deg1a", "Deg1b", "Tri",   "Deg2a", "Deg2b", "Deg2c",
                                                                "OnlyN", "Isol",  "ObsNP", "ObsE",  "Dom",   "NecN"};
    return names[static_cast<std::size_t>(r)];
}

inline constexpr bool is_local(RuleId r) { return r != RuleId::Dom && r != RuleId::NecN; }

/// Which rule groups the driver may use.
struct RuleSelection {
    bool local = true;
    bool dom = true;
    bool necn = true;

    static RuleSelection parse(std::string_view name) {
        if (name == "all") return {true, true, true};
        if (name == "local") return {true, false, false};
        if (name == "nonlocal") return {false, true, true};
        if (name == "local+dom") return {true, true, false};
        if (name == "local+necn") return {true, false, true};
        if (name == "none") return {false, false, false};
        throw Error("unknown reduction selection '" + std::string(name) + "'");
    }
    bool any() const { return local || dom || necn; }
};

inline constexpr std::array<std::string_view, 6> kRuleSelectionNames = {"all",       "local",      "nonlocal",
                                                                         "local+dom", "local+necn", "none"};

enum class EventKind : std::uint8_t { Exclude, Select, DeleteVertex, DeleteEdge, AddEdge, SetNonPropagating };

/// One primitive modification; u and v are original vertex ids.
struct ReductionEvent {
    RuleId rule;
    EventKind kind;
    Vertex u = kNoVertex;
    Vertex v = kNoVertex;
};

struct ReductionLog {
    std::size_t original_vertex_count = 0;
    std::vector<ReductionEvent> events;
    VertexList kernel_to_original;
    /// Original pre-selected vertices plus every vertex selected by a rule.
    VertexList forced;

    std::size_t select_events() const {
        return static_cast<std::size_t>(
            std::count_if(events.begin(), events.end(), [](const auto& e) { return e.kind == EventKind::Select; }));
    }
};

struct ReductionStats {
    std::array<std::size_t, kRuleCount> applied{};
    std::size_t kernel_vertices = 0;
    std::size_t kernel_edges = 0;
    std::size_t kernel_pre_selected = 0;
    std::size_t kernel_excluded = 0;

    std::size_t count(RuleId r) const { return applied[static_cast<std::size_t>(r)]; }
    std::size_t total() const {
        std::size_t t = 0;
        for (auto c : applied) t += c;
        return t;
    }
};

struct ReductionResult {
    PdsInstance kernel;
    ReductionLog log;
    ReductionStats stats;
};

/// Mutable working copy of an instance to which rules are applied.
///
/// Vertex ids stay those of the input; deleted vertices lose their edges and
/// are skipped. "Observed" in rule guards means observed by X alone and is
/// recomputed lazily after modifications that can change it.
class Reducer {
public:
    explicit Reducer(const PdsInstance& inst) : g_(inst), alive_(inst.vertex_count(), 1) {
        log_.original_vertex_count = inst.vertex_count();
        log_.forced = inst.pre_selected();
    }

    const PdsInstance& graph() const { return g_; }
    bool alive(Vertex v) const { return alive_[v] != 0; }
    const ReductionStats& stats() const { return stats_; }
    const ReductionLog& log() const { return log_; }

    bool observed(Vertex v) {
        refresh_observed();
        return obs_[v] != 0;
    }

    /// One application of `rule` at `site`. Returns false, without touching
    /// anything, when the guard does not hold there.
    bool apply(RuleId rule, Vertex site) {
        if (site >= g_.vertex_count()) throw Error("rule site " + std::to_string(site) + " out of range");
        if (!alive_[site]) return false;
        bool done = false;
        switch (rule) {
            case RuleId::Deg1a: done = deg1a(site); break;
            case RuleId::Deg1b: done = deg1b(site); break;
            case RuleId::Tri: done = tri(site); break;
            case RuleId::Deg2a: done = deg2a(site); break;
            case RuleId::Deg2b: done = deg2b(site); break;
            case RuleId::Deg2c: done = deg2c(site); break;
            case RuleId::OnlyN: done = only_n(site); break;
            case RuleId::Isol: done = isol(site); break;
            case RuleId::ObsNP: done = obs_np(site); break;
            case RuleId::ObsE: done = obs_e(site); break;
            case RuleId::Dom: done = dom_at(site); break;
            case RuleId::NecN: done = necn_at(site); break;
        }
        if (done) ++stats_.applied[static_cast<std::size_t>(rule)];
        return done;
    }

    /// Deg1a, Deg1b and Deg2a over a depth-first post-order of every component.
    bool initial_pass() {
        const std::size_t n = g_.vertex_count();
        std::vector<std::uint8_t> seen(n, 0);
        VertexList order;
        std::vector<std::pair<Vertex, std::size_t>> stack;
        for (Vertex root = 0; root < n; ++root) {
            if (seen[root] || !alive_[root]) continue;
            seen[root] = 1;
            stack.emplace_back(root, 0);
            while (!stack.empty()) {
                auto& [v, next] = stack.back();
                const auto nb = g_.neighbors(v);
                if (next < nb.size()) {
                    const Vertex u = nb[next++];
                    if (!seen[u]) {
                        seen[u] = 1;
                        stack.emplace_back(u, 0);
                    }
                } else {
                    order.push_back(v);
                    stack.pop_back();
                }
            }
        }
        bool changed = false;
        for (Vertex v : order) {
            changed |= apply(RuleId::Deg1a, v);
            changed |= apply(RuleId::Deg1b, v);
            changed |= apply(RuleId::Deg2a, v);
        }
        return changed;
    }

    /// Sweeps all vertices in ascending order, trying the local rules in
    /// their fixed order at each, until a full sweep changes nothing.
    bool local_exhaustive() {
        bool any = false;
        bool changed = true;
        while (changed) {
            changed = false;
            for (Vertex v = 0; v < g_.vertex_count(); ++v) {
                if (!alive_[v]) continue;
                for (RuleId r : kLocalRules)
                    if (alive_[v] && apply(r, v)) changed = true;
            }
            any |= changed;
        }
        return any;
    }

    /// Dom once over all ordered pairs (v, w) of undecided vertices.
    bool dom() {
        Compact c = compact();
        const PdsInstance& k = c.inst;
        ObservationState state(k, std::span<const Vertex>(k.pre_selected()));
        std::vector<std::uint8_t> undecided(k.vertex_count(), 0);
        for (Vertex v = 0; v < k.vertex_count(); ++v) undecided[v] = k.is_undecided(v);

        auto covered = [&](Vertex w) {
            if (!state.is_observed(w)) return false;
            for (Vertex u : k.neighbors(w))
                if (!state.is_observed(u)) return false;
            return true;
        };
        VertexList always;
        for (Vertex w = 0; w < k.vertex_count(); ++w)
            if (undecided[w] && covered(w)) always.push_back(w);

        bool changed = false;
        auto exclude = [&](Vertex w) {
            undecided[w] = 0;
            set_excluded(c.to_original[w], RuleId::Dom);
            ++stats_.applied[static_cast<std::size_t>(RuleId::Dom)];
            changed = true;
        };
        VertexList before;
        VertexList candidates;
        for (Vertex v = 0; v < k.vertex_count(); ++v) {
            if (!undecided[v]) continue;
            for (Vertex w : always)
                if (w != v && undecided[w]) exclude(w);
            before = state.observed_set();
            state.select(v);
            candidates.clear();
            std::vector<std::uint8_t> was(k.vertex_count(), 0);
            for (Vertex u : before) was[u] = 1;
            for (Vertex u = 0; u < k.vertex_count(); ++u) {
                if (!state.is_observed(u) || was[u]) continue;
                candidates.push_back(u);
                for (Vertex w : k.neighbors(u)) candidates.push_back(w);
            }
            std::sort(candidates.begin(), candidates.end());
            candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
            for (Vertex w : candidates)
                if (w != v && undecided[w] && covered(w)) exclude(w);
            state.deselect(v);
        }
        return changed;
    }

    /// NecN once for every undecided vertex, in ascending order.
    bool necn() {
        Compact c = compact();
        const PdsInstance& k = c.inst;
        VertexList sel = k.pre_selected();
        const VertexList free = k.undecided();
        sel.insert(sel.end(), free.begin(), free.end());
        ObservationState state(k, std::span<const Vertex>(sel));
        if (!state.all_observed()) return false;
        bool changed = false;
        for (Vertex v : free) {
            state.deselect(v);
            const bool needed = !state.all_observed();
            state.select(v);
            if (needed) {
                set_selected(c.to_original[v], RuleId::NecN);
                ++stats_.applied[static_cast<std::size_t>(RuleId::NecN)];
                changed = true;
            }
        }
        return changed;
    }

    /// The driver: initial post-order pass, then {local; Dom; NecN} until a
    /// full cycle changes nothing.
    void run(RuleSelection sel) {
        if (sel.local) initial_pass();
        bool changed = sel.any();
        while (changed) {
            changed = false;
            if (sel.local) changed |= local_exhaustive();
            if (sel.dom) changed |= dom();
            if (sel.necn) changed |= necn();
        }
    }

    /// Compacted kernel; fills the id map of the log.
    ReductionResult finish() const {
        Compact c = compact();
        ReductionResult r{std::move(c.inst), log_, stats_};
        r.log.kernel_to_original = std::move(c.to_original);
        std::sort(r.log.forced.begin(), r.log.forced.end());
        r.log.forced.erase(std::unique(r.log.forced.begin(), r.log.forced.end()), r.log.forced.end());
        r.stats.kernel_vertices = r.kernel.vertex_count();
        r.stats.kernel_edges = r.kernel.edge_count();
        r.stats.kernel_pre_selected = r.kernel.count(Decision::Selected);
        r.stats.kernel_excluded = r.kernel.count(Decision::Excluded);
        return r;
    }

private:
    struct Compact {
        PdsInstance inst;
        VertexList to_original;
    };

    Compact compact() const {
        Compact c;
        VertexList index(g_.vertex_count(), kNoVertex);
        for (Vertex v = 0; v < g_.vertex_count(); ++v)
            if (alive_[v]) {
                index[v] = static_cast<Vertex>(c.to_original.size());
                c.to_original.push_back(v);
            }
        c.inst = PdsInstance(c.to_original.size());
        for (Vertex i = 0; i < c.to_original.size(); ++i) {
            const Vertex v = c.to_original[i];
            c.inst.set_propagating(i, g_.is_propagating(v));
            c.inst.set_decision(i, g_.decision(v));
            if (g_.has_labels()) c.inst.set_label(i, g_.label(v));
            for (Vertex u : g_.neighbors(v))
                if (u > v) c.inst.add_edge(i, index[u]);
        }
        return c;
    }

    void refresh_observed() {
        if (!obs_dirty_) return;
        const VertexList x = g_.pre_selected();
        ObservationState state(g_, std::span<const Vertex>(x));
        const std::size_t n = g_.vertex_count();
        obs_.assign(n, 0);
        root_.assign(n, kNoVertex);
        for (Vertex v = 0; v < n; ++v) obs_[v] = state.is_observed(v);
        // Each observed vertex traces its witness chain back to a vertex of X.
        VertexList chain;
        for (Vertex v = 0; v < n; ++v) {
            if (!obs_[v] || root_[v] != kNoVertex) continue;
            Vertex cur = v;
            chain.clear();
            while (root_[cur] == kNoVertex) {
                const Witness& w = state.witness(cur);
                if (w.kind == Witness::Kind::SelectedSelf) {
                    root_[cur] = cur;
                    break;
                }
                chain.push_back(cur);
                cur = w.source;
            }
            for (Vertex u : chain) root_[u] = root_[cur];
        }
        obs_dirty_ = false;
    }

    void record(RuleId r, EventKind k, Vertex u, Vertex v = kNoVertex) { log_.events.push_back({r, k, u, v}); }

    void set_excluded(Vertex v, RuleId r) {
        g_.set_decision(v, Decision::Excluded);
        record(r, EventKind::Exclude, v);
    }

    void set_selected(Vertex v, RuleId r) {
        g_.set_decision(v, Decision::Selected);
        record(r, EventKind::Select, v);
        log_.forced.push_back(v);
        obs_dirty_ = true;
    }

    void delete_vertex(Vertex v, RuleId r) {
        const VertexList nb(g_.neighbors(v).begin(), g_.neighbors(v).end());
        for (Vertex u : nb) g_.remove_edge(v, u);
        alive_[v] = 0;
        record(r, EventKind::DeleteVertex, v);
    }

    void delete_edge(Vertex u, Vertex v, RuleId r) {
        g_.remove_edge(u, v);
        record(r, EventKind::DeleteEdge, u, v);
    }

    void add_edge(Vertex u, Vertex v, RuleId r) {
        if (g_.add_edge(u, v)) record(r, EventKind::AddEdge, u, v);
    }

    Vertex other_neighbor(Vertex v, Vertex not_this) const {
        for (Vertex u : g_.neighbors(v))
            if (u != not_this) return u;
        return kNoVertex;
    }

    bool deg1a(Vertex v) {
        if (!g_.is_undecided(v) || g_.degree(v) != 1) return false;
        if (g_.is_excluded(g_.neighbors(v)[0])) return false;
        set_excluded(v, RuleId::Deg1a);
        return true;
    }

    bool deg1b(Vertex v) {
        if (!g_.is_excluded(v) || g_.degree(v) != 1) return false;
        const Vertex w = g_.neighbors(v)[0];
        if (g_.is_propagating(w)) {
            delete_vertex(v, RuleId::Deg1b);
            g_.set_propagating(w, false);
            record(RuleId::Deg1b, EventKind::SetNonPropagating, w);
            return true;
        }
        if (g_.is_excluded(w)) return false;
        delete_vertex(v, RuleId::Deg1b);
        if (g_.is_undecided(w)) set_selected(w, RuleId::Deg1b);
        return true;
    }

    bool tri(Vertex x) {
        if (g_.degree(x) != 2 || g_.is_pre_selected(x)) return false;
        const Vertex p = g_.neighbors(x)[0];
        const Vertex q = g_.neighbors(x)[1];
        if (!g_.has_edge(p, q)) return false;
        for (auto [y, z] : {std::pair{p, q}, std::pair{q, p}}) {
            if (g_.degree(y) != 2 || g_.is_pre_selected(y) || !g_.is_undecided(z)) continue;
            set_selected(z, RuleId::Tri);
            delete_vertex(x, RuleId::Tri);
            delete_vertex(y, RuleId::Tri);
            return true;
        }
        return false;
    }

    bool deg2a(Vertex v) {
        if (!g_.is_undecided(v) || !g_.is_propagating(v) || g_.degree(v) != 2) return false;
        const Vertex x = g_.neighbors(v)[0];
        const Vertex y = g_.neighbors(v)[1];
        if (g_.has_edge(x, y) || (g_.is_excluded(x) && g_.is_excluded(y))) return false;
        set_excluded(v, RuleId::Deg2a);
        return true;
    }

    bool deg2b(Vertex v) {
        if (!g_.is_excluded(v) || !g_.is_propagating(v) || g_.degree(v) != 2) return false;
        const Vertex x = g_.neighbors(v)[0];
        const Vertex y = g_.neighbors(v)[1];
        if (g_.has_edge(x, y)) return false;
        auto chain = [&](Vertex u) { return g_.is_propagating(u) && g_.degree(u) == 2; };
        if (!chain(x) && !chain(y)) return false;
        delete_vertex(v, RuleId::Deg2b);
        add_edge(x, y, RuleId::Deg2b);
        obs_dirty_ = true;
        return true;
    }

    bool deg2c(Vertex v) {
        if (!g_.is_excluded(v) || !g_.is_propagating(v)) return false;
        refresh_observed();
        if (!obs_[v]) return false;
        Vertex a = kNoVertex, b = kNoVertex;
        for (Vertex u : g_.neighbors(v)) {
            if (obs_[u]) continue;
            if (a == kNoVertex)
                a = u;
            else if (b == kNoVertex)
                b = u;
            else
                return false;
        }
        if (b == kNoVertex) return false;
        for (Vertex u : {a, b})
            if (g_.degree(u) != 2 || !g_.is_propagating(u)) return false;
        if (g_.has_edge(a, b)) return false;
        for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
            if (!g_.is_excluded(y)) continue;
            const Vertex z = other_neighbor(y, v);
            if (g_.has_edge(x, z)) continue;
            delete_vertex(y, RuleId::Deg2c);
            delete_edge(x, v, RuleId::Deg2c);
            add_edge(x, z, RuleId::Deg2c);
            obs_dirty_ = true;
            return true;
        }
        return false;
    }

    bool only_n(Vertex v) {
        if (!g_.is_excluded(v) || !g_.is_propagating(v) || g_.degree(v) != 2) return false;
        const Vertex a = g_.neighbors(v)[0];
        const Vertex b = g_.neighbors(v)[1];
        if (g_.is_propagating(a) || g_.is_propagating(b)) return false;
        for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
            if (g_.is_excluded(x) && g_.is_undecided(y)) {
                set_selected(y, RuleId::OnlyN);
                return true;
            }
        }
        return false;
    }

    bool isol(Vertex v) {
        if (!g_.is_undecided(v) || g_.degree(v) != 0) return false;
        set_selected(v, RuleId::Isol);
        return true;
    }

    bool obs_np(Vertex v) {
        if (!g_.is_excluded(v) || g_.is_propagating(v)) return false;
        refresh_observed();
        if (!obs_[v]) return false;
        delete_vertex(v, RuleId::ObsNP);
        return true;
    }

    bool obs_e(Vertex v) {
        if (g_.is_pre_selected(v)) return false;
        refresh_observed();
        if (!obs_[v]) return false;
        for (Vertex w : g_.neighbors(v)) {
            if (!obs_[w] || g_.is_pre_selected(w)) continue;
            const Vertex x = root_[v];
            delete_edge(v, w, RuleId::ObsE);
            add_edge(v, x, RuleId::ObsE);
            add_edge(w, x, RuleId::ObsE);
            return true;
        }
        return false;
    }

    bool dom_at(Vertex w) {
        if (!g_.is_undecided(w)) return false;
        VertexList closed(g_.neighbors(w).begin(), g_.neighbors(w).end());
        closed.push_back(w);
        const VertexList x = g_.pre_selected();
        ObservationState state(g_, std::span<const Vertex>(x));
        for (Vertex v = 0; v < g_.vertex_count(); ++v) {
            if (v == w || !alive_[v] || !g_.is_undecided(v)) continue;
            state.select(v);
            const bool contained =
                std::all_of(closed.begin(), closed.end(), [&](Vertex u) { return state.is_observed(u); });
            state.deselect(v);
            if (contained) {
                set_excluded(w, RuleId::Dom);
                return true;
            }
        }
        return false;
    }

    bool necn_at(Vertex v) {
        if (!g_.is_undecided(v)) return false;
        VertexList sel;
        for (Vertex u = 0; u < g_.vertex_count(); ++u)
            if (alive_[u] && u != v && !g_.is_excluded(u)) sel.push_back(u);
        ObservationState state(g_, std::span<const Vertex>(sel));
        for (Vertex u = 0; u < g_.vertex_count(); ++u)
            if (alive_[u] && !state.is_observed(u)) {
                set_selected(v, RuleId::NecN);
                return true;
            }
        return false;
    }

    PdsInstance g_;
    std::vector<std::uint8_t> alive_;
    std::vector<std::uint8_t> obs_;
    VertexList root_;
    bool obs_dirty_ = true;
    ReductionLog log_;
    ReductionStats stats_;
};

/// Applies `rule` once at `site`; the kernel keeps only surviving vertices.
struct RuleApplication {
    bool changed = false;
    ReductionResult result;
};

inline RuleApplication apply_rule_once(const PdsInstance& inst, RuleId rule, Vertex site) {
    Reducer r(inst);
    const bool changed = r.apply(rule, site);
    return {changed, r.finish()};
}

inline ReductionResult apply_local_exhaustive(const PdsInstance& inst) {
    Reducer r(inst);
    r.local_exhaustive();
    return r.finish();
}

inline ReductionResult apply_nonlocal(const PdsInstance& inst, RuleId rule) {
    if (is_local(rule)) throw Error("apply_nonlocal expects Dom or NecN");
    Reducer r(inst);
    if (rule == RuleId::Dom)
        r.dom();
    else
        r.necn();
    return r.finish();
}

inline ReductionResult reduce_full(const PdsInstance& inst, RuleSelection sel = {}) {
    Reducer r(inst);
    r.run(sel);
    return r.finish();
}

/// Maps a kernel solution back to original ids and adds every vertex that
/// was pre-selected originally or selected by a rule.
inline SolutionSet lift_solution(const ReductionLog& log, const SolutionSet& kernel_solution) {
    VertexList out = log.forced;
    for (Vertex v : kernel_solution.selected) {
        if (v >= log.kernel_to_original.size()) throw Error("kernel vertex " + std::to_string(v) + " out of range");
        out.push_back(log.kernel_to_original[v]);
    }
    return SolutionSet(std::move(out));
}

} // namespace pds
