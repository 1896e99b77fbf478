#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <deque>
#include <vector>

#include "pds/instance.hpp"

namespace pds {

template <typename G>
concept ObservableGraph = requires(const G& g, Vertex v) {
    { g.vertex_count() } -> std::convertible_to<std::size_t>;
    { g.is_propagating(v) } -> std::convertible_to<bool>;
    g.neighbors(v);
};

/// Why a vertex is observed.
struct Witness {
    enum class Kind : std::uint8_t { None, SelectedSelf, Dominated, Propagated };
    Kind kind = Kind::None;
    Vertex source = kNoVertex;

    friend bool operator==(const Witness&, const Witness&) = default;
};

/// Observed set of a dynamic selection under the domination and propagation
/// rules, maintained incrementally.
///
/// Each observed vertex keeps one witness. A propagating vertex w that has
/// fired records its target in propagated_to(w); the firing depended on every
/// other neighbor of w being observed, so invalidating any vertex of N[w]
/// also invalidates that target. Deselection uses this to retract exactly the
/// vertices whose justification passed through the removed vertex and then
/// re-propagates from the surviving boundary.
///
/// The graph must outlive the state and must not change while it is in use.
template <ObservableGraph G = PdsInstance>
class ObservationState {
public:
    explicit ObservationState(const G& graph)
        : graph_(&graph),
          selected_(graph.vertex_count(), 0),
          observed_(graph.vertex_count(), 0),
          witness_(graph.vertex_count()),
          propagated_to_(graph.vertex_count(), kNoVertex),
          unobserved_degree_(graph.vertex_count(), 0) {
        for (Vertex v = 0; v < graph.vertex_count(); ++v)
            unobserved_degree_[v] = static_cast<std::uint32_t>(std::size(graph.neighbors(v)));
    }

    ObservationState(const G& graph, std::span<const Vertex> selection) : ObservationState(graph) {
        for (Vertex v : selection)
            if (!selected_[v]) mark_selected(v);
        run_worklist();
    }

    const G& graph() const { return *graph_; }
    std::size_t vertex_count() const { return observed_.size(); }

    bool is_selected(Vertex v) const { return selected_[v] != 0; }
    bool is_observed(Vertex v) const { return observed_[v] != 0; }
    std::size_t observed_count() const { return observed_count_; }
    std::size_t selected_count() const { return selected_count_; }
    bool all_observed() const { return observed_count_ == observed_.size(); }
    const Witness& witness(Vertex v) const { return witness_[v]; }
    Vertex propagated_to(Vertex v) const { return propagated_to_[v]; }
    std::uint32_t unobserved_degree(Vertex v) const { return unobserved_degree_[v]; }

    VertexList observed_set() const { return collect(1); }
    VertexList unobserved_set() const { return collect(0); }
    VertexList selected_set() const {
        VertexList out;
        for (Vertex v = 0; v < selected_.size(); ++v)
            if (selected_[v]) out.push_back(v);
        return out;
    }

    void select(Vertex v) {
        if (selected_[v]) throw Error("vertex " + std::to_string(v) + " already selected");
        mark_selected(v);
        run_worklist();
    }

    void deselect(Vertex v) {
        if (!selected_[v]) throw Error("vertex " + std::to_string(v) + " not selected");
        selected_[v] = 0;
        --selected_count_;

        invalid_.clear();
        auto retract_if = [&](Vertex u, Witness::Kind kind) {
            if (observed_[u] && witness_[u].kind == kind && witness_[u].source == v) retract(u);
        };
        retract_if(v, Witness::Kind::SelectedSelf);
        for (Vertex u : graph_->neighbors(v)) retract_if(u, Witness::Kind::Dominated);

        // Everything whose justification depended on a retracted vertex.
        for (std::size_t i = 0; i < invalid_.size(); ++i) {
            const Vertex z = invalid_[i];
            if (Vertex t = propagated_to_[z]; t != kNoVertex) {
                propagated_to_[z] = kNoVertex;
                if (observed_[t]) retract(t);
            }
            for (Vertex w : graph_->neighbors(z)) {
                const Vertex t = propagated_to_[w];
                if (t != kNoVertex && t != z) {
                    propagated_to_[w] = kNoVertex;
                    if (observed_[t]) retract(t);
                }
            }
        }

        for (Vertex z : invalid_) {
            if (observed_[z]) continue;
            if (selected_[z]) {
                observe(z, {Witness::Kind::SelectedSelf, z});
                continue;
            }
            for (Vertex s : graph_->neighbors(z)) {
                if (selected_[s]) {
                    observe(z, {Witness::Kind::Dominated, s});
                    break;
                }
            }
        }
        for (Vertex z : invalid_)
            for (Vertex w : graph_->neighbors(z)) enqueue_if_ready(w);
        run_worklist();
    }

private:
    VertexList collect(std::uint8_t flag) const {
        VertexList out;
        for (Vertex v = 0; v < observed_.size(); ++v)
            if (observed_[v] == flag) out.push_back(v);
        return out;
    }

    void mark_selected(Vertex v) {
        selected_[v] = 1;
        ++selected_count_;
        if (!observed_[v])
            observe(v, {Witness::Kind::SelectedSelf, v});
        else if (witness_[v].kind != Witness::Kind::SelectedSelf)
            rebase_selected(v);
        for (Vertex u : graph_->neighbors(v))
            if (!observed_[u]) observe(u, {Witness::Kind::Dominated, v});
    }

    // A selected vertex is its own witness; an older propagation into v
    // no longer justifies it.
    void rebase_selected(Vertex v) {
        if (witness_[v].kind == Witness::Kind::Propagated) {
            const Vertex from = witness_[v].source;
            if (propagated_to_[from] == v) propagated_to_[from] = kNoVertex;
        }
        witness_[v] = {Witness::Kind::SelectedSelf, v};
    }

    void observe(Vertex v, Witness w) {
        observed_[v] = 1;
        ++observed_count_;
        witness_[v] = w;
        enqueue_if_ready(v);
        for (Vertex u : graph_->neighbors(v)) {
            --unobserved_degree_[u];
            enqueue_if_ready(u);
        }
    }

    void retract(Vertex v) {
        observed_[v] = 0;
        --observed_count_;
        if (witness_[v].kind == Witness::Kind::Propagated) {
            const Vertex from = witness_[v].source;
            if (propagated_to_[from] == v) propagated_to_[from] = kNoVertex;
        }
        witness_[v] = {};
        for (Vertex u : graph_->neighbors(v)) ++unobserved_degree_[u];
        invalid_.push_back(v);
    }

    void enqueue_if_ready(Vertex w) {
        if (observed_[w] && unobserved_degree_[w] == 1 && graph_->is_propagating(w)) queue_.push_back(w);
    }

    void run_worklist() {
        while (!queue_.empty()) {
            const Vertex w = queue_.front();
            queue_.pop_front();
            if (!observed_[w] || unobserved_degree_[w] != 1 || !graph_->is_propagating(w)) continue;
            for (Vertex u : graph_->neighbors(w)) {
                if (!observed_[u]) {
                    propagated_to_[w] = u;
                    observe(u, {Witness::Kind::Propagated, w});
                    break;
                }
            }
        }
    }

    const G* graph_;
    std::vector<std::uint8_t> selected_;
    std::vector<std::uint8_t> observed_;
    std::vector<Witness> witness_;
    std::vector<Vertex> propagated_to_;
    std::vector<std::uint32_t> unobserved_degree_;
    std::deque<Vertex> queue_;
    VertexList invalid_;
    std::size_t observed_count_ = 0;
    std::size_t selected_count_ = 0;
};

/// Observed set for a fixed selection.
template <ObservableGraph G>
ObservationState<G> observe_from(const G& graph, std::span<const Vertex> selection) {
    return ObservationState<G>(graph, selection);
}

/// Vertices observed when selecting `extra` together with all pre-selected
/// vertices of the instance.
inline VertexList observation_neighborhood(const PdsInstance& inst, std::span<const Vertex> extra) {
    VertexList sel = inst.pre_selected();
    sel.insert(sel.end(), extra.begin(), extra.end());
    std::sort(sel.begin(), sel.end());
    sel.erase(std::unique(sel.begin(), sel.end()), sel.end());
    return observe_from(inst, sel).observed_set();
}

/// True iff `selection` observes every vertex.
template <ObservableGraph G>
bool is_power_dominating(const G& graph, std::span<const Vertex> selection) {
    return observe_from(graph, selection).all_observed();
}

} // namespace pds
