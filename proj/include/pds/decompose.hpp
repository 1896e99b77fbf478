#pragma once

#include <algorithm>
#include <vector>

#include "pds/instance.hpp"
#include "pds/propagation.hpp"

namespace pds {

/// One connected component C of G[V \ X] together with the instance induced
/// on N[C].
struct Subinstance {
    PdsInstance instance;
    VertexList to_parent;  // subinstance id -> parent id
    VertexList component;  // C in parent ids, sorted
    std::vector<std::uint8_t> in_component;  // per subinstance id
};

struct Decomposition {
    std::size_t parent_vertex_count = 0;
    VertexList pre_selected;  // X of the parent
    std::vector<Subinstance> parts;
};

/// Splits along the pre-selected vertices: components are found by a search
/// that never continues through a vertex of X.
inline Decomposition split(const PdsInstance& inst) {
    const std::size_t n = inst.vertex_count();
    Decomposition d;
    d.parent_vertex_count = n;
    d.pre_selected = inst.pre_selected();

    std::vector<std::uint8_t> seen(n, 0);
    VertexList local(n, kNoVertex);
    VertexList stack;
    for (Vertex root = 0; root < n; ++root) {
        if (seen[root] || inst.is_pre_selected(root)) continue;
        VertexList comp;
        seen[root] = 1;
        stack.push_back(root);
        while (!stack.empty()) {
            const Vertex v = stack.back();
            stack.pop_back();
            comp.push_back(v);
            for (Vertex u : inst.neighbors(v))
                if (!seen[u] && !inst.is_pre_selected(u)) {
                    seen[u] = 1;
                    stack.push_back(u);
                }
        }
        std::sort(comp.begin(), comp.end());

        VertexList members = comp;
        for (Vertex v : comp)
            for (Vertex u : inst.neighbors(v))
                if (inst.is_pre_selected(u)) members.push_back(u);
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());

        Subinstance sub;
        sub.instance = PdsInstance(members.size());
        sub.in_component.assign(members.size(), 0);
        for (Vertex i = 0; i < members.size(); ++i) local[members[i]] = i;
        for (Vertex i = 0; i < members.size(); ++i) {
            const Vertex v = members[i];
            sub.instance.set_propagating(i, inst.is_propagating(v));
            sub.instance.set_decision(i, inst.decision(v));
            if (inst.has_labels()) sub.instance.set_label(i, inst.label(v));
            sub.in_component[i] = !inst.is_pre_selected(v);
            for (Vertex u : inst.neighbors(v))
                if (u > v && local[u] != kNoVertex) sub.instance.add_edge(i, local[u]);
        }
        for (Vertex v : members) local[v] = kNoVertex;
        sub.to_parent = std::move(members);
        sub.component = std::move(comp);
        d.parts.push_back(std::move(sub));
    }
    return d;
}

/// Union of the parts restricted to their components, plus X.
inline SolutionSet merge_solutions(const Decomposition& d, const std::vector<SolutionSet>& parts) {
    if (parts.size() != d.parts.size()) throw Error("merge_solutions: wrong number of parts");
    VertexList out = d.pre_selected;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const Subinstance& sub = d.parts[i];
        VertexList sel = sub.instance.pre_selected();
        sel.insert(sel.end(), parts[i].selected.begin(), parts[i].selected.end());
        if (!is_power_dominating(sub.instance, std::span<const Vertex>(sel)))
            throw Error("merge_solutions: part " + std::to_string(i) + " is not feasible");
        for (Vertex v : parts[i].selected)
            if (sub.in_component[v]) out.push_back(sub.to_parent[v]);
    }
    return SolutionSet(std::move(out));
}

} // namespace pds
