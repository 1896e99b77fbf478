#pragma once

// Reduction chain from weighted monotone circuit satisfiability to PDS:
// circuit -> extension IPDS -> IPDS -> IPDS without arcs -> PDS -> simple PDS.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pds/instance.hpp"
#include "pds/ipds.hpp"
#include "pds/rng.hpp"

namespace pds {

enum class GateKind : std::uint8_t { Input, And, Or, Output };

struct Gate {
    GateKind kind;
    std::string name;
    std::vector<std::uint32_t> children;  // gates feeding this one
};

/// Monotone circuit as a DAG of gates in topological order. The output gate
/// behaves like an or-gate over its children.
class Circuit {
public:
    const std::vector<Gate>& gates() const { return gates_; }
    std::size_t size() const { return gates_.size(); }
    const Gate& gate(std::uint32_t i) const { return gates_[i]; }

    std::vector<std::uint32_t> inputs() const {
        std::vector<std::uint32_t> out;
        for (std::uint32_t i = 0; i < gates_.size(); ++i)
            if (gates_[i].kind == GateKind::Input) out.push_back(i);
        return out;
    }

    std::uint32_t output() const {
        for (std::uint32_t i = 0; i < gates_.size(); ++i)
            if (gates_[i].kind == GateKind::Output) return i;
        throw Error("circuit has no output gate");
    }

    std::uint32_t add(GateKind kind, std::string name, std::vector<std::uint32_t> children = {}) {
        if (index_.count(name)) throw Error("duplicate gate name '" + name + "'");
        for (auto c : children)
            if (c >= gates_.size()) throw Error("gate '" + name + "' refers to an undeclared child");
        std::sort(children.begin(), children.end());
        if (std::adjacent_find(children.begin(), children.end()) != children.end())
            throw Error("gate '" + name + "' lists a child twice");
        if (kind == GateKind::Input && !children.empty()) throw Error("input '" + name + "' has children");
        if (kind != GateKind::Input && children.empty()) throw Error("gate '" + name + "' has no inputs");
        for (auto c : children)
            if (gates_[c].kind == GateKind::Output) throw Error("output gate used as a child");
        if (kind == GateKind::Output)
            for (const auto& g : gates_)
                if (g.kind == GateKind::Output) throw Error("circuit has two output gates");
        index_[name] = static_cast<std::uint32_t>(gates_.size());
        gates_.push_back({kind, std::move(name), std::move(children)});
        return static_cast<std::uint32_t>(gates_.size() - 1);
    }

    std::uint32_t find(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw Error("unknown gate '" + name + "'");
        return it->second;
    }

    /// Exactly one output, and every gate reaches it.
    void validate() const {
        const std::uint32_t out = output();
        std::vector<std::uint8_t> reach(gates_.size(), 0);
        reach[out] = 1;
        for (std::uint32_t i = out + 1; i-- > 0;)
            if (reach[i])
                for (auto c : gates_[i].children) reach[c] = 1;
        for (std::uint32_t i = 0; i < gates_.size(); ++i)
            if (!reach[i]) throw Error("gate '" + gates_[i].name + "' does not reach the output");
    }

private:
    std::vector<Gate> gates_;
    std::map<std::string, std::uint32_t> index_;
};

inline Circuit parse_circuit(std::istream& in) {
    Circuit c;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const auto tok = detail::split_ws(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (tok.empty()) continue;
        if (tok.size() < 2) throw ParseError(lineno, "expected '<kind> <name> ...'");
        GateKind kind;
        if (tok[0] == "in")
            kind = GateKind::Input;
        else if (tok[0] == "and")
            kind = GateKind::And;
        else if (tok[0] == "or")
            kind = GateKind::Or;
        else if (tok[0] == "out")
            kind = GateKind::Output;
        else
            throw ParseError(lineno, "unknown gate kind '" + tok[0] + "'");
        try {
            std::vector<std::uint32_t> children;
            for (std::size_t i = 2; i < tok.size(); ++i) children.push_back(c.find(tok[i]));
            c.add(kind, tok[1], std::move(children));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(lineno, e.what());
        }
    }
    try {
        c.validate();
    } catch (const Error& e) {
        throw ParseError(lineno, e.what());
    }
    return c;
}

inline Circuit parse_circuit(const std::string& text) {
    std::istringstream in(text);
    return parse_circuit(in);
}

inline std::string write_circuit(const Circuit& c) {
    std::ostringstream out;
    for (const auto& g : c.gates()) {
        switch (g.kind) {
        case GateKind::Input: out << "in"; break;
        case GateKind::And: out << "and"; break;
        case GateKind::Or: out << "or"; break;
        case GateKind::Output: out << "out"; break;
        }
        out << ' ' << g.name;
        for (auto ch : g.children) out << ' ' << c.gate(ch).name;
        out << '\n';
    }
    return out.str();
}

/// Monotone evaluation; `true_inputs` holds gate indices of inputs.
inline bool eval_circuit(const Circuit& c, std::span<const std::uint32_t> true_inputs) {
    std::vector<std::uint8_t> val(c.size(), 0);
    for (auto i : true_inputs) {
        if (i >= c.size() || c.gate(i).kind != GateKind::Input) throw Error("true input is not an input gate");
        val[i] = 1;
    }
    for (std::uint32_t i = 0; i < c.size(); ++i) {
        const Gate& g = c.gate(i);
        if (g.kind == GateKind::Input) continue;
        auto on = [&](std::uint32_t ch) { return val[ch] != 0; };
        val[i] = g.kind == GateKind::And ? std::all_of(g.children.begin(), g.children.end(), on)
                                         : std::any_of(g.children.begin(), g.children.end(), on);
    }
    return val[c.output()] != 0;
}

/// Minimum number of true inputs satisfying the circuit, by enumeration in
/// increasing weight.
inline std::optional<std::size_t> wmcs_min_weight(const Circuit& c, std::optional<std::size_t> k_max = std::nullopt) {
    const auto in = c.inputs();
    if (in.size() > 25) throw Error("circuit has too many inputs for enumeration");
    const std::size_t limit = std::min(k_max.value_or(in.size()), in.size());
    std::vector<std::uint32_t> pick;
    for (std::size_t k = 0; k <= limit; ++k) {
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            pick.clear();
            for (auto i : idx) pick.push_back(in[i]);
            if (eval_circuit(c, pick)) return k;
            std::size_t i = k;
            while (i > 0 && idx[i - 1] == in.size() - k + i - 1) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return std::nullopt;
}

/// Random monotone circuit: gates in topological order with one to three
/// earlier children each; the output collects every gate nobody reads.
inline Circuit random_circuit(std::size_t inputs, std::size_t gates, std::uint64_t seed) {
    if (inputs == 0) throw Error("circuit needs at least one input");
    Rng rng(seed);
    Circuit c;
    for (std::size_t i = 0; i < inputs; ++i) c.add(GateKind::Input, "x" + std::to_string(i + 1));
    std::vector<std::uint8_t> read(inputs, 0);
    for (std::size_t g = 0; g < gates; ++g) {
        const std::size_t avail = c.size();
        const std::size_t want = std::min<std::size_t>(avail, 1 + rng.below(3));
        std::vector<std::uint32_t> all(avail);
        for (std::uint32_t i = 0; i < avail; ++i) all[i] = i;
        rng.shuffle(std::span<std::uint32_t>(all));
        all.resize(want);
        for (auto ch : all) read[ch] = 1;
        const GateKind kind = rng.below(2) ? GateKind::And : GateKind::Or;
        c.add(kind, (kind == GateKind::And ? "a" : "o") + std::to_string(g + 1), std::move(all));
        read.push_back(0);
    }
    std::vector<std::uint32_t> sinks;
    for (std::uint32_t i = 0; i < c.size(); ++i)
        if (!read[i]) sinks.push_back(i);
    c.add(GateKind::Output, "out", std::move(sinks));
    return c;
}

enum class Role : std::uint8_t {
    Original,      // vertex carried over unchanged
    CircuitGate,   // input, or-gate or output of the circuit
    GateIn,        // and-gate input vertex
    GateOut,       // and-gate output vertex
    Proxy,         // proxy input of an and-gate
    Copy,          // vertex of a copy in the exclusion construction
    Clique,        // selectable vertex of the top clique
    ForcingLeaf,   // leaf forcing a pre-selected vertex or the booster vertex
    Implication,   // interior of an implication gadget
    Subdivision,   // vertex splitting a booster edge
    BoosterHub,    // the global vertex b
    SimpleLeaf,    // leaf standing in for a non-propagating vertex
};

inline const char* role_name(Role r) {
    switch (r) {
    case Role::Original: return "original";
    case Role::CircuitGate: return "gate";
    case Role::GateIn: return "and-in";
    case Role::GateOut: return "and-out";
    case Role::Proxy: return "proxy";
    case Role::Copy: return "copy";
    case Role::Clique: return "clique";
    case Role::ForcingLeaf: return "forcing-leaf";
    case Role::Implication: return "implication";
    case Role::Subdivision: return "subdivision";
    case Role::BoosterHub: return "booster-hub";
    case Role::SimpleLeaf: return "simple-leaf";
    }
    return "?";
}

/// Where an output vertex came from: its role and the vertex (or gate) of
/// the input it belongs to; `copy` numbers the copy in the exclusion step.
struct Origin {
    Role role = Role::Original;
    std::uint32_t source = kNoVertex;
    std::uint32_t copy = 0;
};

struct Transform {
    IpdsInstance instance;
    int parameter_shift = 0;
    std::vector<Origin> origin;  // one per output vertex
};

namespace detail {

inline std::vector<Origin> identity_origin(std::size_t n) {
    std::vector<Origin> o(n);
    for (std::uint32_t v = 0; v < n; ++v) o[v] = {Role::Original, v, 0};
    return o;
}

inline Vertex add_tracked(Transform& t, Origin o, bool propagating = true) {
    t.origin.push_back(o);
    return t.instance.graph().add_vertex(propagating);
}

} // namespace detail

/// Circuit gates become vertices, circuit wires become implication arcs,
/// and-gates become an edge xy fed by proxy inputs, and the output implies
/// every input. Only circuit inputs may be selected.
inline Transform wmcs_to_ipds_ext(const Circuit& c) {
    c.validate();
    Transform t;
    std::vector<Vertex> in_v(c.size()), out_v(c.size());
    for (std::uint32_t i = 0; i < c.size(); ++i) {
        if (c.gate(i).kind == GateKind::And) {
            in_v[i] = detail::add_tracked(t, {Role::GateIn, i, 0});
            out_v[i] = detail::add_tracked(t, {Role::GateOut, i, 0});
            t.instance.graph().add_edge(in_v[i], out_v[i]);
        } else {
            in_v[i] = out_v[i] = detail::add_tracked(t, {Role::CircuitGate, i, 0});
        }
    }
    for (std::uint32_t i = 0; i < c.size(); ++i) {
        for (auto u : c.gate(i).children) {
            if (c.gate(i).kind == GateKind::And) {
                const Vertex proxy = detail::add_tracked(t, {Role::Proxy, i, 0});
                t.instance.graph().add_edge(proxy, in_v[i]);
                t.instance.add_arc(out_v[u], proxy);
            } else {
                t.instance.add_arc(out_v[u], in_v[i]);
            }
        }
    }
    const Vertex out = out_v[c.output()];
    for (auto i : c.inputs()) t.instance.add_arc(out, in_v[i]);
    PdsInstance& g = t.instance.graph();
    for (Vertex v = 0; v < g.vertex_count(); ++v) g.set_decision(v, Decision::Excluded);
    for (auto i : c.inputs()) g.set_decision(in_v[i], Decision::Undecided);
    return t;
}

/// Removes the extension annotations. Pre-selected vertices get two fresh
/// leaves. Excluded vertices are handled by |V|+1 copies of the graph plus a
/// non-propagating clique on the allowed vertices, each clique vertex
/// adjacent to the closed neighborhood of its counterpart in every copy.
inline Transform ipds_ext_to_ipds(const IpdsInstance& inst) {
    const PdsInstance& g = inst.graph();
    const std::size_t n = g.vertex_count();
    const VertexList pre = g.pre_selected();
    const VertexList excl = g.excluded();
    Transform t;
    std::vector<Vertex> anchor(n, kNoVertex);  // where forcing leaves attach

    if (excl.empty()) {
        t.instance = inst;
        t.origin = detail::identity_origin(n);
        for (Vertex v = 0; v < n; ++v) {
            t.instance.graph().set_decision(v, Decision::Undecided);
            anchor[v] = v;
        }
    } else {
        t.instance = IpdsInstance(PdsInstance(0));
        PdsInstance& h = t.instance.graph();
        auto at = [&](std::size_t copy, Vertex v) { return static_cast<Vertex>(copy * n + v); };
        for (std::size_t copy = 0; copy <= n; ++copy)
            for (Vertex v = 0; v < n; ++v)
                detail::add_tracked(t, {Role::Copy, v, static_cast<std::uint32_t>(copy)}, g.is_propagating(v));
        for (std::size_t copy = 0; copy <= n; ++copy) {
            for (auto [u, v] : g.edges()) {
                if (inst.is_booster(u, v))
                    t.instance.add_booster(at(copy, u), at(copy, v));
                else
                    h.add_edge(at(copy, u), at(copy, v));
            }
            for (auto [u, v] : inst.arcs()) t.instance.add_arc(at(copy, u), at(copy, v));
        }
        VertexList clique;
        for (Vertex b = 0; b < n; ++b) {
            if (g.is_excluded(b)) continue;
            const Vertex cv = detail::add_tracked(t, {Role::Clique, b, 0}, false);
            for (Vertex other : clique) h.add_edge(cv, other);
            clique.push_back(cv);
            anchor[b] = cv;
            for (std::size_t copy = 0; copy <= n; ++copy) {
                h.add_edge(cv, at(copy, b));
                for (Vertex w : g.neighbors(b)) h.add_edge(cv, at(copy, w));
            }
        }
    }
    for (Vertex x : pre)
        for (int leaf = 0; leaf < 2; ++leaf) {
            const Vertex l = detail::add_tracked(t, {Role::ForcingLeaf, x, 0});
            t.instance.graph().add_edge(anchor[x], l);
        }
    return t;
}

/// Replaces every implication arc (x, y) by the gadget
///   x =B= a,  a =B= p,  a =B= q,  p - c,  q - c,  c =B= y
/// with =B= a booster edge. Observing x observes y; observing y alone
/// leaves c with two unobserved neighbors.
inline Transform eliminate_implication_arcs(const IpdsInstance& inst) {
    Transform t;
    t.instance = inst;
    t.instance.clear_arcs();
    t.origin = detail::identity_origin(inst.vertex_count());
    PdsInstance& h = t.instance.graph();
    for (std::uint32_t i = 0; i < inst.arcs().size(); ++i) {
        const auto [x, y] = inst.arcs()[i];
        const Vertex a = detail::add_tracked(t, {Role::Implication, i, 0});
        const Vertex p = detail::add_tracked(t, {Role::Implication, i, 0});
        const Vertex q = detail::add_tracked(t, {Role::Implication, i, 0});
        const Vertex c = detail::add_tracked(t, {Role::Implication, i, 0});
        t.instance.add_booster(x, a);
        t.instance.add_booster(a, p);
        t.instance.add_booster(a, q);
        h.add_edge(p, c);
        h.add_edge(q, c);
        t.instance.add_booster(c, y);
    }
    return t;
}

/// Subdivides every booster edge xy by a vertex joined to a global vertex b
/// that two leaves force into every optimum. Shifts the parameter by one
/// unless `hub` names an existing forced vertex to reuse.
inline Transform eliminate_booster_edges(const IpdsInstance& inst, std::optional<Vertex> hub = std::nullopt) {
    if (!inst.arcs().empty()) throw Error("implication arcs must be eliminated before booster edges");
    Transform t;
    t.instance = IpdsInstance(inst.graph());
    t.origin = detail::identity_origin(inst.vertex_count());
    if (inst.boosters().empty()) return t;
    PdsInstance& h = t.instance.graph();
    Vertex b;
    if (hub) {
        if (*hub >= inst.vertex_count()) throw Error("booster hub out of range");
        b = *hub;
    } else {
        b = detail::add_tracked(t, {Role::BoosterHub, kNoVertex, 0});
        for (int leaf = 0; leaf < 2; ++leaf) h.add_edge(b, detail::add_tracked(t, {Role::ForcingLeaf, kNoVertex, 0}));
        t.parameter_shift = 1;
    }
    for (std::uint32_t i = 0; i < inst.boosters().size(); ++i) {
        const auto [x, y] = inst.boosters()[i];
        h.remove_edge(x, y);
        const Vertex s = detail::add_tracked(t, {Role::Subdivision, i, 0});
        h.add_edge(x, s);
        h.add_edge(s, y);
        h.add_edge(s, b);
    }
    return t;
}

/// Makes every vertex propagating by giving each non-propagating vertex a
/// fresh leaf.
inline Transform pds_to_simple(const PdsInstance& inst) {
    Transform t;
    t.instance = IpdsInstance(inst);
    t.origin = detail::identity_origin(inst.vertex_count());
    PdsInstance& h = t.instance.graph();
    for (Vertex v = 0; v < inst.vertex_count(); ++v) {
        if (inst.is_propagating(v)) continue;
        h.set_propagating(v, true);
        h.add_edge(v, detail::add_tracked(t, {Role::SimpleLeaf, v, 0}));
    }
    return t;
}

struct ChainResult {
    PdsInstance instance;
    int total_shift = 0;
    std::vector<Transform> steps;  // in application order
};

/// Full chain; wmcs_min_weight(c) + total_shift equals the optimum of the
/// resulting simple PDS instance.
inline ChainResult full_chain(const Circuit& c) {
    ChainResult r;
    r.steps.push_back(wmcs_to_ipds_ext(c));
    r.steps.push_back(ipds_ext_to_ipds(r.steps.back().instance));
    r.steps.push_back(eliminate_implication_arcs(r.steps.back().instance));
    r.steps.push_back(eliminate_booster_edges(r.steps.back().instance));
    r.steps.push_back(pds_to_simple(r.steps.back().instance.graph()));
    for (const auto& s : r.steps) r.total_shift += s.parameter_shift;
    r.instance = r.steps.back().instance.graph();
    return r;
}

} // namespace pds
