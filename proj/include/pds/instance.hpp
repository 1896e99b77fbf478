#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pds/rng.hpp"

namespace pds {

using Vertex = std::uint32_t;
using VertexList = std::vector<Vertex>;
inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Solution status of a vertex in an extension instance.
enum class Decision : std::uint8_t { Undecided, Selected, Excluded };

/// Undirected simple graph with per-vertex propagation flag and decision.
///
/// Vertices are the dense ids 0..n-1. Adjacency lists are kept sorted, so
/// degree is O(1) and edge membership is a binary search.
class PdsInstance {
public:
    PdsInstance() = default;
    explicit PdsInstance(std::size_t n)
        : adjacency_(n), propagating_(n, 1), decision_(n, Decision::Undecided) {}

    std::size_t vertex_count() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    std::span<const Vertex> neighbors(Vertex v) const { return adjacency_[v]; }
    std::size_t degree(Vertex v) const { return adjacency_[v].size(); }

    bool has_edge(Vertex u, Vertex v) const {
        const auto& a = adjacency_[u].size() <= adjacency_[v].size() ? adjacency_[u] : adjacency_[v];
        const Vertex other = &a == &adjacency_[u] ? v : u;
        return std::binary_search(a.begin(), a.end(), other);
    }

    /// Adds edge uv. Returns false if it already exists.
    bool add_edge(Vertex u, Vertex v) {
        check_vertex(u);
        check_vertex(v);
        if (u == v) throw Error("self-loop at vertex " + std::to_string(u));
        auto& au = adjacency_[u];
        auto it = std::lower_bound(au.begin(), au.end(), v);
        if (it != au.end() && *it == v) return false;
        au.insert(it, v);
        auto& av = adjacency_[v];
        av.insert(std::lower_bound(av.begin(), av.end(), u), u);
        ++edge_count_;
        return true;
    }

    bool remove_edge(Vertex u, Vertex v) {
        auto& au = adjacency_[u];
        auto it = std::lower_bound(au.begin(), au.end(), v);
        if (it == au.end() || *it != v) return false;
        au.erase(it);
        auto& av = adjacency_[v];
        av.erase(std::lower_bound(av.begin(), av.end(), u));
        --edge_count_;
        return true;
    }

    Vertex add_vertex(bool propagating = true, Decision d = Decision::Undecided) {
        adjacency_.emplace_back();
        propagating_.push_back(propagating ? 1 : 0);
        decision_.push_back(d);
        if (!labels_.empty()) labels_.emplace_back();
        return static_cast<Vertex>(adjacency_.size() - 1);
    }

    bool is_propagating(Vertex v) const { return propagating_[v] != 0; }
    void set_propagating(Vertex v, bool p) { propagating_[v] = p ? 1 : 0; }

    Decision decision(Vertex v) const { return decision_[v]; }
    void set_decision(Vertex v, Decision d) { decision_[v] = d; }
    bool is_pre_selected(Vertex v) const { return decision_[v] == Decision::Selected; }
    bool is_excluded(Vertex v) const { return decision_[v] == Decision::Excluded; }
    bool is_undecided(Vertex v) const { return decision_[v] == Decision::Undecided; }

    bool has_labels() const { return !labels_.empty(); }
    const std::string& label(Vertex v) const {
        static const std::string empty;
        return labels_.empty() ? empty : labels_[v];
    }
    void set_label(Vertex v, std::string label) {
        if (labels_.empty()) labels_.resize(vertex_count());
        labels_[v] = std::move(label);
    }

    VertexList pre_selected() const { return with_decision(Decision::Selected); }
    VertexList excluded() const { return with_decision(Decision::Excluded); }
    VertexList undecided() const { return with_decision(Decision::Undecided); }

    std::size_t count(Decision d) const {
        return static_cast<std::size_t>(std::count(decision_.begin(), decision_.end(), d));
    }
    std::size_t propagating_count() const {
        return static_cast<std::size_t>(std::count(propagating_.begin(), propagating_.end(), 1));
    }

    /// All edges as (u, v) with u < v, sorted.
    std::vector<std::pair<Vertex, Vertex>> edges() const {
        std::vector<std::pair<Vertex, Vertex>> out;
        out.reserve(edge_count_);
        for (Vertex u = 0; u < vertex_count(); ++u)
            for (Vertex v : adjacency_[u])
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    friend bool operator==(const PdsInstance& a, const PdsInstance& b) {
        if (a.adjacency_ != b.adjacency_ || a.propagating_ != b.propagating_ || a.decision_ != b.decision_)
            return false;
        for (Vertex v = 0; v < a.vertex_count(); ++v)
            if (a.label(v) != b.label(v)) return false;
        return true;
    }

private:
    void check_vertex(Vertex v) const {
        if (v >= vertex_count())
            throw Error("vertex id " + std::to_string(v) + " out of range (n=" + std::to_string(vertex_count()) + ")");
    }

    VertexList with_decision(Decision d) const {
        VertexList out;
        for (Vertex v = 0; v < vertex_count(); ++v)
            if (decision_[v] == d) out.push_back(v);
        return out;
    }

    std::vector<VertexList> adjacency_;
    std::vector<std::uint8_t> propagating_;
    std::vector<Decision> decision_;
    std::vector<std::string> labels_;
    std::size_t edge_count_ = 0;
};

/// A selection S, kept sorted and duplicate-free.
struct SolutionSet {
    VertexList selected;

    SolutionSet() = default;
    explicit SolutionSet(VertexList vs) : selected(std::move(vs)) { normalize(); }

    std::size_t size() const { return selected.size(); }
    bool contains(Vertex v) const { return std::binary_search(selected.begin(), selected.end(), v); }
    void insert(Vertex v) {
        auto it = std::lower_bound(selected.begin(), selected.end(), v);
        if (it == selected.end() || *it != v) selected.insert(it, v);
    }
    void normalize() {
        std::sort(selected.begin(), selected.end());
        selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
    }
    friend bool operator==(const SolutionSet&, const SolutionSet&) = default;
};

enum class InstanceFormat { Pds, EdgeList };

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline std::uint64_t parse_uint(const std::string& tok, std::size_t line) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError(line, "expected non-negative integer, got '" + tok + "'");
    try {
        return std::stoull(tok);
    } catch (const std::exception&) {
        throw ParseError(line, "integer out of range: '" + tok + "'");
    }
}

inline PdsInstance parse_pds(std::istream& in) {
    std::optional<PdsInstance> inst;
    std::size_t declared_edges = 0;
    std::size_t seen_edges = 0;
    std::vector<std::uint8_t> sel, exc;
    std::string raw;
    std::size_t lineno = 0;
    auto vertex_arg = [&](const std::string& tok) {
        const auto id = parse_uint(tok, lineno);
        if (id >= inst->vertex_count())
            throw ParseError(lineno, "vertex id " + tok + " out of range");
        return static_cast<Vertex>(id);
    };
    while (std::getline(in, raw)) {
        ++lineno;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto tok = split_ws(line);
        const std::string& kind = tok[0];
        if (!inst) {
            if (kind != "p" || tok.size() != 4 || tok[1] != "pds")
                throw ParseError(lineno, "expected header 'p pds <n> <m>'");
            inst.emplace(parse_uint(tok[2], lineno));
            declared_edges = parse_uint(tok[3], lineno);
            sel.assign(inst->vertex_count(), 0);
            exc.assign(inst->vertex_count(), 0);
            continue;
        }
        if (kind == "p") throw ParseError(lineno, "duplicate header");
        if (kind == "v") {
            if (tok.size() != 3) throw ParseError(lineno, "expected 'v <id> <flag>'");
            const Vertex v = vertex_arg(tok[1]);
            if (tok[2] == "N") {
                inst->set_propagating(v, false);
            } else if (tok[2] == "S") {
                if (exc[v]) throw ParseError(lineno, "vertex " + tok[1] + " both pre-selected and excluded");
                sel[v] = 1;
            } else if (tok[2] == "X") {
                if (sel[v]) throw ParseError(lineno, "vertex " + tok[1] + " both pre-selected and excluded");
                exc[v] = 1;
            } else {
                throw ParseError(lineno, "unknown vertex flag '" + tok[2] + "'");
            }
        } else if (kind == "l") {
            if (tok.size() != 3) throw ParseError(lineno, "expected 'l <id> <label>'");
            inst->set_label(vertex_arg(tok[1]), tok[2]);
        } else if (kind == "e") {
            if (tok.size() != 3) throw ParseError(lineno, "expected 'e <u> <v>'");
            const Vertex u = vertex_arg(tok[1]);
            const Vertex v = vertex_arg(tok[2]);
            if (u == v) throw ParseError(lineno, "self-loop at vertex " + tok[1]);
            if (!inst->add_edge(u, v)) throw ParseError(lineno, "duplicate edge " + tok[1] + " " + tok[2]);
            ++seen_edges;
        } else {
            throw ParseError(lineno, "unknown line type '" + kind + "'");
        }
    }
    if (!inst) throw ParseError(lineno, "missing header");
    if (seen_edges != declared_edges)
        throw ParseError(lineno, "header declares " + std::to_string(declared_edges) + " edges, found " +
                                     std::to_string(seen_edges));
    for (Vertex v = 0; v < inst->vertex_count(); ++v) {
        if (sel[v]) inst->set_decision(v, Decision::Selected);
        if (exc[v]) inst->set_decision(v, Decision::Excluded);
    }
    return std::move(*inst);
}

inline PdsInstance parse_edgelist(std::istream& in) {
    std::vector<std::pair<Vertex, Vertex>> pairs;
    std::uint64_t max_id = 0;
    bool any = false;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto tok = split_ws(line);
        if (tok.size() != 2) throw ParseError(lineno, "expected '<u> <v>'");
        const auto u = parse_uint(tok[0], lineno);
        const auto v = parse_uint(tok[1], lineno);
        if (u == v) throw ParseError(lineno, "self-loop at vertex " + tok[0]);
        if (std::max(u, v) >= kNoVertex) throw ParseError(lineno, "vertex id too large");
        max_id = std::max({max_id, u, v});
        any = true;
        pairs.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
    PdsInstance inst(any ? max_id + 1 : 0);
    for (auto [u, v] : pairs) inst.add_edge(u, v);
    return inst;
}

} // namespace detail

inline PdsInstance parse_instance(std::istream& in, InstanceFormat format = InstanceFormat::Pds) {
    return format == InstanceFormat::Pds ? detail::parse_pds(in) : detail::parse_edgelist(in);
}

inline PdsInstance parse_instance(const std::string& text, InstanceFormat format = InstanceFormat::Pds) {
    std::istringstream in(text);
    return parse_instance(in, format);
}

/// Canonical `.pds` text: header, flags by id, labels, edges ascending.
inline void write_instance(std::ostream& out, const PdsInstance& inst) {
    out << "p pds " << inst.vertex_count() << ' ' << inst.edge_count() << '\n';
    for (Vertex v = 0; v < inst.vertex_count(); ++v) {
        if (!inst.is_propagating(v)) out << "v " << v << " N\n";
        if (inst.is_pre_selected(v)) out << "v " << v << " S\n";
        if (inst.is_excluded(v)) out << "v " << v << " X\n";
    }
    if (inst.has_labels())
        for (Vertex v = 0; v < inst.vertex_count(); ++v)
            if (!inst.label(v).empty()) out << "l " << v << ' ' << inst.label(v) << '\n';
    for (auto [u, v] : inst.edges()) out << "e " << u << ' ' << v << '\n';
}

inline std::string write_instance(const PdsInstance& inst) {
    std::ostringstream out;
    write_instance(out, inst);
    return out.str();
}

/// Uniform simple graph with exactly m edges; floor(frac_nonprop * n)
/// uniformly chosen vertices are non-propagating. Pure in its arguments.
inline PdsInstance generate_random(std::size_t n, std::size_t m, double frac_nonprop, std::uint64_t seed) {
    const std::uint64_t pairs = n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (m > pairs) throw Error("m=" + std::to_string(m) + " exceeds n(n-1)/2=" + std::to_string(pairs));
    if (!(frac_nonprop >= 0.0 && frac_nonprop <= 1.0)) throw Error("frac_nonprop must lie in [0, 1]");
    Rng rng(seed);
    PdsInstance inst(n);

    // Floyd's sampling of m distinct pair indices.
    std::unordered_set<std::uint64_t> chosen;
    std::vector<std::uint64_t> order;
    order.reserve(m);
    for (std::uint64_t j = pairs - m; j < pairs; ++j) {
        const std::uint64_t t = rng.below(j + 1);
        const std::uint64_t pick = chosen.insert(t).second ? t : j;
        if (pick == j) chosen.insert(j);
        order.push_back(pick);
    }
    std::sort(order.begin(), order.end());
    for (std::uint64_t k : order) {
        // k = v(v-1)/2 + u with u < v
        auto v = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(k))) / 2.0);
        while (v * (v - 1) / 2 > k) --v;
        while ((v + 1) * v / 2 <= k) ++v;
        const std::uint64_t u = k - v * (v - 1) / 2;
        inst.add_edge(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }

    VertexList ids(n);
    for (Vertex v = 0; v < n; ++v) ids[v] = v;
    rng.shuffle(std::span<Vertex>(ids));
    const auto nonprop = static_cast<std::size_t>(std::floor(frac_nonprop * static_cast<double>(n)));
    for (std::size_t i = 0; i < nonprop; ++i) inst.set_propagating(ids[i], false);
    return inst;
}

} // namespace pds
