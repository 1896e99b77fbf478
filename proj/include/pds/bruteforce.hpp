#pragma once

// Deliberately naive exact oracles used as ground truth in tests.

#include <algorithm>
#include <cstdint>
#include <span>
#include <optional>
#include <vector>

#include "pds/instance.hpp"
#include "pds/ipds.hpp"
#include "pds/propagation.hpp"

namespace pds::bruteforce {

struct OracleResult {
    std::optional<std::size_t> gamma; // nullopt: infeasible (within k_max)
    SolutionSet witness;
};

inline constexpr std::size_t kDefaultUndecidedGuard = 25;
inline constexpr std::uint64_t kDefaultSubsetBudget = 1ULL << 25;

namespace detail {

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        if (r > (UINT64_MAX / (n - k + i))) return UINT64_MAX;
        r = r * (n - k + i) / i;
    }
    return r;
}

/// Calls visit(indices) for all k-subsets of {0..n-1} in lexicographic
/// order until visit returns true. Returns whether it stopped early.
template <typename Visit>
bool for_each_combination(std::size_t n, std::size_t k, Visit&& visit) {
    if (k > n) return false;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        if (visit(idx)) return true;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return false;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

} // namespace detail

/// Observed set by repeated sweeps until nothing changes; no incremental
/// bookkeeping at all.
inline std::vector<std::uint8_t> naive_observed(const PdsInstance& inst, std::span<const Vertex> selection) {
    std::vector<std::uint8_t> obs(inst.vertex_count(), 0);
    for (Vertex s : selection) {
        obs[s] = 1;
        for (Vertex u : inst.neighbors(s)) obs[u] = 1;
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (Vertex v = 0; v < inst.vertex_count(); ++v) {
            if (!obs[v] || !inst.is_propagating(v)) continue;
            Vertex last = kNoVertex;
            std::size_t missing = 0;
            for (Vertex u : inst.neighbors(v))
                if (!obs[u]) {
                    ++missing;
                    last = u;
                }
            if (missing == 1) {
                obs[last] = 1;
                changed = true;
            }
        }
    }
    return obs;
}

inline bool naive_covers(const PdsInstance& inst, std::span<const Vertex> selection) {
    const auto obs = naive_observed(inst, selection);
    return std::all_of(obs.begin(), obs.end(), [](auto o) { return o != 0; });
}

/// Minimum extension power dominating set by enumerating S = X u T over
/// subsets T of the undecided vertices, by increasing |T| then
/// lexicographically. The first feasible S is returned.
///
/// Runs when |undecided| <= 25, or when the number of subsets up to k_max
/// stays within `subset_budget`; otherwise throws.
inline OracleResult oracle_pds(const PdsInstance& inst, std::optional<std::size_t> k_max = std::nullopt,
                               std::uint64_t subset_budget = kDefaultSubsetBudget) {
    const VertexList free = inst.undecided();
    const VertexList fixed = inst.pre_selected();
    const std::size_t limit = std::min(k_max.value_or(free.size()), free.size());
    if (free.size() > kDefaultUndecidedGuard) {
        std::uint64_t total = 0;
        for (std::size_t k = 0; k <= limit; ++k) {
            total += detail::binomial(free.size(), k);
            if (total > subset_budget)
                throw Error("oracle guard exceeded: " + std::to_string(free.size()) + " undecided vertices");
        }
    }
    OracleResult result;
    VertexList sel;
    for (std::size_t k = 0; k <= limit; ++k) {
        const bool found = detail::for_each_combination(free.size(), k, [&](const auto& idx) {
            sel = fixed;
            for (auto i : idx) sel.push_back(free[i]);
            if (!naive_covers(inst, sel)) return false;
            result.gamma = sel.size();
            result.witness = SolutionSet(sel);
            return true;
        });
        if (found) return result;
    }
    return result;
}

/// Same enumeration as oracle_pds under the implicating rules (booster
/// edges and implication arcs).
inline OracleResult oracle_ipds(const IpdsInstance& inst, std::optional<std::size_t> k_max = std::nullopt,
                                std::uint64_t subset_budget = kDefaultSubsetBudget) {
    const PdsInstance& g = inst.graph();
    const VertexList free = g.undecided();
    const VertexList fixed = g.pre_selected();
    const std::size_t limit = std::min(k_max.value_or(free.size()), free.size());
    std::uint64_t total = 0;
    for (std::size_t k = 0; k <= limit && free.size() > kDefaultUndecidedGuard; ++k) {
        total += detail::binomial(free.size(), k);
        if (total > subset_budget)
            throw Error("oracle guard exceeded: " + std::to_string(free.size()) + " undecided vertices");
    }
    OracleResult result;
    VertexList sel;
    for (std::size_t k = 0; k <= limit; ++k) {
        const bool found = detail::for_each_combination(free.size(), k, [&](const auto& idx) {
            sel = fixed;
            for (auto i : idx) sel.push_back(free[i]);
            if (!ipds_covers(inst, sel)) return false;
            result.gamma = sel.size();
            result.witness = SolutionSet(sel);
            return true;
        });
        if (found) return result;
    }
    return result;
}

namespace detail {

class FortBranching {
public:
    explicit FortBranching(const PdsInstance& inst)
        : inst_(inst), state_(inst, inst.pre_selected()), banned_(inst.vertex_count(), 0) {
        for (Vertex v : inst.excluded()) banned_[v] = 1;
    }

    bool search(std::size_t depth) {
        if (state_.all_observed()) return true;
        if (depth == 0) return false;
        const VertexList branch = fort_neighborhood();
        VertexList tried;
        bool found = false;
        for (Vertex c : branch) {
            state_.select(c);
            if (search(depth - 1)) {
                found = true;
                break;
            }
            state_.deselect(c);
            banned_[c] = 1;
            tried.push_back(c);
        }
        for (Vertex c : tried) banned_[c] = 0;
        return found;
    }

    VertexList selection() const { return state_.selected_set(); }

private:
    // Selects every vertex that keeps the graph unobserved; what remains
    // unobserved is a fort disjoint from the closed neighborhood of the
    // current selection. Returns its selectable neighborhood.
    VertexList fort_neighborhood() {
        const auto saved = state_;
        for (Vertex v = 0; v < inst_.vertex_count(); ++v) {
            if (state_.is_selected(v)) continue;
            state_.select(v);
            if (state_.all_observed()) state_.deselect(v);
        }
        VertexList out;
        for (Vertex f : state_.unobserved_set()) {
            out.push_back(f);
            out.insert(out.end(), inst_.neighbors(f).begin(), inst_.neighbors(f).end());
        }
        state_ = saved;
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        std::erase_if(out, [&](Vertex v) { return banned_[v] != 0; });
        return out;
    }

    const PdsInstance& inst_;
    ObservationState<PdsInstance> state_;
    std::vector<std::uint8_t> banned_;
};

} // namespace detail

/// Exact minimum for instances too large to enumerate but with a small
/// optimum. Depth-bounded search with iterative deepening: every solution
/// extending the current selection hits N[F] for the fort F left
/// unobserved by a maximal non-solution superset, so it branches on N[F].
inline OracleResult oracle_pds_branching(const PdsInstance& inst, std::optional<std::size_t> k_max = std::nullopt) {
    const std::size_t limit = k_max.value_or(inst.count(Decision::Undecided));
    detail::FortBranching search(inst);
    OracleResult result;
    for (std::size_t k = 0; k <= limit; ++k)
        if (search.search(k)) {
            result.witness = SolutionSet(search.selection());
            result.gamma = result.witness.size();
            break;
        }
    return result;
}

/// Direct check of the fort definition: F non-empty and no propagating
/// vertex outside F has exactly one neighbor in F.
inline bool fort_condition(const PdsInstance& inst, const std::vector<std::uint8_t>& in_fort) {
    bool any = false;
    for (Vertex v = 0; v < inst.vertex_count(); ++v) {
        if (in_fort[v]) {
            any = true;
            continue;
        }
        if (!inst.is_propagating(v)) continue;
        std::size_t hits = 0;
        for (Vertex u : inst.neighbors(v)) hits += in_fort[u];
        if (hits == 1) return false;
    }
    return any;
}

/// All inclusion-minimal forts by subset enumeration.
inline std::vector<VertexList> enumerate_minimal_forts(const PdsInstance& inst, std::size_t n_max = 12) {
    const std::size_t n = inst.vertex_count();
    if (n > n_max) throw Error("fort enumeration guard exceeded: n=" + std::to_string(n));
    std::vector<std::uint32_t> forts;
    std::vector<std::uint8_t> member(n);
    for (std::uint32_t mask = 1; mask < (1U << n); ++mask) {
        for (std::size_t v = 0; v < n; ++v) member[v] = (mask >> v) & 1U;
        if (fort_condition(inst, member)) forts.push_back(mask);
    }
    std::vector<VertexList> out;
    for (auto f : forts) {
        bool minimal = true;
        for (auto g : forts)
            if (g != f && (g & f) == g) {
                minimal = false;
                break;
            }
        if (!minimal) continue;
        VertexList vs;
        for (Vertex v = 0; v < n; ++v)
            if ((f >> v) & 1U) vs.push_back(v);
        out.push_back(std::move(vs));
    }
    return out;
}

} // namespace pds::bruteforce
