#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "pds/covering_bb.hpp"
#include "pds/instance.hpp"
#include "pds/rng.hpp"

namespace pds {

using Clock = std::chrono::steady_clock;

/// Growing family of sets over vertex ids; duplicates are ignored.
class HittingSetInstance {
public:
    HittingSetInstance() = default;
    explicit HittingSetInstance(VertexList forced) : forced_(std::move(forced)) {
        std::sort(forced_.begin(), forced_.end());
        forced_.erase(std::unique(forced_.begin(), forced_.end()), forced_.end());
    }

    /// Adds each set (sorted and deduplicated first). Returns how many were new.
    template <typename Range>
    std::size_t add_sets(const Range& new_sets) {
        std::size_t added = 0;
        for (const auto& s : new_sets) added += add_set(VertexList(s.begin(), s.end()));
        return added;
    }

    bool add_set(VertexList s) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        if (!index_.insert(s).second) return false;
        sets_.push_back(std::move(s));
        return true;
    }

    const std::vector<VertexList>& sets() const { return sets_; }
    const VertexList& forced() const { return forced_; }
    std::size_t size() const { return sets_.size(); }
    bool has_empty_set() const {
        return std::any_of(sets_.begin(), sets_.end(), [](const auto& s) { return s.empty(); });
    }

    /// True if some other stored set is a subset of set i.
    bool dominated(std::size_t i) const {
        for (std::size_t j = 0; j < sets_.size(); ++j)
            if (j != i && sets_[j].size() <= sets_[i].size() &&
                std::includes(sets_[i].begin(), sets_[i].end(), sets_[j].begin(), sets_[j].end()))
                return true;
        return false;
    }

    bool is_hitting_set(std::span<const Vertex> h) const {
        VertexList sorted(h.begin(), h.end());
        std::sort(sorted.begin(), sorted.end());
        for (Vertex f : forced_)
            if (!std::binary_search(sorted.begin(), sorted.end(), f)) return false;
        for (const auto& s : sets_)
            if (std::none_of(s.begin(), s.end(), [&](Vertex v) { return std::binary_search(sorted.begin(), sorted.end(), v); }))
                return false;
        return true;
    }

private:
    std::vector<VertexList> sets_;
    std::set<VertexList> index_;
    VertexList forced_;
};

class InfeasibleHittingSet : public Error {
public:
    using Error::Error;
};

struct HittingSetOptions {
    std::size_t lower_bound = 0;
    std::optional<VertexList> incumbent;  // any valid hitting set
    std::optional<Clock::time_point> deadline;
    std::uint64_t local_search_steps = 20000;
    std::uint64_t seed = 0;
};

struct HittingSetResult {
    VertexList solution;  // sorted
    bool optimal = false;
    std::size_t lower_bound = 0;
    std::uint64_t nodes = 0;
    std::size_t size() const { return solution.size(); }
};

/// Repeatedly takes the element in the most unhit sets (lowest id on ties).
inline VertexList solve_greedy(const HittingSetInstance& hs) {
    if (hs.has_empty_set()) throw InfeasibleHittingSet("hitting set instance contains an empty set");
    VertexList out = hs.forced();
    const auto& sets = hs.sets();
    std::vector<std::uint8_t> hit(sets.size(), 0);
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (Vertex v : sets[i])
            if (std::binary_search(out.begin(), out.end(), v)) hit[i] = 1;
    while (true) {
        std::vector<std::pair<Vertex, std::size_t>> counts;
        for (std::size_t i = 0; i < sets.size(); ++i)
            if (!hit[i])
                for (Vertex v : sets[i]) counts.emplace_back(v, 1);
        if (counts.empty()) break;
        std::sort(counts.begin(), counts.end());
        Vertex best = kNoVertex;
        std::size_t best_count = 0;
        for (std::size_t i = 0; i < counts.size();) {
            std::size_t j = i;
            while (j < counts.size() && counts[j].first == counts[i].first) ++j;
            if (j - i > best_count) {
                best_count = j - i;
                best = counts[i].first;
            }
            i = j;
        }
        out.insert(std::lower_bound(out.begin(), out.end(), best), best);
        for (std::size_t i = 0; i < sets.size(); ++i)
            if (!hit[i] && std::binary_search(sets[i].begin(), sets[i].end(), best)) hit[i] = 1;
    }
    return out;
}

namespace detail {

struct HsTimeout {};

/// Weighted swap search (in the spirit of NuMVC) for a hitting set of size
/// at most `target`, starting from `start`. Each step drops the member whose
/// removal uncovers the least weight and adds the best element of a random
/// unhit set; unhit sets gain weight every step. Returns the smallest
/// hitting set seen if it is smaller than a cover completed from `start`.
inline std::optional<VertexList> local_search(const Family& f, const VertexList& start, std::size_t target,
                                              std::uint64_t steps, std::uint64_t seed) {
    if (f.empty()) return std::nullopt;
    VertexList elems;
    for (const auto& s : f) elems.insert(elems.end(), s.begin(), s.end());
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    const std::size_t n = elems.size();
    auto rank = [&](Vertex v) { return static_cast<std::uint32_t>(std::lower_bound(elems.begin(), elems.end(), v) - elems.begin()); };
    std::vector<std::vector<std::uint32_t>> sets(f.size()), occ(n);
    for (std::uint32_t i = 0; i < f.size(); ++i)
        for (Vertex v : f[i]) {
            sets[i].push_back(rank(v));
            occ[sets[i].back()].push_back(i);
        }

    std::vector<std::uint8_t> in(n, 0);
    std::vector<std::uint32_t> cover(f.size(), 0), weight(f.size(), 1);
    std::vector<std::uint64_t> age(n, 0);
    std::vector<std::uint32_t> members, unhit;
    std::vector<std::size_t> member_at(n, SIZE_MAX), unhit_at(f.size(), SIZE_MAX);
    auto add = [&](std::uint32_t e) {
        in[e] = 1;
        member_at[e] = members.size();
        members.push_back(e);
        for (auto i : occ[e])
            if (cover[i]++ == 0) {
                const std::size_t at = unhit_at[i];
                unhit_at[unhit.back()] = at;
                unhit[at] = unhit.back();
                unhit.pop_back();
                unhit_at[i] = SIZE_MAX;
            }
    };
    auto remove = [&](std::uint32_t e) {
        in[e] = 0;
        const std::size_t at = member_at[e];
        member_at[members.back()] = at;
        members[at] = members.back();
        members.pop_back();
        member_at[e] = SIZE_MAX;
        for (auto i : occ[e])
            if (--cover[i] == 0) {
                unhit_at[i] = unhit.size();
                unhit.push_back(i);
            }
    };
    auto loss = [&](std::uint32_t e) {
        std::uint64_t s = 0;
        for (auto i : occ[e])
            if (cover[i] == 1) s += weight[i];
        return s;
    };
    auto gain = [&](std::uint32_t e) {
        std::uint64_t s = 0;
        for (auto i : occ[e])
            if (cover[i] == 0) s += weight[i];
        return s;
    };
    auto cheapest_member = [&](std::uint32_t avoid) {
        std::uint32_t best = UINT32_MAX;
        std::uint64_t best_loss = 0;
        for (auto e : members) {
            if (e == avoid) continue;
            const std::uint64_t l = loss(e);
            if (best == UINT32_MAX || l < best_loss || (l == best_loss && age[e] < age[best])) {
                best = e;
                best_loss = l;
            }
        }
        return best;
    };

    for (std::uint32_t i = 0; i < f.size(); ++i) {
        unhit_at[i] = unhit.size();
        unhit.push_back(i);
    }
    for (Vertex v : start) {
        const auto it = std::lower_bound(elems.begin(), elems.end(), v);
        if (it != elems.end() && *it == v && !in[rank(v)]) add(rank(v));
    }
    while (!unhit.empty()) {
        std::uint32_t b = sets[unhit.front()][0];
        for (auto e : sets[unhit.front()])
            if (gain(e) > gain(b)) b = e;
        add(b);
    }
    for (std::size_t k = members.size(); k-- > 0;) {
        const auto e = members[k];
        if (loss(e) == 0) remove(e);
    }

    std::vector<std::uint32_t> best = members;
    const std::size_t initial = best.size();
    Rng rng(seed);
    std::uint32_t last_added = UINT32_MAX;
    for (std::uint64_t step = 1; step <= steps && best.size() > target; ++step) {
        if (unhit.empty()) {
            best = members;
            if (best.size() <= target) break;
            remove(cheapest_member(UINT32_MAX));
            continue;
        }
        const auto out = cheapest_member(last_added);
        if (out == UINT32_MAX) break;
        remove(out);
        age[out] = step;
        const auto& s = sets[unhit[rng.below(unhit.size())]];
        std::uint32_t pick = UINT32_MAX;
        std::uint64_t pick_gain = 0;
        for (auto e : s) {
            if (e == out) continue;
            const std::uint64_t g = gain(e);
            if (pick == UINT32_MAX || g > pick_gain || (g == pick_gain && age[e] < age[pick])) {
                pick = e;
                pick_gain = g;
            }
        }
        if (pick == UINT32_MAX) pick = out;
        add(pick);
        age[pick] = step;
        last_added = pick;
        for (auto i : unhit) ++weight[i];
    }
    if (unhit.empty() && members.size() < best.size()) best = members;
    if (best.size() >= initial && best.size() >= start.size()) return std::nullopt;
    VertexList outv;
    for (auto e : best) outv.push_back(elems[e]);
    std::sort(outv.begin(), outv.end());
    return outv;
}

/// Exact search over a family of sorted sets. Every node first applies the
/// exact reductions (unit sets, supersets, dominated elements), then solves
/// the independent components one by one; a component without reductions
/// left is branched on.
class HittingSetSearch {
public:
    explicit HittingSetSearch(std::optional<Clock::time_point> deadline) : deadline_(deadline) {}

    /// A minimum hitting set if one of size < ub exists, otherwise nullopt.
    /// `known` is a lower bound on the optimum; the largest component, solved
    /// last, stops as soon as it meets what remains of it.
    std::optional<VertexList> solve(Family f, std::size_t ub, std::size_t known = 0) {
        tick();
        VertexList forced = reduce(f);
        if (forced.size() >= ub) return std::nullopt;
        if (f.empty()) return forced;
        std::vector<Family> comps = components(std::move(f));
        std::stable_sort(comps.begin(), comps.end(), [](const Family& a, const Family& b) { return a.size() < b.size(); });
        std::vector<std::size_t> lbs(comps.size());
        std::size_t lb_sum = forced.size();
        for (std::size_t i = 0; i < comps.size(); ++i) lb_sum += lbs[i] = lower_bound(comps[i]);
        if (lb_sum >= ub) return std::nullopt;
        VertexList out = std::move(forced);
        std::size_t rest = lb_sum - out.size();
        for (std::size_t i = 0; i < comps.size(); ++i) {
            rest -= lbs[i];
            const bool last = i + 1 == comps.size();
            const std::size_t target = last && known > out.size() ? known - out.size() : 0;
            auto part = branch(std::move(comps[i]), lbs[i], ub - out.size() - rest, target);
            if (!part) return std::nullopt;
            out.insert(out.end(), part->begin(), part->end());
        }
        return out;
    }

    std::size_t lower_bound(const Family& f) const {
        // Disjoint sets, smallest first.
        std::vector<std::size_t> order(f.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a].size() < f[b].size(); });
        std::vector<Vertex> used;
        std::size_t count = 0;
        for (auto i : order) {
            bool clash = false;
            for (Vertex v : f[i])
                if (std::binary_search(used.begin(), used.end(), v)) {
                    clash = true;
                    break;
                }
            if (clash) continue;
            ++count;
            for (Vertex v : f[i]) used.insert(std::lower_bound(used.begin(), used.end(), v), v);
        }
        return count;
    }

    std::uint64_t nodes() const { return nodes_; }

private:
    void tick() {
        ++nodes_;
        if (deadline_ && Clock::now() >= *deadline_) throw HsTimeout{};
    }

    std::optional<VertexList> branch(const Family& f, std::size_t lb, std::size_t ub, std::size_t target) {
        if (lb >= ub) return std::nullopt;
        LpBranchAndBound bb(f, [this] { tick(); });
        return bb.run(ub, target);
    }

    // Applies the exact reductions to a fixpoint; returns the forced elements.
    VertexList reduce(Family& f) {
        VertexList forced;
        bool changed = true;
        while (changed && !f.empty()) {
            changed = false;
            for (const auto& s : f)
                if (s.size() == 1) forced.push_back(s[0]);
            if (!forced.empty()) {
                std::sort(forced.begin(), forced.end());
                forced.erase(std::unique(forced.begin(), forced.end()), forced.end());
                const std::size_t before = f.size();
                std::erase_if(f, [&](const VertexList& s) {
                    return std::any_of(s.begin(), s.end(), [&](Vertex v) { return std::binary_search(forced.begin(), forced.end(), v); });
                });
                changed |= f.size() != before;
            }
            changed |= remove_supersets(f);
            changed |= remove_dominated_elements(f);
        }
        return forced;
    }

    static bool remove_supersets(Family& f) {
        std::sort(f.begin(), f.end(), [](const auto& a, const auto& b) {
            return a.size() != b.size() ? a.size() < b.size() : a < b;
        });
        f.erase(std::unique(f.begin(), f.end()), f.end());
        const std::size_t before = f.size();
        Family kept;
        std::vector<std::vector<std::uint32_t>> sets_of;  // by element rank
        VertexList elems;
        for (const auto& s : f) elems.insert(elems.end(), s.begin(), s.end());
        std::sort(elems.begin(), elems.end());
        elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
        auto rank = [&](Vertex v) { return std::lower_bound(elems.begin(), elems.end(), v) - elems.begin(); };
        sets_of.assign(elems.size(), {});
        std::vector<std::uint32_t> hits;
        for (auto& s : f) {
            hits.assign(kept.size(), 0);
            bool dominated = false;
            for (Vertex v : s)
                for (auto k : sets_of[rank(v)])
                    if (++hits[k] == kept[k].size()) dominated = true;
            if (dominated) continue;
            const auto id = static_cast<std::uint32_t>(kept.size());
            for (Vertex v : s) sets_of[rank(v)].push_back(id);
            kept.push_back(std::move(s));
        }
        f = std::move(kept);
        return f.size() != before;
    }

    // Drops e when every set containing e also contains another element e'
    // (for identical occurrence lists the smallest element stays).
    static bool remove_dominated_elements(Family& f) {
        VertexList elems;
        for (const auto& s : f) elems.insert(elems.end(), s.begin(), s.end());
        std::sort(elems.begin(), elems.end());
        elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
        auto rank = [&](Vertex v) { return static_cast<std::size_t>(std::lower_bound(elems.begin(), elems.end(), v) - elems.begin()); };
        std::vector<std::vector<std::uint32_t>> occ(elems.size());
        for (std::uint32_t i = 0; i < f.size(); ++i)
            for (Vertex v : f[i]) occ[rank(v)].push_back(i);
        std::vector<std::uint8_t> dropped(elems.size(), 0);
        bool any = false;
        for (std::size_t e = 0; e < elems.size(); ++e) {
            const auto& oe = occ[e];
            for (Vertex w : f[oe.front()]) {
                const std::size_t o = rank(w);
                if (o == e || dropped[o] || occ[o].size() < oe.size()) continue;
                if (occ[o].size() == oe.size() && o > e) continue;
                if (std::includes(occ[o].begin(), occ[o].end(), oe.begin(), oe.end())) {
                    dropped[e] = 1;
                    any = true;
                    break;
                }
            }
        }
        if (!any) return false;
        for (auto& s : f) std::erase_if(s, [&](Vertex v) { return dropped[rank(v)] != 0; });
        return true;
    }

    static std::vector<Family> components(Family f) {
        VertexList elems;
        for (const auto& s : f) elems.insert(elems.end(), s.begin(), s.end());
        std::sort(elems.begin(), elems.end());
        elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
        auto rank = [&](Vertex v) { return static_cast<std::size_t>(std::lower_bound(elems.begin(), elems.end(), v) - elems.begin()); };
        std::vector<std::size_t> parent(elems.size());
        for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
        auto find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (const auto& s : f)
            for (std::size_t j = 1; j < s.size(); ++j) {
                const auto a = find(rank(s[0])), b = find(rank(s[j]));
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
        std::vector<std::size_t> comp_of(elems.size(), SIZE_MAX);
        std::vector<Family> out;
        for (auto& s : f) {
            const auto root = find(rank(s[0]));
            if (comp_of[root] == SIZE_MAX) {
                comp_of[root] = out.size();
                out.emplace_back();
            }
            out[comp_of[root]].push_back(std::move(s));
        }
        return out;
    }

    std::optional<Clock::time_point> deadline_;
    std::uint64_t nodes_ = 0;
};

} // namespace detail

/// Minimum hitting set.
///
/// The greedy solution (or the given incumbent) is improved by local search,
/// then the exact search reduces the family, splits it into independent
/// parts and runs LP based branch and bound on each. The lower bound starts
/// from a greedy packing of disjoint sets and the caller's hint.
inline HittingSetResult solve_exact(const HittingSetInstance& hs, const HittingSetOptions& opt = {}) {
    if (hs.has_empty_set()) throw InfeasibleHittingSet("hitting set instance contains an empty set");
    if (opt.incumbent && !hs.is_hitting_set(*opt.incumbent)) throw Error("incumbent is not a hitting set");

    const VertexList& forced = hs.forced();
    detail::Family f;
    for (const auto& s : hs.sets())
        if (std::none_of(s.begin(), s.end(), [&](Vertex v) { return std::binary_search(forced.begin(), forced.end(), v); }))
            f.push_back(s);

    detail::HittingSetSearch search(opt.deadline);
    HittingSetResult r;
    r.lower_bound = std::max(opt.lower_bound, forced.size() + search.lower_bound(f));
    std::optional<VertexList> best = opt.incumbent ? *opt.incumbent : solve_greedy(hs);
    {
        std::sort(best->begin(), best->end());
        best->erase(std::unique(best->begin(), best->end()), best->end());
    }
    if (best->size() > r.lower_bound && opt.local_search_steps > 0) {
        VertexList start;
        std::set_difference(best->begin(), best->end(), forced.begin(), forced.end(), std::back_inserter(start));
        const std::size_t target = r.lower_bound > forced.size() ? r.lower_bound - forced.size() : 0;
        if (auto better = detail::local_search(f, start, target, opt.local_search_steps, opt.seed)) {
            better->insert(better->end(), forced.begin(), forced.end());
            std::sort(better->begin(), better->end());
            if (better->size() < best->size()) best = std::move(better);
        }
    }
    try {
        if (!best || best->size() > r.lower_bound) {
            const std::size_t ub = best ? best->size() - forced.size() : SIZE_MAX;
            const std::size_t known = r.lower_bound > forced.size() ? r.lower_bound - forced.size() : 0;
            if (auto found = search.solve(std::move(f), ub, known)) {
                found->insert(found->end(), forced.begin(), forced.end());
                best = std::move(found);
            }
        }
        r.optimal = true;
    } catch (const detail::HsTimeout&) {
        r.optimal = false;
    }
    r.nodes = search.nodes();
    r.solution = std::move(*best);
    std::sort(r.solution.begin(), r.solution.end());
    if (r.optimal) r.lower_bound = r.solution.size();
    return r;
}

} // namespace pds
