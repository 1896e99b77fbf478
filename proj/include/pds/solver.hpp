#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <queue>
#include <thread>
#include <tuple>
#include <vector>

#include "pds/decompose.hpp"
#include "pds/forts.hpp"
#include "pds/hitting_set.hpp"
#include "pds/instance.hpp"
#include "pds/propagation.hpp"
#include "pds/reductions.hpp"
#include "pds/rng.hpp"

namespace pds {

enum class SolveStatus : std::uint8_t { Optimal, Infeasible, TimedOut };

inline constexpr std::string_view status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::TimedOut: return "timeout";
    }
    return "";
}

enum class BoundKind : std::uint8_t { Lower, Upper };

struct BoundEvent {
    double t_seconds;
    BoundKind kind;
    std::size_t value;
};

/// Anytime bounds. Only strict improvements are kept, so lower values never
/// decrease and upper values never increase. Safe to feed from several threads.
class BoundsTrace {
public:
    explicit BoundsTrace(Clock::time_point start = Clock::now()) : start_(start) {}

    void restart(Clock::time_point start) { start_ = start; }

    bool record(BoundKind kind, std::size_t value) {
        std::lock_guard lock(mutex_);
        auto& best = kind == BoundKind::Lower ? lower_ : upper_;
        if (best && (kind == BoundKind::Lower ? value <= *best : value >= *best)) return false;
        best = value;
        const double t = std::chrono::duration<double>(Clock::now() - start_).count();
        events_.push_back({std::max(t, events_.empty() ? 0.0 : events_.back().t_seconds), kind, value});
        return true;
    }

    std::vector<BoundEvent> events() const {
        std::lock_guard lock(mutex_);
        return events_;
    }

    void write_csv(std::ostream& out) const {
        out << "t_seconds,kind,value\n";
        for (const auto& e : events())
            out << e.t_seconds << ',' << (e.kind == BoundKind::Lower ? "lower" : "upper") << ',' << e.value << '\n';
    }

private:
    Clock::time_point start_;
    mutable std::mutex mutex_;
    std::vector<BoundEvent> events_;
    std::optional<std::size_t> lower_;
    std::optional<std::size_t> upper_;
};

struct SolveConfig {
    RuleSelection reductions{};
    std::uint64_t seed = 0;
    std::optional<double> time_limit_s;
    BoundsTrace* trace = nullptr;
    unsigned jobs = 1;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Infeasible;
    std::optional<SolutionSet> solution;  // the best known solution unless infeasible
    std::optional<std::size_t> gamma_p;
    std::size_t lower_bound = 0;
    std::size_t upper_bound = 0;
    std::size_t fort_count = 0;
    std::size_t hitting_set_solves = 0;
    double wall_time_s = 0;
    ReductionStats rule_stats;
    std::size_t subinstances = 0;
};

/// Greedy completion of X u h to a solution.
///
/// Repeatedly selects the undecided vertex with the most unobserved vertices
/// in its closed neighborhood (then the most unobserved propagating
/// neighbors, then the lowest id). Afterwards the added vertices are visited
/// in reverse order of addition and dropped if the rest still observes V.
inline SolutionSet greedy_complete(const PdsInstance& inst, std::span<const Vertex> h) {
    VertexList base = inst.pre_selected();
    base.insert(base.end(), h.begin(), h.end());
    std::sort(base.begin(), base.end());
    base.erase(std::unique(base.begin(), base.end()), base.end());
    ObservationState state(inst, std::span<const Vertex>(base));

    auto score = [&](Vertex v) {
        std::uint32_t closed = state.is_observed(v) ? 0 : 1;
        std::uint32_t prop = 0;
        for (Vertex u : inst.neighbors(v))
            if (!state.is_observed(u)) {
                ++closed;
                prop += inst.is_propagating(u);
            }
        return std::pair{closed, prop};
    };
    using Entry = std::tuple<std::uint32_t, std::uint32_t, Vertex>;  // scores, then smaller id first
    auto cmp = [](const Entry& a, const Entry& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
        if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
        return std::get<2>(a) > std::get<2>(b);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    if (!state.all_observed())
        for (Vertex v = 0; v < inst.vertex_count(); ++v)
            if (inst.is_undecided(v) && !state.is_selected(v)) {
                auto [a, b] = score(v);
                if (a > 0) heap.emplace(a, b, v);
            }

    VertexList added;
    while (!state.all_observed()) {
        if (heap.empty()) throw InfeasibleError("no feasible completion exists");
        auto [a, b, v] = heap.top();
        heap.pop();
        if (state.is_selected(v)) continue;
        // Scores only shrink as more vertices are observed.
        auto [na, nb] = score(v);
        if (na != a || nb != b) {
            if (na > 0) heap.emplace(na, nb, v);
            continue;
        }
        state.select(v);
        added.push_back(v);
    }
    for (auto it = added.rbegin(); it != added.rend(); ++it) {
        state.deselect(*it);
        if (!state.all_observed()) state.select(*it);
    }
    return SolutionSet(state.selected_set());
}

namespace detail {

inline bool expired(const std::optional<Clock::time_point>& deadline) {
    return deadline && Clock::now() >= *deadline;
}

inline VertexList fort_neighborhood_in(const PdsInstance& inst, const Fort& f) {
    VertexList out;
    for (Vertex v : closed_neighborhood(inst, f.vertices))
        if (inst.is_undecided(v)) out.push_back(v);
    return out;
}

} // namespace detail

/// Bounds of one kernel solve, reported as counts of undecided vertices.
using BoundsCallback = std::function<void(BoundKind, std::size_t)>;

struct KernelOptions {
    std::uint64_t seed = 0;
    std::optional<Clock::time_point> deadline;
    BoundsCallback on_bound;
};

inline constexpr std::uint64_t kFortSeedsPerRound = 8;

/// Implicit hitting set loop on one instance.
///
/// The family of fort neighborhoods starts with the forts found for H = {}.
/// Each round solves the hitting set problem exactly, stops if H u X is a
/// solution, and otherwise adds the forts found for H. Bounds in the result
/// count X as well.
inline SolveResult ihs_kernel_solve(const PdsInstance& sub, const KernelOptions& opt = {}) {
    const auto start = Clock::now();
    SolveResult res;
    const VertexList x = sub.pre_selected();
    auto report = [&](BoundKind k, std::size_t v) {
        if (opt.on_bound) opt.on_bound(k, v);
    };
    auto finish = [&](SolveStatus st) {
        res.status = st;
        res.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
        return res;
    };

    if (is_power_dominating(sub, std::span<const Vertex>(x))) {
        res.solution = SolutionSet(x);
        res.gamma_p = res.lower_bound = res.upper_bound = x.size();
        report(BoundKind::Lower, 0);
        report(BoundKind::Upper, 0);
        return finish(SolveStatus::Optimal);
    }

    SolutionSet best;
    try {
        best = greedy_complete(sub, {});
    } catch (const InfeasibleError&) {
        return finish(SolveStatus::Infeasible);
    }
    std::size_t ub = best.size() - x.size();
    std::size_t lb = 0;
    report(BoundKind::Lower, lb);
    report(BoundKind::Upper, ub);

    HittingSetInstance hs;
    auto add_forts = [&](const std::vector<Fort>& forts) {
        std::size_t added = 0;
        for (const auto& f : forts) added += hs.add_set(detail::fort_neighborhood_in(sub, f));
        return added;
    };
    add_forts(find_forts(sub, {}, opt.seed));

    auto undecided_part = [&](const SolutionSet& s) {
        VertexList out;
        for (Vertex v : s.selected)
            if (sub.is_undecided(v)) out.push_back(v);
        return out;
    };

    VertexList h;
    std::uint64_t cheap_round = 0;
    for (std::uint64_t round = 1;; ++round) {
        if (hs.has_empty_set()) return finish(SolveStatus::Infeasible);
        // Grow the family with forts that a greedy hitting set misses.
        for (int k = 0; k < 1000 && !detail::expired(opt.deadline); ++k) {
            VertexList g = solve_greedy(hs);
            VertexList cand = x;
            cand.insert(cand.end(), g.begin(), g.end());
            if (is_power_dominating(sub, std::span<const Vertex>(cand))) {
                if (g.size() < ub) {
                    best = SolutionSet(std::move(cand));
                    ub = g.size();
                    report(BoundKind::Upper, ub);
                }
                break;
            }
            if (add_forts(find_forts(sub, g, Rng::derive(opt.seed ^ 0x9e3779b97f4a7c15ULL, ++cheap_round))) == 0) break;
        }
        HittingSetOptions ho;
        ho.lower_bound = lb;
        ho.incumbent = undecided_part(best);
        // The previous hitting set, extended greedily, may beat the incumbent.
        if (!h.empty()) {
            HittingSetInstance rest(h);
            for (const auto& s : hs.sets()) rest.add_set(s);
            VertexList ext = solve_greedy(rest);
            if (ext.size() < ho.incumbent->size()) ho.incumbent = std::move(ext);
        }
        ho.deadline = opt.deadline;
        ho.seed = Rng::derive(opt.seed ^ 0x5bd1e995ULL, round);
        const HittingSetResult hr = solve_exact(hs, ho);
        ++res.hitting_set_solves;
        res.fort_count = hs.size();
        if (!hr.optimal) {
            lb = std::max(lb, hr.lower_bound);
            report(BoundKind::Lower, lb);
            break;
        }
        h = hr.solution;
        lb = std::max(lb, h.size());
        report(BoundKind::Lower, lb);
        if (lb >= ub) break;

        VertexList cand = x;
        cand.insert(cand.end(), h.begin(), h.end());
        if (is_power_dominating(sub, std::span<const Vertex>(cand))) {
            best = SolutionSet(std::move(cand));
            ub = h.size();
            report(BoundKind::Upper, ub);
            break;
        }
        SolutionSet g = greedy_complete(sub, h);
        if (g.size() - x.size() < ub) {
            best = std::move(g);
            ub = best.size() - x.size();
            report(BoundKind::Upper, ub);
            if (lb >= ub) break;
        }
        if (detail::expired(opt.deadline)) break;
        std::size_t added = 0;
        for (std::uint64_t k = 0; k < kFortSeedsPerRound; ++k)
            added += add_forts(find_forts(sub, h, Rng::derive(Rng::derive(opt.seed, round), k)));
        if (added == 0) throw Error("fort search made no progress");
    }
    res.fort_count = hs.size();
    res.solution = best;
    res.lower_bound = lb + x.size();
    res.upper_bound = ub + x.size();
    if (lb >= ub) {
        res.gamma_p = best.size();
        return finish(SolveStatus::Optimal);
    }
    return finish(SolveStatus::TimedOut);
}

/// Reduce, split, solve every part with the implicit hitting set loop, then
/// merge and lift. The returned solution is re-checked on the input.
inline SolveResult solve(const PdsInstance& inst, const SolveConfig& cfg = {}) {
    const auto start = Clock::now();
    std::optional<Clock::time_point> deadline;
    if (cfg.time_limit_s)
        deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(*cfg.time_limit_s));
    if (cfg.trace) cfg.trace->restart(start);

    SolveResult res;
    auto finish = [&](SolveStatus st) {
        res.status = st;
        res.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
        return res;
    };

    {
        VertexList all = inst.pre_selected();
        const VertexList free = inst.undecided();
        all.insert(all.end(), free.begin(), free.end());
        if (!is_power_dominating(inst, std::span<const Vertex>(all))) return finish(SolveStatus::Infeasible);
    }

    ReductionResult red = reduce_full(inst, cfg.reductions);
    res.rule_stats = red.stats;
    const Decomposition dec = split(red.kernel);
    const std::size_t parts = dec.parts.size();
    res.subinstances = parts;

    std::vector<std::size_t> order(parts);
    for (std::size_t i = 0; i < parts; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dec.parts[a].instance.vertex_count() > dec.parts[b].instance.vertex_count();
    });

    // Global bounds: |X| plus the sums of the per-part bounds, where part
    // bounds count only vertices of the part's component.
    const std::size_t base = dec.pre_selected.size();
    std::vector<std::size_t> part_lb(parts, 0), part_ub(parts, 0);
    std::vector<std::uint8_t> ub_known(parts, 0);
    std::size_t ub_missing = parts;
    std::mutex bounds_mutex;
    auto on_bound = [&](std::size_t i, BoundKind kind, std::size_t value) {
        std::lock_guard lock(bounds_mutex);
        if (kind == BoundKind::Lower) {
            part_lb[i] = std::max(part_lb[i], value);
        } else {
            if (!ub_known[i]) {
                ub_known[i] = 1;
                --ub_missing;
                part_ub[i] = value;
            }
            part_ub[i] = std::min(part_ub[i], value);
        }
        if (!cfg.trace) return;
        std::size_t lb = base, ub = base;
        for (std::size_t j = 0; j < parts; ++j) {
            lb += part_lb[j];
            ub += part_ub[j];
        }
        cfg.trace->record(BoundKind::Lower, lb);
        if (ub_missing == 0) cfg.trace->record(BoundKind::Upper, ub);
    };
    if (cfg.trace) {
        cfg.trace->record(BoundKind::Lower, base);
        if (parts == 0) cfg.trace->record(BoundKind::Upper, base);
    }

    std::vector<SolveResult> results(parts);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < parts;) {
            const std::size_t i = order[k];
            KernelOptions ko;
            ko.seed = Rng::derive(cfg.seed, i);
            ko.deadline = deadline;
            ko.on_bound = [&, i](BoundKind kind, std::size_t v) { on_bound(i, kind, v); };
            results[i] = ihs_kernel_solve(dec.parts[i].instance, ko);
        }
    };
    const unsigned jobs = std::max(1U, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(std::max<std::size_t>(parts, 1))));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    bool timed_out = false;
    std::vector<SolutionSet> part_solutions(parts);
    res.lower_bound = res.upper_bound = base;
    for (std::size_t i = 0; i < parts; ++i) {
        const SolveResult& r = results[i];
        res.fort_count += r.fort_count;
        res.hitting_set_solves += r.hitting_set_solves;
        if (r.status == SolveStatus::Infeasible) return finish(SolveStatus::Infeasible);
        timed_out |= r.status == SolveStatus::TimedOut;
        const std::size_t local_x = dec.parts[i].instance.count(Decision::Selected);
        res.lower_bound += r.lower_bound - local_x;
        res.upper_bound += r.upper_bound - local_x;
        part_solutions[i] = *r.solution;
    }

    SolutionSet lifted = lift_solution(red.log, merge_solutions(dec, part_solutions));
    if (!is_power_dominating(inst, std::span<const Vertex>(lifted.selected)))
        throw Error("internal error: lifted solution does not observe the instance");
    if (lifted.size() != res.upper_bound) throw Error("internal error: lifted solution size mismatch");
    res.solution = std::move(lifted);
    if (timed_out) return finish(SolveStatus::TimedOut);
    res.gamma_p = res.upper_bound;
    return finish(SolveStatus::Optimal);
}

} // namespace pds
