#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "pds/covering_lp.hpp"
#include "pds/instance.hpp"

namespace pds::detail {

using Family = std::vector<VertexList>;

inline std::size_t ceil_bound(double value) { return static_cast<std::size_t>(std::max(0.0, std::ceil(value - 1e-6))); }

/// LP based branch and bound for minimum hitting set on one family.
///
/// The LP relaxation is tightened by {0,1/2}-cuts from two separators, odd
/// cycles of sets and Gaussian elimination mod 2. Nodes fix columns by
/// reduced cost, round the LP point into a cover and branch on a column
/// picked by strong branching until its pseudocosts are reliable.
class LpBranchAndBound {
public:
    LpBranchAndBound(const Family& f, std::function<void()> tick) : tick_(std::move(tick)), lp_(std::vector<double>()) {
        for (const auto& s : f) elems_.insert(elems_.end(), s.begin(), s.end());
        std::sort(elems_.begin(), elems_.end());
        elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
        const std::size_t n = elems_.size();
        occ_.resize(n);
        for (const auto& s : f) {
            std::vector<std::uint32_t> r;
            for (Vertex v : s) {
                r.push_back(static_cast<std::uint32_t>(std::lower_bound(elems_.begin(), elems_.end(), v) - elems_.begin()));
                occ_[r.back()].push_back(static_cast<std::uint32_t>(sets_.size()));
            }
            sets_.push_back(std::move(r));
        }
        lp_ = CoveringLp(std::vector<double>(n, 1.0));
        std::vector<CoveringLp::Entry> row;
        for (const auto& s : sets_) {
            row.clear();
            for (auto e : s) row.emplace_back(e, 1.0);
            lp_.add_row(row, 1.0);
        }
        pc_.assign(n, {});
        touched_.assign(n, 0);
        accum_.assign(n, 0);
    }

    /// A minimum hitting set if one of size < ub exists. The search ends
    /// early once a solution of size at most `target` is found.
    std::optional<VertexList> run(std::size_t ub, std::size_t target = 0) {
        ub_ = ub;
        target_ = target;
        if (!solve_lp()) return std::nullopt;
        cut_rounds(100);
        dfs(0);
        if (best_.empty()) return std::nullopt;
        VertexList out;
        for (auto e : best_) out.push_back(elems_[e]);
        return out;
    }

    /// Best bound known at the root, for reporting.
    double root_bound() const { return root_bound_; }

private:
    struct Pseudocost {
        double up = 0, down = 0;
        std::uint32_t n_up = 0, n_down = 0;
    };

    static constexpr double kEps = 1e-6;
    static constexpr std::uint32_t kReliable = 4;
    static constexpr std::size_t kStrongCandidates = 10;
    static constexpr std::size_t kStrongIterations = 150;

    bool solve_lp() {
        while (true) {
            tick_();
            switch (lp_.solve(2000)) {
            case CoveringLp::Status::Optimal: return true;
            case CoveringLp::Status::Infeasible: return false;
            case CoveringLp::Status::IterationLimit: break;
            }
        }
    }

    double bound() { return lp_.dual_bound(reduced_); }

    std::vector<double> lp_point() const {
        std::vector<double> x(elems_.size());
        for (std::uint32_t j = 0; j < x.size(); ++j) x[j] = lp_.value(j);
        return x;
    }

    // Separation rounds until the bound stalls; returns false when the LP
    // became infeasible.
    bool cut_rounds(int max_rounds) {
        double last = bound();
        if (root_bound_ < last) root_bound_ = last;
        int stall = 0;
        for (int round = 0; round < max_rounds; ++round) {
            if (ceil_bound(last) >= ub_ || ub_ <= target_) return true;
            round_lp_point();
            if (ceil_bound(last) >= ub_) return true;
            if (lp_.rows() >= kMaxRowsFactor * sets_.size()) return true;
            const std::vector<double> x = lp_point();
            separate_odd_cycles(x);
            separate_mod2(x);
            if (flush_cuts() == 0) return true;
            if (!solve_lp()) return false;
            purge_cuts();
            const double now = bound();
            stall = now < last + 1e-2 ? stall + 1 : 0;
            last = std::max(last, now);
            if (stall >= 3) return true;
        }
        return true;
    }

    static constexpr std::size_t kMaxRowsFactor = 3;

    void dfs(std::size_t depth) {
        if (ub_ <= target_ || !solve_lp()) return;
        double b = bound();
        if (ceil_bound(b) >= ub_) return;
        round_lp_point();
        if (ceil_bound(b) >= ub_) return;

        std::vector<std::uint32_t> fixed;
        auto undo = [&] {
            for (auto j : fixed) lp_.set_bounds(j, 0, 1);
        };
        auto fix = [&](std::uint32_t j, double v) {
            lp_.set_bounds(j, v, v);
            fixed.push_back(j);
        };

        std::uint32_t pick = 0;
        double pick_x = 0;
        while (true) {
            // Reduced cost fixing against the incumbent.
            const double limit = static_cast<double>(ub_) - 1.0 + kEps;
            bool changed = false;
            for (std::uint32_t j = 0; j < elems_.size(); ++j) {
                if (lp_.lower(j) == lp_.upper(j)) continue;
                if (reduced_[j] > 0 && b + reduced_[j] > limit) {
                    fix(j, 0);
                    changed = true;
                } else if (reduced_[j] < 0 && b - reduced_[j] > limit) {
                    fix(j, 1);
                    changed = true;
                }
            }
            if (changed) {
                if (!solve_lp() || ceil_bound(b = bound()) >= ub_) return undo();
                continue;
            }

            std::vector<std::uint32_t> frac;
            for (std::uint32_t j = 0; j < elems_.size(); ++j) {
                const double x = lp_.value(j);
                if (x > kEps && x < 1 - kEps) frac.push_back(j);
            }
            if (frac.empty()) {
                std::vector<std::uint32_t> sol;
                for (std::uint32_t j = 0; j < elems_.size(); ++j)
                    if (lp_.value(j) > 0.5) sol.push_back(j);
                offer(std::move(sol));
                return undo();
            }

            const auto choice = select_branch(frac, b);
            if (choice.prune) return undo();
            if (!choice.fixings.empty()) {
                for (auto [j, v] : choice.fixings) fix(j, v);
                if (!solve_lp() || ceil_bound(b = bound()) >= ub_) return undo();
                round_lp_point();
                if (ceil_bound(b) >= ub_) return undo();
                continue;
            }
            pick = choice.column;
            pick_x = lp_.value(pick);
            break;
        }

        tick_();
        lp_.set_bounds(pick, 1, 1);
        child(depth, pick, true, pick_x, b);
        lp_.set_bounds(pick, 0, 0);
        child(depth, pick, false, pick_x, b);
        lp_.set_bounds(pick, 0, 1);
        undo();
    }

    void child(std::size_t depth, std::uint32_t j, bool up, double x, double parent) {
        if (ceil_bound(parent) >= ub_ || ub_ <= target_) return;
        if (solve_lp()) learn(j, up, x, bound() - parent);
        dfs(depth + 1);
    }

    void learn(std::uint32_t j, bool up, double x, double gain) {
        gain = std::max(0.0, gain);
        Pseudocost& p = pc_[j];
        if (up) {
            p.up += gain / std::max(kEps, 1 - x);
            ++p.n_up;
        } else {
            p.down += gain / std::max(kEps, x);
            ++p.n_down;
        }
    }

    double estimate(std::uint32_t j, bool up, double x) const {
        const Pseudocost& p = pc_[j];
        double avg;
        if (up)
            avg = p.n_up ? p.up / p.n_up : mean_up();
        else
            avg = p.n_down ? p.down / p.n_down : mean_down();
        return avg * (up ? 1 - x : x);
    }

    double mean_up() const {
        double s = 0;
        std::size_t c = 0;
        for (const auto& p : pc_)
            if (p.n_up) s += p.up / p.n_up, ++c;
        return c ? s / static_cast<double>(c) : 1.0;
    }
    double mean_down() const {
        double s = 0;
        std::size_t c = 0;
        for (const auto& p : pc_)
            if (p.n_down) s += p.down / p.n_down, ++c;
        return c ? s / static_cast<double>(c) : 1.0;
    }

    static double score(double down, double up) { return std::max(down, 1e-6) * std::max(up, 1e-6); }

    struct Choice {
        std::uint32_t column = 0;
        bool prune = false;
        std::vector<std::pair<std::uint32_t, double>> fixings;
    };

    // Product score over pseudocost estimates; columns without reliable
    // history are probed by solving both children on a copy of the LP. A
    // child that cannot beat the incumbent fixes the column the other way.
    Choice select_branch(const std::vector<std::uint32_t>& frac, double b) {
        std::vector<std::pair<double, std::uint32_t>> ranked;
        for (auto j : frac) {
            const double x = lp_.value(j);
            ranked.emplace_back(score(estimate(j, false, x), estimate(j, true, x)), j);
        }
        std::sort(ranked.begin(), ranked.end(), std::greater<>());

        Choice c;
        c.column = ranked.front().second;
        double best = -1;
        std::size_t probed = 0;
        for (auto [est, j] : ranked) {
            const Pseudocost& p = pc_[j];
            if (std::min(p.n_up, p.n_down) >= kReliable) {
                if (est > best) {
                    best = est;
                    c.column = j;
                }
                continue;
            }
            if (probed >= kStrongCandidates) continue;
            ++probed;
            const double x = lp_.value(j);
            const double down = probe(j, 0.0, b);
            const double up = probe(j, 1.0, b);
            learn(j, false, x, down - b);
            learn(j, true, x, up - b);
            const bool down_dead = ceil_bound(down) >= ub_;
            const bool up_dead = ceil_bound(up) >= ub_;
            if (down_dead && up_dead) {
                c.prune = true;
                return c;
            }
            if (down_dead || up_dead) {
                c.fixings.emplace_back(j, down_dead ? 1.0 : 0.0);
                continue;
            }
            const double s = score(down - b, up - b);
            if (s > best) {
                best = s;
                c.column = j;
            }
        }
        return c;
    }

    // Bound of the child with column j fixed at v, on a scratch copy.
    double probe(std::uint32_t j, double v, double b) {
        CoveringLp saved = lp_;
        lp_.set_bounds(j, v, v);
        double out;
        switch (lp_.solve(kStrongIterations)) {
        case CoveringLp::Status::Infeasible: out = static_cast<double>(ub_); break;
        case CoveringLp::Status::Optimal: out = bound(); break;
        default: out = std::max(b, bound()); break;
        }
        lp_ = std::move(saved);
        tick_();
        return out;
    }

    void offer(std::vector<std::uint32_t> sol) {
        if (sol.size() >= ub_) return;
        std::vector<std::uint8_t> in(elems_.size(), 0);
        for (auto j : sol) in[j] = 1;
        for (const auto& s : sets_)
            if (std::none_of(s.begin(), s.end(), [&](auto e) { return in[e] != 0; })) return;
        ub_ = sol.size();
        best_ = std::move(sol);
    }

    // Takes the columns at one, covers what is left by the largest LP value,
    // then drops redundant columns, smallest value first.
    void round_lp_point() {
        const std::size_t n = elems_.size();
        const std::vector<double> x = lp_point();
        std::vector<std::uint8_t> in(n, 0);
        std::vector<std::uint32_t> cover(sets_.size(), 0);
        auto take = [&](std::uint32_t j) {
            in[j] = 1;
            for (auto i : occ_[j]) ++cover[i];
        };
        for (std::uint32_t j = 0; j < n; ++j)
            if (x[j] > 1.0 - kEps) take(j);
        for (std::size_t i = 0; i < sets_.size(); ++i) {
            if (cover[i]) continue;
            std::uint32_t b = sets_[i][0];
            for (auto e : sets_[i])
                if (x[e] > x[b] + 1e-9 || (std::abs(x[e] - x[b]) <= 1e-9 && occ_[e].size() > occ_[b].size())) b = e;
            take(b);
        }
        std::vector<std::uint32_t> order;
        for (std::uint32_t j = 0; j < n; ++j)
            if (in[j]) order.push_back(j);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
        for (auto j : order) {
            if (std::all_of(occ_[j].begin(), occ_[j].end(), [&](auto i) { return cover[i] > 1; })) {
                in[j] = 0;
                for (auto i : occ_[j]) --cover[i];
            }
        }
        std::vector<std::uint32_t> sol;
        for (std::uint32_t j = 0; j < n; ++j)
            if (in[j]) sol.push_back(j);
        offer(std::move(sol));
    }

    // Adds sum ceil(c_v / 2) x_v >= ceil(k / 2) for the rows in `comb`
    // (c_v summed coefficients, k summed right hand sides), with columns at
    // one complemented where that makes the cut tighter.
    bool add_combination(const std::vector<std::size_t>& comb, const std::vector<double>& x) {
        std::vector<std::uint32_t> support;
        long k = 0;
        for (auto r : comb) {
            k += std::lround(lp_.rhs(r));
            for (auto [j, a] : lp_.row(r)) {
                if (!touched_[j]) {
                    touched_[j] = 1;
                    support.push_back(j);
                }
                accum_[j] += std::lround(a);
            }
        }
        long complemented = 0;
        for (auto j : support)
            if (accum_[j] % 2 && x[j] > 1 - kEps) ++complemented;
        std::vector<CoveringLp::Entry> cut;
        double lhs = 0;
        const bool odd = (k - complemented) % 2 != 0;
        if (odd) {
            for (auto j : support) {
                const long c = accum_[j];
                const long coef = c % 2 && x[j] > 1 - kEps ? (c - 1) / 2 : (c + 1) / 2;
                if (coef == 0) continue;
                cut.emplace_back(j, static_cast<double>(coef));
                lhs += static_cast<double>(coef) * x[j];
            }
        }
        for (auto j : support) {
            touched_[j] = 0;
            accum_[j] = 0;
        }
        if (!odd) return false;
        const double rhs = static_cast<double>((k - complemented + 1) / 2);
        if (lhs > rhs - 1e-3 || cut.empty()) return false;
        std::sort(cut.begin(), cut.end());
        auto key = cut;
        key.emplace_back(UINT32_MAX, rhs);
        if (!seen_.insert(std::move(key)).second) return false;
        pending_.emplace_back(std::move(cut), rhs);
        return true;
    }

    void purge_cuts() {
        const std::size_t before = lp_.rows();
        if (lp_.drop_slack_rows(sets_.size(), 1e-4) == 0) return;
        // Forget the dropped cuts so they can come back.
        seen_.clear();
        for (std::size_t r = sets_.size(); r < lp_.rows(); ++r) {
            std::vector<CoveringLp::Entry> key(lp_.row(r).begin(), lp_.row(r).end());
            key.emplace_back(UINT32_MAX, lp_.rhs(r));
            seen_.insert(std::move(key));
        }
        (void)before;
    }

    std::size_t flush_cuts() {
        const std::size_t added = pending_.size();
        for (const auto& [cut, rhs] : pending_) lp_.add_row(cut, rhs);
        pending_.clear();
        return added;
    }

    // Two elements of a set are the ends of an edge weighing the set's slack
    // plus the LP value of its other elements; an odd closed walk lighter
    // than one yields a violated cut from the sets it uses an odd number of
    // times.
    void separate_odd_cycles(const std::vector<double>& x) {
        const std::size_t n = elems_.size();
        struct Arc {
            std::uint32_t to, row;
            double w;
        };
        std::vector<std::vector<Arc>> adj(n);
        for (std::uint32_t i = 0; i < sets_.size(); ++i) {
            const auto& s = sets_[i];
            double total = 0;
            for (auto e : s) total += x[e];
            for (std::size_t a = 0; a < s.size(); ++a)
                for (std::size_t b = a + 1; b < s.size(); ++b) {
                    const double w = std::max(0.0, 2 * total - 1 - x[s[a]] - x[s[b]]);
                    if (w >= 1 - kEps) continue;
                    adj[s[a]].push_back({s[b], i, w});
                    adj[s[b]].push_back({s[a], i, w});
                }
        }

        std::size_t found = 0;
        std::vector<double> dist(2 * n);
        std::vector<std::pair<std::uint32_t, std::uint32_t>> prev(2 * n);
        std::vector<std::uint8_t> odd_use(sets_.size(), 0);
        using Item = std::pair<double, std::uint32_t>;
        for (std::uint32_t src = 0; src < n && found < 200; ++src) {
            if (adj[src].empty()) continue;
            std::fill(dist.begin(), dist.end(), 1 - kEps);
            std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
            dist[2 * src] = 0;
            pq.push({0, 2 * src});
            while (!pq.empty()) {
                auto [du, su] = pq.top();
                pq.pop();
                if (du > dist[su] || su == 2 * src + 1) continue;
                for (const Arc& arc : adj[su / 2]) {
                    const std::uint32_t sv = 2 * arc.to + (1 - su % 2);
                    if (du + arc.w < dist[sv]) {
                        dist[sv] = du + arc.w;
                        prev[sv] = {su, arc.row};
                        pq.push({dist[sv], sv});
                    }
                }
            }
            if (dist[2 * src + 1] >= 1 - kEps) continue;

            std::vector<std::uint32_t> walk;
            for (std::uint32_t s = 2 * src + 1; s != 2 * src; s = prev[s].first) {
                odd_use[prev[s].second] ^= 1;
                walk.push_back(prev[s].second);
            }
            std::vector<std::size_t> comb;
            for (auto r : walk)
                if (odd_use[r]) {
                    comb.push_back(r);
                    odd_use[r] = 0;
                }
            for (auto r : walk) odd_use[r] = 0;
            found += add_combination(comb, x);
        }

    }

    // Rows of small slack restricted mod 2 to the fractional columns; after
    // eliminating every column, a zero row with odd right hand side and total
    // slack below one is a violated {0,1/2}-cut.
    void separate_mod2(const std::vector<double>& x) {
        const std::size_t n = elems_.size();
        std::vector<int> slot(n, -1);
        std::vector<std::uint32_t> frac;
        for (std::uint32_t j = 0; j < n; ++j)
            if (x[j] > kEps && x[j] < 1 - kEps) {
                slot[j] = static_cast<int>(frac.size());
                frac.push_back(j);
            }
        const std::size_t words = (frac.size() + 63) / 64;

        struct Cand {
            std::vector<std::uint64_t> bits;
            std::vector<std::uint32_t> comb;
            bool parity;
            double slack;
        };
        std::vector<Cand> cand;
        for (std::size_t r = 0; r < lp_.rows(); ++r) {
            double act = 0;
            for (auto [j, a] : lp_.row(r)) act += a * x[j];
            const double slack = act - lp_.rhs(r);
            if (slack >= 1 - kEps) continue;
            Cand c{std::vector<std::uint64_t>(words, 0), {static_cast<std::uint32_t>(r)}, (std::lround(lp_.rhs(r)) & 1) != 0, std::max(0.0, slack)};
            for (auto [j, a] : lp_.row(r)) {
                if (!(std::lround(a) & 1)) continue;
                if (slot[j] >= 0)
                    c.bits[static_cast<std::size_t>(slot[j]) / 64] ^= std::uint64_t{1} << (slot[j] % 64);
                else if (x[j] > 1 - kEps)
                    c.parity = !c.parity;
            }
            cand.push_back(std::move(c));
        }

        std::vector<std::size_t> order(frac.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
            return std::min(x[frac[a]], 1 - x[frac[a]]) > std::min(x[frac[b]], 1 - x[frac[b]]);
        });
        std::vector<std::uint8_t> used(cand.size(), 0);
        for (auto col : order) {
            const std::size_t w = col / 64;
            const std::uint64_t bit = std::uint64_t{1} << (col % 64);
            std::size_t piv = cand.size();
            for (std::size_t i = 0; i < cand.size(); ++i)
                if (!used[i] && (cand[i].bits[w] & bit) && (piv == cand.size() || cand[i].slack < cand[piv].slack)) piv = i;
            if (piv == cand.size()) continue;
            used[piv] = 1;
            const Cand& p = cand[piv];
            for (std::size_t i = 0; i < cand.size(); ++i) {
                if (i == piv || !(cand[i].bits[w] & bit)) continue;
                Cand& c = cand[i];
                if (c.slack + p.slack >= 1 - kEps) {
                    // Too slack to ever give a cut; keep it out of the way.
                    c.slack = 1;
                    used[i] = 1;
                    continue;
                }
                for (std::size_t k = 0; k < words; ++k) c.bits[k] ^= p.bits[k];
                c.parity ^= p.parity;
                c.slack += p.slack;
                std::vector<std::uint32_t> merged;
                std::set_symmetric_difference(c.comb.begin(), c.comb.end(), p.comb.begin(), p.comb.end(), std::back_inserter(merged));
                c.comb = std::move(merged);
            }
        }
        std::size_t found = 0;
        for (const auto& c : cand) {
            if (found >= 200) break;
            if (!c.parity || c.slack >= 1 - 1e-3) continue;
            if (std::any_of(c.bits.begin(), c.bits.end(), [](auto b) { return b != 0; })) continue;
            std::vector<std::size_t> comb(c.comb.begin(), c.comb.end());
            found += add_combination(comb, x);
        }

    }

    std::function<void()> tick_;
    VertexList elems_;
    std::vector<std::vector<std::uint32_t>> sets_;  // element ranks
    std::vector<std::vector<std::uint32_t>> occ_;
    CoveringLp lp_;
    std::vector<double> reduced_;
    std::size_t ub_ = 0, target_ = 0;
    std::vector<std::uint32_t> best_;
    std::vector<Pseudocost> pc_;
    std::set<std::vector<CoveringLp::Entry>> seen_;
    std::vector<std::pair<std::vector<CoveringLp::Entry>, double>> pending_;
    std::vector<std::uint8_t> touched_;
    std::vector<long> accum_;
    double root_bound_ = 0;
};

} // namespace pds::detail
