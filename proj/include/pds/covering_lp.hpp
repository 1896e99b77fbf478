#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace pds::detail {

/// min c.x subject to covering rows  sum_j a_ij x_j >= b_i  and box bounds
/// lo_j <= x_j <= up_j inside [0, 1].
///
/// Bounded dual simplex over a dense basis inverse. Row i carries a surplus
/// variable s_i >= 0 (column -e_i), so the all-surplus basis is dual feasible
/// from the start for non-negative costs. Bound changes and appended rows
/// keep the basis dual feasible, hence every solve continues from the last
/// basis.
class CoveringLp {
public:
    enum class Status { Optimal, Infeasible, IterationLimit };
    using Entry = std::pair<std::uint32_t, double>;

    explicit CoveringLp(std::vector<double> cost)
        : n_(cost.size()), cost_(std::move(cost)), lo_(n_, 0.0), up_(n_, 1.0), cols_(n_),
          x_(n_, 0.0), d_(cost_), pos_(n_, -1), at_upper_(n_, 0) {}

    std::size_t cols() const { return n_; }
    std::size_t rows() const { return rhs_.size(); }

    void add_row(std::span<const Entry> entries, double rhs) {
        const std::size_t m = rows();
        const std::uint32_t row = static_cast<std::uint32_t>(m);
        rows_.emplace_back(entries.begin(), entries.end());
        rhs_.push_back(rhs);
        for (auto [j, a] : entries) cols_[j].emplace_back(row, a);

        // Extend the inverse by the new surplus, which enters the basis.
        std::vector<double> coef(m, 0.0);
        for (auto [j, a] : entries)
            if (pos_[j] >= 0) coef[static_cast<std::size_t>(pos_[j])] = a;
        std::vector<double> last(m + 1, 0.0);
        for (std::size_t p = 0; p < m; ++p)
            if (coef[p] != 0.0)
                for (std::size_t k = 0; k < m; ++k) last[k] += coef[p] * binv_[p][k];
        last[m] = -1.0;
        for (auto& r : binv_) r.push_back(0.0);
        binv_.push_back(std::move(last));

        double activity = 0;
        for (auto [j, a] : entries) activity += a * x_[j];
        x_.push_back(activity - rhs);
        d_.push_back(0.0);
        pos_.push_back(static_cast<int>(m));
        at_upper_.push_back(0);
        head_.push_back(n_ + m);
    }

    /// Drops rows i >= first whose surplus is basic and above `slack`. The
    /// inverse restricted to the remaining rows stays exact.
    std::size_t drop_slack_rows(std::size_t first, double slack) {
        const std::size_t m = rows();
        std::vector<std::size_t> keep_row;
        std::vector<int> new_row(m, -1);
        for (std::size_t i = 0; i < m; ++i) {
            const bool drop = i >= first && pos_[n_ + i] >= 0 && x_[n_ + i] > slack;
            if (drop) continue;
            new_row[i] = static_cast<int>(keep_row.size());
            keep_row.push_back(i);
        }
        if (keep_row.size() == m) return 0;
        std::vector<std::size_t> keep_pos;
        for (std::size_t p = 0; p < m; ++p) {
            const std::size_t v = head_[p];
            if (v >= n_ && new_row[v - n_] < 0) continue;
            keep_pos.push_back(p);
        }
        std::vector<std::vector<double>> binv;
        binv.reserve(keep_pos.size());
        for (auto p : keep_pos) {
            std::vector<double> r;
            r.reserve(keep_row.size());
            for (auto i : keep_row) r.push_back(binv_[p][i]);
            binv.push_back(std::move(r));
        }
        std::vector<std::size_t> head;
        for (auto p : keep_pos) {
            const std::size_t v = head_[p];
            head.push_back(v < n_ ? v : n_ + static_cast<std::size_t>(new_row[v - n_]));
        }
        std::vector<std::vector<Entry>> rows;
        std::vector<double> rhs, x(x_.begin(), x_.begin() + static_cast<long>(n_)), d(d_.begin(), d_.begin() + static_cast<long>(n_));
        std::vector<std::uint8_t> at_upper(at_upper_.begin(), at_upper_.begin() + static_cast<long>(n_));
        for (auto i : keep_row) {
            rows.push_back(std::move(rows_[i]));
            rhs.push_back(rhs_[i]);
            x.push_back(x_[n_ + i]);
            d.push_back(d_[n_ + i]);
            at_upper.push_back(0);
        }
        for (auto& col : cols_) {
            std::erase_if(col, [&](const Entry& e) { return new_row[e.first] < 0; });
            for (auto& e : col) e.first = static_cast<std::uint32_t>(new_row[e.first]);
        }
        rows_ = std::move(rows);
        rhs_ = std::move(rhs);
        x_ = std::move(x);
        d_ = std::move(d);
        at_upper_ = std::move(at_upper);
        binv_ = std::move(binv);
        head_ = std::move(head);
        pos_.assign(n_ + rows_.size(), -1);
        for (std::size_t p = 0; p < head_.size(); ++p) pos_[head_[p]] = static_cast<int>(p);
        return m - keep_row.size();
    }

    void set_bounds(std::uint32_t j, double lo, double up) {
        lo_[j] = lo;
        up_[j] = up;
        if (pos_[j] >= 0) return;
        place_nonbasic(j);
    }

    std::span<const Entry> row(std::size_t i) const { return rows_[i]; }
    double rhs(std::size_t i) const { return rhs_[i]; }
    double lower(std::uint32_t j) const { return lo_[j]; }
    double upper(std::uint32_t j) const { return up_[j]; }
    double value(std::uint32_t j) const { return x_[j]; }

    double objective() const {
        double z = 0;
        for (std::size_t j = 0; j < n_; ++j) z += cost_[j] * x_[j];
        return z;
    }

    /// Lagrangian bound from the current row duals clipped at zero. Valid
    /// for every basis; `reduced` receives c_j - y.A_j.
    double dual_bound(std::vector<double>& reduced) const {
        const std::size_t m = rows();
        reduced = cost_;
        double z = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const double y = pos_[n_ + i] >= 0 ? 0.0 : std::max(0.0, d_[n_ + i]);
            if (y == 0.0) continue;
            z += y * rhs_[i];
            for (auto [j, a] : rows_[i]) reduced[j] -= y * a;
        }
        for (std::size_t j = 0; j < n_; ++j) z += reduced[j] * (reduced[j] < 0 ? up_[j] : lo_[j]);
        return z;
    }

    Status solve(std::size_t max_iterations) {
        const std::size_t total = n_ + rows();
        alpha_.assign(total, 0.0);
        for (std::size_t it = 0; it < max_iterations; ++it) {
            if (++since_refactor_ >= kRefactorEvery) refactor();
            const std::size_t m = rows();

            std::size_t r = m;
            double worst = kPrimalTol;
            for (std::size_t p = 0; p < m; ++p) {
                const std::size_t v = head_[p];
                const double viol = std::max(lower_of(v) - x_[v], x_[v] - upper_of(v));
                if (viol > worst) {
                    worst = viol;
                    r = p;
                }
            }
            if (r == m) {
                if (clean_) return Status::Optimal;
                recompute();
                clean_ = true;
                continue;
            }
            clean_ = false;

            const std::size_t leave = head_[r];
            const bool to_lower = x_[leave] < lower_of(leave);
            const std::vector<double>& rho = binv_[r];

            // Harris ratio test: widest admissible step, then largest pivot.
            std::fill(alpha_.begin(), alpha_.end(), 0.0);
            double step = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < total; ++j) {
                if (pos_[j] >= 0 || lower_of(j) == upper_of(j)) continue;
                const double a = row_times_column(rho, j);
                alpha_[j] = a;
                const double s = to_lower ? -a : a;
                if (!eligible(j, s)) continue;
                step = std::min(step, (std::abs(d_[j]) + kDualTol) / std::abs(a));
            }
            if (step == std::numeric_limits<double>::infinity()) return Status::Infeasible;
            std::size_t q = total;
            double best_pivot = 0;
            for (std::size_t j = 0; j < total; ++j) {
                if (alpha_[j] == 0.0 || pos_[j] >= 0 || lower_of(j) == upper_of(j)) continue;
                const double s = to_lower ? -alpha_[j] : alpha_[j];
                if (!eligible(j, s)) continue;
                if (std::abs(d_[j]) / std::abs(alpha_[j]) <= step && std::abs(alpha_[j]) > best_pivot) {
                    best_pivot = std::abs(alpha_[j]);
                    q = j;
                }
            }

            const std::vector<double> aq = column(q);
            if (std::abs(aq[r]) < kPivotTol) {
                refactor();
                continue;
            }
            const double theta_d = d_[q] / alpha_[q];
            for (std::size_t j = 0; j < total; ++j)
                if (alpha_[j] != 0.0 && pos_[j] < 0) d_[j] -= theta_d * alpha_[j];
            d_[q] = 0.0;
            d_[leave] = -theta_d;

            const double target = to_lower ? lower_of(leave) : upper_of(leave);
            const double theta_p = (x_[leave] - target) / aq[r];
            for (std::size_t p = 0; p < m; ++p) x_[head_[p]] -= aq[p] * theta_p;
            x_[q] += theta_p;
            x_[leave] = target;

            pivot(r, aq);
            head_[r] = q;
            pos_[q] = static_cast<int>(r);
            pos_[leave] = -1;
            if (leave < n_) at_upper_[leave] = !to_lower;
            // A surplus only ever leaves at zero.
        }
        return Status::IterationLimit;
    }

    /// Rebuilds the inverse, primal values and reduced costs from scratch.
    /// Only the block of basic structural columns on the rows whose surplus
    /// is nonbasic needs a dense inverse; surplus rows follow from it.
    void refactor() {
        since_refactor_ = 0;
        const std::size_t m = rows();
        std::vector<std::size_t> cols_s, rows_t;
        std::vector<int> slot_s(n_, -1), slot_t(m, -1);
        for (std::size_t p = 0; p < m; ++p)
            if (head_[p] < n_) {
                slot_s[head_[p]] = static_cast<int>(cols_s.size());
                cols_s.push_back(head_[p]);
            }
        for (std::size_t i = 0; i < m; ++i)
            if (pos_[n_ + i] < 0) {
                slot_t[i] = static_cast<int>(rows_t.size());
                rows_t.push_back(i);
            }
        const std::size_t k = cols_s.size();
        std::vector<std::vector<double>> kinv;
        bool ok = rows_t.size() == k;
        if (ok) {
            std::vector<std::vector<double>> block(k, std::vector<double>(k, 0.0));
            for (std::size_t a = 0; a < k; ++a)
                for (auto [i, v] : cols_[cols_s[a]])
                    if (slot_t[i] >= 0) block[static_cast<std::size_t>(slot_t[i])][a] = v;
            ok = invert(std::move(block), kinv);
        }
        if (!ok) {
            reset_basis();
            recompute();
            return;
        }
        binv_.assign(m, std::vector<double>(m, 0.0));
        for (std::size_t a = 0; a < k; ++a) {
            auto& row = binv_[static_cast<std::size_t>(pos_[cols_s[a]])];
            for (std::size_t b = 0; b < k; ++b) row[rows_t[b]] = kinv[a][b];
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (slot_t[i] >= 0) continue;
            auto& row = binv_[static_cast<std::size_t>(pos_[n_ + i])];
            row[i] = -1.0;
            for (auto [j, v] : rows_[i]) {
                if (slot_s[j] < 0) continue;
                const auto& kr = kinv[static_cast<std::size_t>(slot_s[j])];
                for (std::size_t b = 0; b < k; ++b) row[rows_t[b]] += v * kr[b];
            }
        }
        recompute();
    }

    /// Primal values and reduced costs from the current inverse.
    void recompute() {
        const std::size_t m = rows();
        // Dual values, then reduced costs; a nonbasic column sits at the
        // bound its reduced cost prefers.
        std::vector<double> y(m, 0.0);
        for (std::size_t p = 0; p < m; ++p) {
            const double c = head_[p] < n_ ? cost_[head_[p]] : 0.0;
            if (c != 0.0)
                for (std::size_t k = 0; k < m; ++k) y[k] += c * binv_[p][k];
        }
        for (std::size_t j = 0; j < n_; ++j) {
            if (pos_[j] >= 0) {
                d_[j] = 0;
                continue;
            }
            double dj = cost_[j];
            for (auto [i, a] : cols_[j]) dj -= y[i] * a;
            d_[j] = dj;
            at_upper_[j] = prefers_upper(j);
            x_[j] = at_upper_[j] ? up_[j] : lo_[j];
        }
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t v = n_ + i;
            if (pos_[v] >= 0) {
                d_[v] = 0;
                continue;
            }
            d_[v] = std::max(0.0, y[i]);
            x_[v] = 0.0;
        }
        std::vector<double> rhs = rhs_;
        for (std::size_t j = 0; j < n_; ++j)
            if (pos_[j] < 0 && x_[j] != 0.0)
                for (auto [i, a] : cols_[j]) rhs[i] -= a * x_[j];
        for (std::size_t p = 0; p < m; ++p) {
            double s = 0;
            for (std::size_t k = 0; k < m; ++k) s += binv_[p][k] * rhs[k];
            x_[head_[p]] = s;
        }
    }

private:
    static constexpr double kPrimalTol = 1e-7;
    static constexpr double kDualTol = 1e-9;
    static constexpr double kPivotTol = 1e-9;
    static constexpr std::size_t kRefactorEvery = 100;

    double lower_of(std::size_t v) const { return v < n_ ? lo_[v] : 0.0; }
    double upper_of(std::size_t v) const { return v < n_ ? up_[v] : std::numeric_limits<double>::infinity(); }

    // Keeps the current side unless the reduced cost clearly disagrees.
    bool prefers_upper(std::size_t j) const {
        if (lo_[j] == up_[j]) return lo_[j] > 0.5;
        if (d_[j] < -kDualTol) return true;
        if (d_[j] > kDualTol) return false;
        return at_upper_[j] != 0;
    }

    // A nonbasic column may move in direction sign(s) only away from its bound.
    bool eligible(std::size_t j, double s) const {
        if (std::abs(s) < kPivotTol) return false;
        const bool upper = j < n_ && at_upper_[j];
        return upper ? s < 0 : s > 0;
    }

    double row_times_column(const std::vector<double>& rho, std::size_t j) const {
        if (j >= n_) return -rho[j - n_];
        double s = 0;
        for (auto [i, a] : cols_[j]) s += rho[i] * a;
        return s;
    }

    std::vector<double> column(std::size_t j) const {
        const std::size_t m = rows();
        std::vector<double> out(m, 0.0);
        if (j >= n_) {
            for (std::size_t p = 0; p < m; ++p) out[p] = -binv_[p][j - n_];
        } else {
            for (auto [i, a] : cols_[j])
                for (std::size_t p = 0; p < m; ++p) out[p] += binv_[p][i] * a;
        }
        return out;
    }

    void pivot(std::size_t r, const std::vector<double>& aq) {
        const std::size_t m = rows();
        std::vector<double>& pr = binv_[r];
        const double inv = 1.0 / aq[r];
        for (double& v : pr) v *= inv;
        for (std::size_t p = 0; p < m; ++p) {
            if (p == r || aq[p] == 0.0) continue;
            const double f = aq[p];
            std::vector<double>& row = binv_[p];
            for (std::size_t k = 0; k < m; ++k) row[k] -= f * pr[k];
        }
    }

    void place_nonbasic(std::uint32_t j) {
        const double old = x_[j];
        at_upper_[j] = prefers_upper(j);
        const double now = at_upper_[j] ? up_[j] : lo_[j];
        if (now == old) return;
        x_[j] = now;
        const std::vector<double> a = column(j);
        for (std::size_t p = 0; p < a.size(); ++p) x_[head_[p]] -= a[p] * (now - old);
    }

    // Gauss-Jordan with partial pivoting.
    static bool invert(std::vector<std::vector<double>> b, std::vector<std::vector<double>>& inv) {
        const std::size_t m = b.size();
        inv.assign(m, std::vector<double>(m, 0.0));
        for (std::size_t i = 0; i < m; ++i) inv[i][i] = 1.0;
        for (std::size_t c = 0; c < m; ++c) {
            std::size_t best = c;
            for (std::size_t i = c + 1; i < m; ++i)
                if (std::abs(b[i][c]) > std::abs(b[best][c])) best = i;
            if (std::abs(b[best][c]) < 1e-11) return false;
            std::swap(b[c], b[best]);
            std::swap(inv[c], inv[best]);
            const double f = 1.0 / b[c][c];
            for (double& v : b[c]) v *= f;
            for (double& v : inv[c]) v *= f;
            for (std::size_t i = 0; i < m; ++i) {
                if (i == c || b[i][c] == 0.0) continue;
                const double g = b[i][c];
                for (std::size_t k = 0; k < m; ++k) {
                    b[i][k] -= g * b[c][k];
                    inv[i][k] -= g * inv[c][k];
                }
            }
        }
        return true;
    }

    void reset_basis() {
        const std::size_t m = rows();
        for (std::size_t j = 0; j < n_; ++j) pos_[j] = -1;
        binv_.assign(m, std::vector<double>(m, 0.0));
        for (std::size_t i = 0; i < m; ++i) {
            head_[i] = n_ + i;
            pos_[n_ + i] = static_cast<int>(i);
            binv_[i][i] = -1.0;
        }
    }

    std::size_t n_;
    std::vector<double> cost_, lo_, up_;
    std::vector<std::vector<Entry>> cols_;
    std::vector<std::vector<Entry>> rows_;
    std::vector<double> rhs_;
    std::vector<double> x_, d_;  // per column, surpluses after the n structurals
    std::vector<int> pos_;
    std::vector<std::uint8_t> at_upper_;
    std::vector<std::size_t> head_;
    std::vector<std::vector<double>> binv_;
    std::vector<double> alpha_;
    std::size_t since_refactor_ = 0;
    bool clean_ = false;
};

} // namespace pds::detail
