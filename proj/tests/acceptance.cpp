// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "corpus.hpp"
#include "pds/bruteforce.hpp"
#include "pds/forts.hpp"
#include "pds/hardness.hpp"
#include "pds/milp.hpp"
#include "pds/solver.hpp"

using namespace pds;
using bruteforce::naive_covers;
using bruteforce::oracle_ipds;
using bruteforce::oracle_pds;

namespace {

// Time budgets in seconds; every comparison below is exact.
constexpr double kOracleSuiteBudget = 300;
constexpr double kReductionSuiteBudget = 300;
constexpr double kHardnessBudget = 600;
constexpr double kTexasBudget = 120;
constexpr double kWesternBudget = 600;
constexpr std::size_t kTexasGamma = 411;
constexpr std::size_t kWesternGamma = 1825;

constexpr std::uint64_t kCorpusSize = 1000;
constexpr std::size_t kPerRuleMinimum = 100;
constexpr std::size_t kPerTransformMinimum = 200;
constexpr std::uint64_t kCircuits = 60;

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Check {
public:
    void fail(const std::string& why) {
        if (pass_) first_ = why;
        pass_ = false;
        ++failures_;
    }
    void expect(bool ok, const std::string& why) {
        if (!ok) fail(why);
    }
    Outcome done(const std::string& summary) const {
        if (pass_) return {true, summary};
        return {false, summary + "; " + std::to_string(failures_) + " failures, first: " + first_};
    }

private:
    bool pass_ = true;
    std::size_t failures_ = 0;
    std::string first_;
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string show(std::optional<std::size_t> g) { return g ? std::to_string(*g) : "infeasible"; }

std::vector<PdsInstance> build_corpus() {
    std::vector<PdsInstance> out;
    for (std::uint64_t s = 0; s < kCorpusSize; ++s) out.push_back(corpus::random_extension(s, 12, 20));
    return out;
}

Outcome oracle_equivalence(const std::vector<PdsInstance>& corp) {
    Check c;
    const auto t0 = Clock::now();
    std::size_t solves = 0;
    for (std::size_t i = 0; i < corp.size(); ++i) {
        const auto o = oracle_pds(corp[i]);
        for (auto name : kRuleSelectionNames) {
            SolveConfig cfg;
            cfg.reductions = RuleSelection::parse(name);
            cfg.seed = i;
            const auto r = solve(corp[i], cfg);
            ++solves;
            const bool ok = r.status == (o.gamma ? SolveStatus::Optimal : SolveStatus::Infeasible) && r.gamma_p == o.gamma &&
                            (!r.solution || naive_covers(corp[i], r.solution->selected));
            c.expect(ok, "instance " + std::to_string(i) + " reductions " + std::string(name) + ": solve " +
                             show(r.gamma_p) + " oracle " + show(o.gamma));
        }
    }
    const double t = since(t0);
    c.expect(t < kOracleSuiteBudget, "took " + std::to_string(t) + " s");
    return c.done(std::to_string(corp.size()) + " instances, " + std::to_string(solves) + " solves, " +
                  std::to_string(t) + " s");
}

// Checks one reduction result against the oracle optimum of its input.
bool safe(const PdsInstance& g, const std::optional<std::size_t>& gamma, const ReductionResult& red) {
    const auto k = oracle_pds(red.kernel);
    if (k.gamma.has_value() != gamma.has_value()) return false;
    if (!gamma) return true;
    const auto lifted = lift_solution(red.log, k.witness);
    return lifted.size() == *gamma && naive_covers(g, lifted.selected);
}

// Random base graph with a Deg2c site planted on fresh vertices s - v - {x, y}.
PdsInstance planted_deg2c(Rng& rng) {
    const std::size_t k = 2 + rng.below(6);
    PdsInstance g = generate_random(k, rng.below(std::min<std::size_t>(k * (k - 1) / 2, 8) + 1),
                                    std::array{0.0, 0.5, 1.0}[rng.below(3)], rng.next());
    const Vertex s = g.add_vertex(rng.below(2) != 0, Decision::Selected);
    const Vertex v = g.add_vertex(true, Decision::Excluded);
    const Vertex x = g.add_vertex(true, rng.below(2) ? Decision::Excluded : Decision::Undecided);
    const Vertex y = g.add_vertex(true, Decision::Excluded);
    g.add_edge(s, v);
    g.add_edge(v, x);
    g.add_edge(v, y);
    const auto a = static_cast<Vertex>(rng.below(k));
    const auto b = static_cast<Vertex>((a + 1 + rng.below(k - 1)) % k);
    g.add_edge(x, a);
    g.add_edge(y, b);
    if (rng.below(2)) g.add_edge(s, static_cast<Vertex>(rng.below(k)));
    return g;
}

// Excluded propagating v between an excluded and an undecided non-propagating vertex.
PdsInstance planted_only_n(Rng& rng) {
    const std::size_t k = 2 + rng.below(6);
    PdsInstance g = generate_random(k, rng.below(std::min<std::size_t>(k * (k - 1) / 2, 8) + 1),
                                    std::array{0.0, 0.5, 1.0}[rng.below(3)], rng.next());
    const Vertex v = g.add_vertex(true, Decision::Excluded);
    const Vertex x = g.add_vertex(false, Decision::Excluded);
    const Vertex y = g.add_vertex(false, Decision::Undecided);
    g.add_edge(v, x);
    g.add_edge(v, y);
    for (Vertex u = 0; u < k; ++u) {
        if (rng.below(3) == 0) g.add_edge(x, u);
        if (rng.below(3) == 0) g.add_edge(y, u);
    }
    return g;
}

Outcome reduction_safety(const std::vector<PdsInstance>& corp) {
    Check c;
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < corp.size(); ++i) {
        const auto o = oracle_pds(corp[i]);
        for (auto name : kRuleSelectionNames)
            c.expect(safe(corp[i], o.gamma, reduce_full(corp[i], RuleSelection::parse(name))),
                     "reduce_full(" + std::string(name) + ") on instance " + std::to_string(i));
    }

    // Per rule: instances where the rule's guard matches at some site.
    std::array<std::size_t, kRuleCount> hits{};
    Rng rng(5);
    auto try_rules = [&](const PdsInstance& g, std::span<const RuleId> rules) {
        const auto o = oracle_pds(g);
        for (RuleId rule : rules) {
            bool matched = false;
            for (Vertex v = 0; v < g.vertex_count(); ++v) {
                const auto app = apply_rule_once(g, rule, v);
                if (!app.changed) continue;
                matched = true;
                c.expect(safe(g, o.gamma, app.result), std::string(rule_name(rule)) + " at vertex " + std::to_string(v) +
                                                           " on\n" + write_instance(g));
            }
            hits[static_cast<std::size_t>(rule)] += matched ? 1 : 0;
        }
    };
    std::array<RuleId, kRuleCount> all{};
    for (std::size_t r = 0; r < kRuleCount; ++r) all[r] = static_cast<RuleId>(r);
    const RuleId deg2c[] = {RuleId::Deg2c};
    const RuleId only_n[] = {RuleId::OnlyN};
    auto enough = [&] { return std::all_of(hits.begin(), hits.end(), [](std::size_t h) { return h >= 4 * kPerRuleMinimum; }); };
    for (int round = 0; round < 20000 && !enough(); ++round) {
        try_rules(corpus::random_extension(rng.next(), 10, 14), all);
        try_rules(planted_deg2c(rng), deg2c);
        try_rules(planted_only_n(rng), only_n);
    }
    std::string counts;
    for (std::size_t r = 0; r < kRuleCount; ++r) {
        counts += (r ? " " : "") + std::string(rule_name(static_cast<RuleId>(r))) + "=" + std::to_string(hits[r]);
        c.expect(hits[r] >= kPerRuleMinimum, std::string(rule_name(static_cast<RuleId>(r))) + " matched only " +
                                                 std::to_string(hits[r]) + " instances");
    }
    const double t = since(t0);
    c.expect(t < kReductionSuiteBudget, "took " + std::to_string(t) + " s");
    return c.done("corpus x " + std::to_string(kRuleSelectionNames.size()) + " selections; per-rule instances: " + counts +
                  "; " + std::to_string(t) + " s");
}

Outcome fort_suite(const std::vector<PdsInstance>& corp) {
    Check c;
    std::size_t emitted = 0;
    Rng rng(17);
    for (std::size_t i = 0; i < corp.size(); ++i) {
        const auto& g = corp[i];
        VertexList h;
        for (Vertex v : g.undecided())
            if (rng.below(4) == 0) h.push_back(v);
        std::vector<Fort> forts;
        try {
            forts = find_forts(g, h, i);
        } catch (const InfeasibleError&) {
            continue;
        }
        for (const auto& f : forts) {
            ++emitted;
            c.expect(is_fort(g, f.vertices), "find_forts emitted a non-fort on instance " + std::to_string(i));
            const auto m = minimize_fort(g, f, f.vertices);
            ++emitted;
            c.expect(is_fort(g, m.vertices), "minimize_fort emitted a non-fort on instance " + std::to_string(i));
        }
    }

    std::size_t optima = 0, fort_count = 0;
    for (std::uint64_t s = 0; s < 400; ++s) {
        const auto g = corpus::random_extension(s, 8, 14);
        const auto o = oracle_pds(g);
        if (!o.gamma) continue;
        const auto forts = bruteforce::enumerate_minimal_forts(g);
        fort_count += forts.size();
        std::vector<VertexList> hoods;
        for (const auto& f : forts) {
            c.expect(is_fort(g, f), "enumerated non-fort");
            hoods.push_back(closed_neighborhood(g, f));
        }
        const VertexList free = g.undecided();
        const std::size_t extra = *o.gamma - g.count(Decision::Selected);
        for (std::uint32_t mask = 0; mask < (1U << free.size()); ++mask) {
            if (static_cast<std::size_t>(__builtin_popcount(mask)) != extra) continue;
            VertexList sel = g.pre_selected();
            for (std::size_t j = 0; j < free.size(); ++j)
                if ((mask >> j) & 1U) sel.push_back(free[j]);
            if (!naive_covers(g, sel)) continue;
            ++optima;
            const SolutionSet opt(sel);
            for (const auto& nf : hoods)
                c.expect(std::any_of(nf.begin(), nf.end(), [&](Vertex v) { return opt.contains(v); }),
                         "an optimum misses a fort neighborhood on seed " + std::to_string(s));
        }
    }
    return c.done(std::to_string(emitted) + " emitted forts valid; " + std::to_string(optima) + " optima x " +
                  std::to_string(fort_count) + " minimal forts (n <= 8)");
}

Outcome incremental_propagation() {
    Check c;
    Rng rng(41);
    std::size_t steps = 0;
    for (std::uint64_t inst = 0; inst < 100; ++inst) {
        const std::size_t n = 2 + rng.below(59);
        const auto g = generate_random(n, rng.below(std::min<std::size_t>(n * (n - 1) / 2, 2 * n) + 1),
                                       0.5 * static_cast<double>(inst % 3), inst);
        ObservationState st(g);
        for (int step = 0; step < 100; ++step, ++steps) {
            const auto v = static_cast<Vertex>(rng.below(n));
            if (st.is_selected(v))
                st.deselect(v);
            else
                st.select(v);
            const auto sel = st.selected_set();
            const auto fresh = bruteforce::naive_observed(g, sel);
            VertexList expect;
            for (Vertex u = 0; u < n; ++u)
                if (fresh[u]) expect.push_back(u);
            c.expect(st.observed_set() == expect, "instance " + std::to_string(inst) + " step " + std::to_string(step));
        }
    }
    return c.done(std::to_string(steps) + " steps over 100 instances");
}

std::size_t brute_force_hs(const HittingSetInstance& hs) {
    VertexList universe(hs.forced());
    for (const auto& s : hs.sets()) universe.insert(universe.end(), s.begin(), s.end());
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
    std::size_t best = universe.size();
    VertexList pick;
    for (std::uint32_t mask = 0; mask < (1U << universe.size()); ++mask) {
        const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
        if (size >= best) continue;
        pick.clear();
        for (std::size_t i = 0; i < universe.size(); ++i)
            if ((mask >> i) & 1U) pick.push_back(universe[i]);
        if (hs.is_hitting_set(pick)) best = size;
    }
    return best;
}

HittingSetInstance random_family(Rng& rng, std::size_t universe, std::size_t sets) {
    HittingSetInstance hs;
    for (std::size_t i = 0; i < sets; ++i) {
        VertexList s;
        const std::size_t size = 1 + rng.below(std::min<std::size_t>(universe, 5));
        while (s.size() < size) {
            const auto v = static_cast<Vertex>(rng.below(universe));
            if (std::find(s.begin(), s.end(), v) == s.end()) s.push_back(v);
        }
        hs.add_set(s);
    }
    return hs;
}

Outcome hitting_set_suite() {
    Check c;
    Rng rng(2024);
    for (int t = 0; t < 500; ++t) {
        const auto hs = random_family(rng, 1 + rng.below(12), 1 + rng.below(8));
        const auto r = solve_exact(hs);
        const auto expect = brute_force_hs(hs);
        c.expect(r.optimal && hs.is_hitting_set(r.solution) && r.size() == expect,
                 "family " + std::to_string(t) + ": " + std::to_string(r.size()) + " vs " + std::to_string(expect));
    }
    std::size_t sequences = 0;
    for (int t = 0; t < 100; ++t, ++sequences) {
        HittingSetInstance hs;
        std::size_t previous = 0;
        for (int batch = 0; batch < 5; ++batch) {
            hs.add_sets(random_family(rng, 12, 2).sets());
            HittingSetOptions opt;
            opt.lower_bound = previous;
            const auto r = solve_exact(hs, opt);
            const auto expect = brute_force_hs(hs);
            c.expect(expect >= previous, "optimum shrank as sets were added");
            c.expect(r.size() == expect && r.lower_bound >= previous && r.lower_bound <= r.size(),
                     "sequence " + std::to_string(t) + " batch " + std::to_string(batch));
            previous = r.lower_bound;
        }
    }
    return c.done("500 families exact; " + std::to_string(sequences) + " add_sets sequences monotone");
}

Outcome hardness_chain() {
    Check c;
    const auto t0 = Clock::now();
    std::size_t largest = 0;
    for (std::uint64_t s = 0; s < kCircuits; ++s) {
        const auto circ = random_circuit(1 + s % 4, s % 5, s);
        const auto chain = full_chain(circ);
        largest = std::max(largest, chain.instance.vertex_count());
        const auto o = bruteforce::oracle_pds_branching(chain.instance);
        const auto w = wmcs_min_weight(circ);
        c.expect(o.gamma && w && *o.gamma == *w + static_cast<std::size_t>(chain.total_shift) &&
                     naive_covers(chain.instance, o.witness.selected),
                 "circuit " + std::to_string(s) + ":\n" + write_circuit(circ));
    }
    // the branching oracle used above agrees with plain enumeration
    for (std::uint64_t s = 0; s < 300; ++s) {
        const auto g = corpus::random_extension(s, 11, 18);
        c.expect(bruteforce::oracle_pds_branching(g).gamma == oracle_pds(g).gamma, "branching oracle disagrees on seed " + std::to_string(s));
    }

    std::array<std::size_t, 5> checked{};
    for (std::uint64_t s = 0; checked[0] < kPerTransformMinimum; ++s) {
        const auto circ = random_circuit(1 + s % 5, s % 6, s);
        const auto t = wmcs_to_ipds_ext(circ);
        c.expect(oracle_ipds(t.instance).gamma == wmcs_min_weight(circ) && t.parameter_shift == 0, "wmcs_to_ipds_ext");
        ++checked[0];
    }
    for (std::uint64_t s = 0; checked[1] < kPerTransformMinimum; ++s) {
        const auto inst = corpus::random_ipds(s, 4, 6, 2, 2);
        const auto before = oracle_ipds(inst);
        if (!before.gamma) continue;
        const auto t = ipds_ext_to_ipds(inst);
        c.expect(oracle_ipds(t.instance, *before.gamma).gamma == before.gamma && t.parameter_shift == 0,
                 "ipds_ext_to_ipds on\n" + write_instance(inst.graph()));
        ++checked[1];
    }
    for (std::uint64_t s = 0; checked[2] < kPerTransformMinimum; ++s) {
        const auto inst = corpus::random_ipds(s, 7, 10, 2, 3);
        const auto before = oracle_ipds(inst);
        if (!before.gamma || inst.arcs().empty()) continue;
        const auto t = eliminate_implication_arcs(inst);
        c.expect(oracle_ipds(t.instance).gamma == before.gamma && t.parameter_shift == 0 && t.instance.arcs().empty(),
                 "eliminate_implication_arcs on\n" + write_instance(inst.graph()));
        ++checked[2];
    }
    for (std::uint64_t s = 0; checked[3] < kPerTransformMinimum; ++s) {
        const auto inst = corpus::random_ipds(s, 7, 10, 3, 0);
        const auto before = oracle_ipds(inst);
        if (!before.gamma || inst.boosters().empty()) continue;
        const auto t = eliminate_booster_edges(inst);
        const auto after = oracle_pds(t.instance.graph());
        c.expect(t.instance.plain() && after.gamma && *after.gamma == *before.gamma + static_cast<std::size_t>(t.parameter_shift),
                 "eliminate_booster_edges on\n" + write_instance(inst.graph()));
        ++checked[3];
    }
    for (std::uint64_t s = 0; checked[4] < kPerTransformMinimum; ++s) {
        const auto g = corpus::random_extension(s, 10, 16);
        const auto before = oracle_pds(g);
        if (!before.gamma) continue;
        const auto t = pds_to_simple(g);
        c.expect(oracle_pds(t.instance.graph()).gamma == before.gamma && t.parameter_shift == 0,
                 "pds_to_simple on\n" + write_instance(g));
        ++checked[4];
    }
    const double t = since(t0);
    c.expect(t < kHardnessBudget, "took " + std::to_string(t) + " s");
    return c.done(std::to_string(kCircuits) + " circuits end to end (largest chain output " + std::to_string(largest) +
                  " vertices); " + std::to_string(kPerTransformMinimum) + " feasible instances per transform; " +
                  std::to_string(t) + " s");
}

Outcome milp_suite() {
    Check c;
    std::size_t feasible = 0;
    for (std::uint64_t s = 0; s < 500; ++s) {
        const auto g = corpus::random_extension(s, 8, 14);
        const auto e = milp::check_model_by_enumeration(milp::build_pds_milp(g));
        const auto o = oracle_pds(g);
        const bool same = e.optimum.has_value() == o.gamma.has_value() &&
                          (!o.gamma || *e.optimum == static_cast<double>(*o.gamma));
        c.expect(same, "seed " + std::to_string(s) + ": model " + (e.optimum ? std::to_string(*e.optimum) : "infeasible") +
                           " oracle " + show(o.gamma));
        feasible += o.gamma ? 1 : 0;
    }
    return c.done("500 instances (n <= 8, " + std::to_string(feasible) + " feasible)");
}

Outcome paper_instances(const std::filesystem::path& data, bool earlier_passed) {
    Check c;
    std::string summary;
    bool found = false;
    for (auto [name, gamma, budget] : {std::tuple{"texas", kTexasGamma, kTexasBudget},
                                       std::tuple{"western", kWesternGamma, kWesternBudget}}) {
        const auto path = data / (std::string(name) + ".pds");
        std::ifstream in(path);
        if (!in) {
            summary += std::string(name) + ": not found; ";
            continue;
        }
        found = true;
        const auto g = parse_instance(in);
        const auto t0 = Clock::now();
        const auto r = solve(g);
        const double t = since(t0);
        c.expect(r.gamma_p == gamma && t <= budget, std::string(name) + ": gamma " + show(r.gamma_p) + " in " +
                                                        std::to_string(t) + " s");
        c.expect(!r.solution || is_power_dominating(g, std::span<const Vertex>(r.solution->selected)),
                 std::string(name) + ": solution does not observe the graph");
        summary += std::string(name) + " n=" + std::to_string(g.vertex_count()) + " gamma=" + show(r.gamma_p) +
                   " (want " + std::to_string(gamma) + ") " + std::to_string(t) + " s; ";
    }
    if (!found) {
        if (!earlier_passed) c.fail("instances missing and criteria 1-7 did not all pass");
        return c.done(summary + "replaced by criteria 1-7");
    }
    return c.done(summary);
}

Outcome bounds_trace(const std::vector<PdsInstance>& corp) {
    Check c;
    std::size_t traced = 0;
    for (std::size_t i = 0; i < corp.size(); ++i) {
        const auto o = oracle_pds(corp[i]);
        if (!o.gamma) continue;
        for (const char* name : {"all", "none"}) {
            BoundsTrace trace;
            SolveConfig cfg;
            cfg.trace = &trace;
            cfg.reductions = RuleSelection::parse(name);
            solve(corp[i], cfg);
            ++traced;
            for (const auto& e : trace.events()) {
                const bool ok = e.kind == BoundKind::Lower ? e.value <= *o.gamma : e.value >= *o.gamma;
                c.expect(ok, "instance " + std::to_string(i) + " " + name + ": bound " + std::to_string(e.value) +
                                 " against optimum " + std::to_string(*o.gamma));
            }
        }
    }
    const auto stars = corpus::disjoint_union(corpus::disjoint_union(corpus::star(3), corpus::star(3)), corpus::star(3));
    std::vector<std::size_t> lows;
    KernelOptions opt;
    opt.on_bound = [&](BoundKind k, std::size_t v) {
        if (k == BoundKind::Lower) lows.push_back(v);
    };
    const auto r = ihs_kernel_solve(stars, opt);
    std::size_t jump = lows.empty() ? 0 : lows.front();
    for (std::size_t i = 1; i < lows.size(); ++i) jump = std::max(jump, lows[i] - lows[i - 1]);
    c.expect(r.gamma_p == 3u, "three stars: gamma " + show(r.gamma_p));
    c.expect(jump >= 2, "three stars: largest lower-bound jump " + std::to_string(jump));
    return c.done(std::to_string(traced) + " traced solves sound; three stars lower-bound jump " + std::to_string(jump));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::string data = "data";
    app.add_option("--data", data, "directory holding texas.pds and western.pds");
    CLI11_PARSE(app, argc, argv);

    const auto corp = build_corpus();
    bool all = true;
    bool first_seven = true;
    auto report = [&](int id, const std::function<Outcome()>& run) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %d %s: %s [%.2f s]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), since(t0));
        std::fflush(stdout);
        all = all && o.pass;
        if (id <= 7) first_seven = first_seven && o.pass;
    };
    report(1, [&] { return oracle_equivalence(corp); });
    report(2, [&] { return reduction_safety(corp); });
    report(3, [&] { return fort_suite(corp); });
    report(4, incremental_propagation);
    report(5, hitting_set_suite);
    report(6, hardness_chain);
    report(7, milp_suite);
    report(8, [&] { return paper_instances(data, first_seven); });
    report(9, [&] { return bounds_trace(corp); });
    return all ? 0 : 1;
}
