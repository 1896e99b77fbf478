#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pds/pds.hpp"

namespace {

using nlohmann::json;

enum Exit : int { kOk = 0, kUsage = 1, kInfeasible = 2, kTimeout = 3 };

struct InputOptions {
    std::string path;
    std::string format = "pds";
};

pds::PdsInstance load(const InputOptions& in) {
    std::ifstream file(in.path);
    if (!file) throw pds::Error("cannot open '" + in.path + "'");
    const auto fmt = in.format == "edgelist" ? pds::InstanceFormat::EdgeList : pds::InstanceFormat::Pds;
    return pds::parse_instance(file, fmt);
}

void save(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw pds::Error("cannot write '" + path + "'");
    out << text;
}

void add_input(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("instance", in.path, "instance file")->required();
    cmd->add_option("--format", in.format, "input format")->check(CLI::IsMember({"pds", "edgelist"}));
}

json rule_stats(const pds::ReductionStats& s) {
    json j = json::object();
    for (std::size_t r = 0; r < pds::kRuleCount; ++r)
        j[std::string(pds::rule_name(static_cast<pds::RuleId>(r)))] = s.applied[r];
    return j;
}

struct SolveArgs {
    InputOptions in;
    std::string reductions = "all";
    std::uint64_t seed = 0;
    std::optional<double> time_limit;
    std::string trace;
    bool json = false;
    unsigned jobs = 1;
};

int cmd_solve(const SolveArgs& a) {
    const auto inst = load(a.in);
    pds::SolveConfig cfg;
    cfg.reductions = pds::RuleSelection::parse(a.reductions);
    cfg.seed = a.seed;
    cfg.time_limit_s = a.time_limit;
    cfg.jobs = a.jobs;
    pds::BoundsTrace trace;
    if (!a.trace.empty()) cfg.trace = &trace;
    const auto r = pds::solve(inst, cfg);
    if (!a.trace.empty()) {
        std::ofstream out(a.trace);
        if (!out) throw pds::Error("cannot write '" + a.trace + "'");
        trace.write_csv(out);
    }
    if (a.json) {
        json j;
        j["status"] = std::string(pds::status_name(r.status));
        j["gamma_p"] = r.gamma_p ? json(*r.gamma_p) : json(nullptr);
        j["lower_bound"] = r.lower_bound;
        j["upper_bound"] = r.upper_bound;
        j["fort_count"] = r.fort_count;
        j["hitting_set_solves"] = r.hitting_set_solves;
        j["rule_stats"] = rule_stats(r.rule_stats);
        j["wall_time_s"] = r.wall_time_s;
        j["seed"] = a.seed;
        std::cout << j.dump() << '\n';
    } else {
        std::cout << "status " << pds::status_name(r.status) << '\n';
        if (r.gamma_p)
            std::cout << "gamma_p " << *r.gamma_p << '\n';
        else if (r.status == pds::SolveStatus::TimedOut)
            std::cout << "bounds " << r.lower_bound << ' ' << r.upper_bound << '\n';
        std::cout << "forts " << r.fort_count << "\nhitting_set_solves " << r.hitting_set_solves << '\n';
        std::cout << "rules";
        for (std::size_t k = 0; k < pds::kRuleCount; ++k)
            std::cout << ' ' << pds::rule_name(static_cast<pds::RuleId>(k)) << '=' << r.rule_stats.applied[k];
        std::cout << "\nwall_time_s " << r.wall_time_s << '\n';
        if (r.solution) {
            std::cout << "solution";
            for (auto v : r.solution->selected) std::cout << ' ' << v;
            std::cout << '\n';
        }
    }
    switch (r.status) {
    case pds::SolveStatus::Optimal: return kOk;
    case pds::SolveStatus::Infeasible: return kInfeasible;
    case pds::SolveStatus::TimedOut: return kTimeout;
    }
    return kOk;
}

int cmd_reduce(const InputOptions& in, const std::string& reductions, const std::string& output, bool as_json) {
    const auto inst = load(in);
    const auto red = pds::reduce_full(inst, pds::RuleSelection::parse(reductions));
    if (!output.empty()) save(output, pds::write_instance(red.kernel));
    const auto& s = red.stats;
    if (as_json) {
        json j;
        j["kernel_vertices"] = s.kernel_vertices;
        j["kernel_edges"] = s.kernel_edges;
        j["kernel_pre_selected"] = s.kernel_pre_selected;
        j["kernel_excluded"] = s.kernel_excluded;
        j["kernel_undecided"] = red.kernel.count(pds::Decision::Undecided);
        j["forced"] = red.log.forced;
        j["rule_stats"] = rule_stats(s);
        std::cout << j.dump() << '\n';
    } else {
        std::cout << "kernel " << s.kernel_vertices << " vertices, " << s.kernel_edges << " edges, "
                  << red.kernel.count(pds::Decision::Undecided) << " undecided\n";
        std::cout << "forced " << red.log.forced.size() << '\n';
    }
    return kOk;
}

int cmd_oracle(const InputOptions& in, std::optional<std::size_t> k_max, bool as_json) {
    const auto inst = load(in);
    const auto r = pds::bruteforce::oracle_pds(inst, k_max);
    if (as_json) {
        json j;
        j["gamma_p"] = r.gamma ? json(*r.gamma) : json(nullptr);
        j["witness"] = r.witness.selected;
        std::cout << j.dump() << '\n';
    } else if (r.gamma) {
        std::cout << "gamma_p " << *r.gamma << "\nwitness";
        for (auto v : r.witness.selected) std::cout << ' ' << v;
        std::cout << '\n';
    } else {
        std::cout << "infeasible\n";
    }
    return r.gamma ? kOk : kInfeasible;
}

int cmd_export(const InputOptions& in, const std::string& model, const std::string& output, std::uint64_t seed) {
    const auto inst = load(in);
    pds::milp::MilpModel m;
    if (model == "pds-milp") {
        m = pds::milp::build_pds_milp(inst);
    } else if (model == "fort-ilp") {
        m = pds::milp::build_fort_ilp(inst, pds::observation_neighborhood(inst, {}));
    } else {
        pds::HittingSetInstance hs(inst.pre_selected());
        for (const auto& f : pds::find_forts(inst, {}, seed)) hs.add_set(pds::closed_neighborhood(inst, f.vertices));
        m = pds::milp::build_hitting_set_ilp(hs, inst.excluded());
    }
    const std::string path = output.empty() ? in.path + "." + model + ".lp" : output;
    save(path, pds::milp::write_lp(m));
    std::cout << path << '\n';
    return kOk;
}

int cmd_transform(const std::string& path, const std::string& output, bool as_json) {
    std::ifstream file(path);
    if (!file) throw pds::Error("cannot open '" + path + "'");
    const auto circuit = pds::parse_circuit(file);
    const auto chain = pds::full_chain(circuit);
    const std::string out =
        output.empty() ? std::filesystem::path(path).replace_extension(".pds").string() : output;
    save(out, pds::write_instance(chain.instance));
    if (as_json) {
        json j;
        j["output"] = out;
        j["vertices"] = chain.instance.vertex_count();
        j["edges"] = chain.instance.edge_count();
        j["total_shift"] = chain.total_shift;
        json steps = json::array();
        for (const auto& s : chain.steps) steps.push_back(s.parameter_shift);
        j["step_shifts"] = steps;
        std::cout << j.dump() << '\n';
    } else {
        std::cout << out << "\nshift " << chain.total_shift << '\n';
    }
    return kOk;
}

int cmd_gen(std::size_t n, std::size_t m, double frac, std::uint64_t seed, const std::string& output) {
    const std::string text = pds::write_instance(pds::generate_random(n, m, frac, seed));
    if (output.empty())
        std::cout << text;
    else
        save(output, text);
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact power dominating set toolkit"};
    app.require_subcommand(1);

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "compute the power domination number");
    add_input(s, solve.in);
    s->add_option("--reductions", solve.reductions, "rule subset")
        ->check(CLI::IsMember({"all", "local", "nonlocal", "local+dom", "local+necn", "none"}));
    s->add_option("--seed", solve.seed, "random seed");
    s->add_option("--time-limit", solve.time_limit, "seconds")->check(CLI::PositiveNumber);
    s->add_option("--trace", solve.trace, "write bound events as CSV");
    s->add_option("--jobs", solve.jobs, "parallel workers over subinstances")->check(CLI::Range(1U, 1024U));
    s->add_flag("--json", solve.json, "print a JSON summary");

    InputOptions red_in;
    std::string red_rules = "all", red_out;
    bool red_json = false;
    auto* r = app.add_subcommand("reduce", "apply the reduction rules and write the kernel");
    add_input(r, red_in);
    r->add_option("--reductions", red_rules, "rule subset")
        ->check(CLI::IsMember({"all", "local", "nonlocal", "local+dom", "local+necn", "none"}));
    r->add_option("-o,--output", red_out, "kernel file");
    r->add_flag("--json", red_json, "print a JSON summary");

    InputOptions or_in;
    std::optional<std::size_t> or_k;
    bool or_json = false;
    auto* o = app.add_subcommand("oracle", "brute-force optimum of a small instance");
    add_input(o, or_in);
    o->add_option("--k-max", or_k, "largest solution size to try");
    o->add_flag("--json", or_json, "print JSON");

    InputOptions ex_in;
    std::string ex_model = "pds-milp", ex_out;
    std::uint64_t ex_seed = 0;
    auto* e = app.add_subcommand("export-milp", "write an integer program in LP format");
    add_input(e, ex_in);
    e->add_option("--model", ex_model, "model kind")->check(CLI::IsMember({"pds-milp", "hs-ilp", "fort-ilp"}));
    e->add_option("-o,--output", ex_out, "LP file (default <instance>.<model>.lp)");
    e->add_option("--seed", ex_seed, "seed for the initial forts of hs-ilp");

    std::string tc_path, tc_out;
    bool tc_json = false;
    auto* t = app.add_subcommand("transform-circuit", "reduce a monotone circuit to a PDS instance");
    t->add_option("circuit", tc_path, "circuit file")->required();
    t->add_option("-o,--output", tc_out, "instance file (default <circuit>.pds)");
    t->add_flag("--json", tc_json, "print JSON");

    std::size_t gen_n = 0, gen_m = 0;
    double gen_frac = 0;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    auto* g = app.add_subcommand("gen", "generate a random instance");
    g->add_option("-n,--vertices", gen_n, "vertex count")->required();
    g->add_option("-m,--edges", gen_m, "edge count")->required();
    g->add_option("--nonprop", gen_frac, "fraction of non-propagating vertices")->check(CLI::Range(0.0, 1.0));
    g->add_option("--seed", gen_seed, "random seed");
    g->add_option("-o,--output", gen_out, "instance file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::CallForAllHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
        app.exit(ex);
        return kUsage;
    }

    try {
        if (*s) return cmd_solve(solve);
        if (*r) return cmd_reduce(red_in, red_rules, red_out, red_json);
        if (*o) return cmd_oracle(or_in, or_k, or_json);
        if (*e) return cmd_export(ex_in, ex_model, ex_out, ex_seed);
        if (*t) return cmd_transform(tc_path, tc_out, tc_json);
        if (*g) return cmd_gen(gen_n, gen_m, gen_frac, gen_seed, gen_out);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
