#pragma once

// Integer programs for PDS, for the hitting set step and for a minimum
// violated fort, written as CPLEX-style LP files. No solver is called; the
// enumeration checker validates small models.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pds/hitting_set.hpp"
#include "pds/instance.hpp"

namespace pds::milp {

enum class VarType : std::uint8_t { Binary, Continuous };
enum class Sense : std::uint8_t { LessEq, GreaterEq, Equal };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Variable {
    std::string name;
    VarType type = VarType::Continuous;
    double lower = 0;
    double upper = kInf;
    friend bool operator==(const Variable&, const Variable&) = default;
};

struct Term {
    std::uint32_t var;
    double coef;
    friend bool operator==(const Term&, const Term&) = default;
};

struct Row {
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::GreaterEq;
    double rhs = 0;
    friend bool operator==(const Row&, const Row&) = default;
};

/// Minimization model over binary and continuous variables.
class MilpModel {
public:
    std::string name;

    std::uint32_t add_binary(std::string n) { return add_variable(std::move(n), VarType::Binary, 0, 1); }

    std::uint32_t add_variable(std::string n, VarType type, double lower, double upper) {
        if (index_.count(n)) throw Error("duplicate variable '" + n + "'");
        index_[n] = static_cast<std::uint32_t>(vars_.size());
        vars_.push_back({std::move(n), type, lower, upper});
        return static_cast<std::uint32_t>(vars_.size() - 1);
    }

    void add_row(std::string n, std::vector<Term> terms, Sense sense, double rhs) {
        for (const auto& t : terms)
            if (t.var >= vars_.size()) throw Error("row '" + n + "' refers to an unknown variable");
        rows_.push_back({std::move(n), std::move(terms), sense, rhs});
    }

    void add_objective(std::uint32_t var, double coef) { objective_.push_back({var, coef}); }

    const std::vector<Variable>& variables() const { return vars_; }
    Variable& variable(std::uint32_t i) { return vars_[i]; }
    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<Term>& objective() const { return objective_; }

    std::optional<std::uint32_t> find(const std::string& n) const {
        auto it = index_.find(n);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::uint32_t at(const std::string& n) const {
        if (auto i = find(n)) return *i;
        throw Error("unknown variable '" + n + "'");
    }

    /// Rows whose name starts with `prefix`.
    std::size_t count_rows(std::string_view prefix) const {
        return static_cast<std::size_t>(std::count_if(rows_.begin(), rows_.end(), [&](const Row& r) {
            return std::string_view(r.name).substr(0, prefix.size()) == prefix;
        }));
    }

    std::size_t binary_count() const {
        return static_cast<std::size_t>(
            std::count_if(vars_.begin(), vars_.end(), [](const Variable& v) { return v.type == VarType::Binary; }));
    }

private:
    std::vector<Variable> vars_;
    std::vector<Row> rows_;
    std::vector<Term> objective_;
    std::map<std::string, std::uint32_t> index_;
};

inline std::string x_name(Vertex v) { return "x_" + std::to_string(v); }
inline std::string s_name(Vertex v) { return "s_" + std::to_string(v); }
inline std::string y_name(Vertex v) { return "y_" + std::to_string(v); }
inline std::string p_name(Vertex u, Vertex v) { return "p_" + std::to_string(u) + "_" + std::to_string(v); }

/// PDS model with step variables s_v in [1, n], propagation arcs p_{v,w} and
/// big-M = n. Row names carry the family: dom, obs, in, out, step, sel,
/// exc, np.
inline MilpModel build_pds_milp(const PdsInstance& inst) {
    const std::size_t n = inst.vertex_count();
    const double big_m = static_cast<double>(n);
    MilpModel m;
    m.name = "pds";
    std::vector<std::uint32_t> x(n), s(n);
    for (Vertex v = 0; v < n; ++v) x[v] = m.add_binary(x_name(v));
    for (Vertex v = 0; v < n; ++v) s[v] = m.add_variable(s_name(v), VarType::Continuous, 1, big_m);
    std::map<std::pair<Vertex, Vertex>, std::uint32_t> p;
    for (Vertex v = 0; v < n; ++v)
        for (Vertex w : inst.neighbors(v)) p[{v, w}] = m.add_binary(p_name(v, w));
    for (Vertex v = 0; v < n; ++v) m.add_objective(x[v], 1);

    auto closed = [&](Vertex v) {
        VertexList out(inst.neighbors(v).begin(), inst.neighbors(v).end());
        out.insert(std::lower_bound(out.begin(), out.end(), v), v);
        return out;
    };
    const std::string sep = "_";
    for (Vertex v = 0; v < n; ++v)
        for (Vertex t : closed(v))
            m.add_row("dom_" + std::to_string(v) + sep + std::to_string(t), {{s[v], 1}, {x[t], big_m - 1}},
                      Sense::LessEq, big_m);
    for (Vertex v = 0; v < n; ++v) {
        std::vector<Term> terms{{s[v], 1}, {x[v], -big_m}};
        for (Vertex w : inst.neighbors(v)) {
            terms.push_back({x[w], -big_m});
            terms.push_back({p[{w, v}], -big_m});
        }
        m.add_row("obs_" + std::to_string(v), std::move(terms), Sense::LessEq, 0);
    }
    for (Vertex v = 0; v < n; ++v) {
        if (inst.degree(v) == 0) continue;
        std::vector<Term> in, out;
        for (Vertex w : inst.neighbors(v)) {
            in.push_back({p[{w, v}], 1});
            out.push_back({p[{v, w}], 1});
        }
        m.add_row("in_" + std::to_string(v), std::move(in), Sense::LessEq, 1);
        m.add_row("out_" + std::to_string(v), std::move(out), Sense::LessEq, 1);
    }
    for (Vertex v = 0; v < n; ++v)
        for (Vertex w : inst.neighbors(v))
            for (Vertex t : closed(w)) {
                if (t == v) continue;
                m.add_row("step_" + std::to_string(v) + sep + std::to_string(w) + sep + std::to_string(t),
                          {{s[v], 1}, {s[t], -1}, {p[{w, v}], -big_m}}, Sense::GreaterEq, 1 - big_m);
            }
    for (Vertex v = 0; v < n; ++v) {
        if (inst.is_pre_selected(v)) m.add_row("sel_" + std::to_string(v), {{x[v], 1}}, Sense::Equal, 1);
        if (inst.is_excluded(v)) m.add_row("exc_" + std::to_string(v), {{x[v], 1}}, Sense::Equal, 0);
    }
    for (Vertex v = 0; v < n; ++v) {
        if (inst.is_propagating(v)) continue;
        for (Vertex w : inst.neighbors(v))
            m.add_row("np_" + std::to_string(v) + sep + std::to_string(w), {{p[{v, w}], 1}}, Sense::Equal, 0);
    }
    return m;
}

/// One covering row per set; forced elements fixed to 1 and `excluded`
/// elements to 0.
inline MilpModel build_hitting_set_ilp(const HittingSetInstance& hs, std::span<const Vertex> excluded = {}) {
    VertexList universe(hs.forced());
    for (const auto& set : hs.sets()) universe.insert(universe.end(), set.begin(), set.end());
    universe.insert(universe.end(), excluded.begin(), excluded.end());
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
    MilpModel m;
    m.name = "hitting-set";
    std::map<Vertex, std::uint32_t> var;
    for (Vertex v : universe) {
        var[v] = m.add_binary(s_name(v));
        m.add_objective(var[v], 1);
    }
    for (std::size_t i = 0; i < hs.sets().size(); ++i) {
        std::vector<Term> terms;
        for (Vertex v : hs.sets()[i]) terms.push_back({var[v], 1});
        m.add_row("hit_" + std::to_string(i), std::move(terms), Sense::GreaterEq, 1);
    }
    for (Vertex v : hs.forced()) m.add_row("sel_" + std::to_string(v), {{var[v], 1}}, Sense::Equal, 1);
    for (Vertex v : excluded) m.add_row("exc_" + std::to_string(v), {{var[v], 1}}, Sense::Equal, 0);
    return m;
}

/// Minimum closed neighborhood of a fort avoiding the observed set R:
/// x_v marks the fort, y_v its closed neighborhood. The closure row for a
/// propagating v and u in N(v) reads x_v + sum_{w in N(v), w != u} x_w >= x_u.
/// For R closed under propagation, feasible exactly when R != V.
inline MilpModel build_fort_ilp(const PdsInstance& inst, std::span<const Vertex> observed) {
    const std::size_t n = inst.vertex_count();
    MilpModel m;
    m.name = "fort";
    std::vector<std::uint32_t> x(n), y(n);
    for (Vertex v = 0; v < n; ++v) x[v] = m.add_binary(x_name(v));
    for (Vertex v = 0; v < n; ++v) {
        y[v] = m.add_binary(y_name(v));
        m.add_objective(y[v], 1);
    }
    std::vector<Term> any;
    for (Vertex v = 0; v < n; ++v) any.push_back({x[v], 1});
    m.add_row("nonempty", std::move(any), Sense::GreaterEq, 1);
    for (Vertex r : observed) {
        if (r >= n) throw Error("observed vertex out of range");
        m.add_row("obs_" + std::to_string(r), {{x[r], 1}}, Sense::Equal, 0);
    }
    for (Vertex v = 0; v < n; ++v) {
        if (!inst.is_propagating(v)) continue;
        for (Vertex u : inst.neighbors(v)) {
            std::vector<Term> terms{{x[v], 1}};
            for (Vertex w : inst.neighbors(v))
                if (w != u) terms.push_back({x[w], 1});
            terms.push_back({x[u], -1});
            m.add_row("fort_" + std::to_string(v) + "_" + std::to_string(u), std::move(terms), Sense::GreaterEq, 0);
        }
    }
    for (Vertex v = 0; v < n; ++v) {
        m.add_row("nb_" + std::to_string(v) + "_" + std::to_string(v), {{y[v], 1}, {x[v], -1}}, Sense::GreaterEq, 0);
        for (Vertex w : inst.neighbors(v))
            m.add_row("nb_" + std::to_string(v) + "_" + std::to_string(w), {{y[v], 1}, {x[w], -1}}, Sense::GreaterEq, 0);
    }
    return m;
}

namespace detail {

inline std::string format_number(double v) {
    if (v == kInf) return "+inf";
    if (v == -kInf) return "-inf";
    if (v == std::floor(v) && std::abs(v) < 1e15) return std::to_string(static_cast<long long>(v));
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

inline void write_terms(std::ostream& out, const MilpModel& m, const std::vector<Term>& terms) {
    if (terms.empty()) {
        out << " 0";
        return;
    }
    std::size_t on_line = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const double c = terms[i].coef;
        if (on_line == 8) {
            out << "\n   ";
            on_line = 0;
        }
        out << ' ' << (c < 0 ? '-' : '+') << ' ';
        if (std::abs(c) != 1) out << format_number(std::abs(c)) << ' ';
        out << m.variables()[terms[i].var].name;
        ++on_line;
    }
}

inline const char* sense_text(Sense s) {
    switch (s) {
    case Sense::LessEq: return "<=";
    case Sense::GreaterEq: return ">=";
    case Sense::Equal: return "=";
    }
    return "?";
}

} // namespace detail

/// CPLEX LP text: Minimize / Subject To / Bounds / Binaries / End. Bounds
/// and Binaries are listed by name so the text does not depend on the
/// order variables were first mentioned.
inline void write_lp(std::ostream& out, const MilpModel& m) {
    out << "\\ " << (m.name.empty() ? "model" : m.name) << '\n';
    out << "Minimize\n obj:";
    detail::write_terms(out, m, m.objective());
    out << "\nSubject To\n";
    for (const auto& r : m.rows()) {
        out << ' ' << r.name << ':';
        detail::write_terms(out, m, r.terms);
        out << ' ' << detail::sense_text(r.sense) << ' ' << detail::format_number(r.rhs) << '\n';
    }
    std::vector<const Variable*> sorted;
    for (const auto& v : m.variables()) sorted.push_back(&v);
    std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a->name < b->name; });
    out << "Bounds\n";
    for (const Variable* v : sorted) {
        if (v->type != VarType::Continuous) continue;
        if (v->lower == -kInf && v->upper == kInf)
            out << ' ' << v->name << " free\n";
        else
            out << ' ' << detail::format_number(v->lower) << " <= " << v->name << " <= " << detail::format_number(v->upper)
                << '\n';
    }
    out << "Binaries\n";
    for (const Variable* v : sorted)
        if (v->type == VarType::Binary) out << ' ' << v->name << '\n';
    out << "End\n";
}

inline std::string write_lp(const MilpModel& m) {
    std::ostringstream out;
    write_lp(out, m);
    return out.str();
}

namespace detail {

inline bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

inline bool valid_name(std::string_view s) {
    if (s.empty() || !is_name_start(s[0])) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
    });
}

inline std::optional<double> parse_number(std::string_view s) {
    if (s == "+inf" || s == "inf" || s == "+infinity" || s == "infinity") return kInf;
    if (s == "-inf" || s == "-infinity") return -kInf;
    double v = 0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

class LpReader {
public:
    explicit LpReader(std::istream& in) {
        std::string raw;
        std::size_t lineno = 0;
        while (std::getline(in, raw)) {
            ++lineno;
            if (auto c = raw.find('\\'); c != std::string::npos) {
                if (lineno == 1 && c == 0) model_.name = std::string(pds::detail::trim(raw.substr(1)));
                raw.erase(c);
            }
            lines_.push_back({lineno, std::string(pds::detail::trim(raw))});
        }
    }

    MilpModel read() {
        enum class Part { None, Objective, Rows, Bounds, Binaries, Done } part = Part::None;
        std::vector<std::pair<std::size_t, std::string>> tokens;  // objective and rows
        auto flush = [&](Part p) {
            if (p == Part::Objective) parse_objective(tokens);
            if (p == Part::Rows) parse_rows(tokens);
            tokens.clear();
        };
        for (const auto& [lineno, text] : lines_) {
            if (text.empty()) continue;
            std::string lower(text);
            std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
            Part next = Part::None;
            if (lower == "minimize" || lower == "minimum" || lower == "min")
                next = Part::Objective;
            else if (lower == "subject to" || lower == "such that" || lower == "st" || lower == "s.t.")
                next = Part::Rows;
            else if (lower == "bounds")
                next = Part::Bounds;
            else if (lower == "binaries" || lower == "binary" || lower == "bin")
                next = Part::Binaries;
            else if (lower == "end")
                next = Part::Done;
            else if (lower == "maximize" || lower == "maximum" || lower == "max")
                throw ParseError(lineno, "only minimization models are supported");
            else if (lower == "generals" || lower == "general" || lower == "semi-continuous")
                throw ParseError(lineno, "unsupported section '" + text + "'");
            if (next != Part::None) {
                if (part == Part::None && next != Part::Objective)
                    throw ParseError(lineno, "expected the objective section first");
                if (next <= part) throw ParseError(lineno, "section out of order: " + text);
                flush(part);
                part = next;
                continue;
            }
            switch (part) {
            case Part::None: throw ParseError(lineno, "text before the objective section");
            case Part::Done: throw ParseError(lineno, "text after End");
            case Part::Objective:
            case Part::Rows:
                for (auto& t : pds::detail::split_ws(text)) tokens.emplace_back(lineno, std::move(t));
                break;
            case Part::Bounds: parse_bound(lineno, pds::detail::split_ws(text)); break;
            case Part::Binaries:
                for (auto& t : pds::detail::split_ws(text)) {
                    auto& decl = model_.variable(var(lineno, t));
                    decl.type = VarType::Binary;
                    decl.lower = 0;
                    decl.upper = 1;
                }
                break;
            }
        }
        if (part != Part::Done) throw ParseError(lines_.empty() ? 0 : lines_.back().first, "missing End");
        return std::move(model_);
    }

private:
    using Tokens = std::vector<std::pair<std::size_t, std::string>>;

    std::uint32_t var(std::size_t lineno, const std::string& name) {
        if (!valid_name(name)) throw ParseError(lineno, "bad variable name '" + name + "'");
        if (auto i = model_.find(name)) return *i;
        return model_.add_variable(name, VarType::Continuous, 0, kInf);
    }

    // Terms up to (not including) a relation token or the end.
    std::vector<Term> parse_terms(const Tokens& tok, std::size_t& i) {
        std::vector<Term> terms;
        if (i < tok.size() && tok[i].second == "0" && (i + 1 == tok.size() || is_relation(tok[i + 1].second))) {
            ++i;
            return terms;
        }
        while (i < tok.size() && !is_relation(tok[i].second)) {
            const std::size_t line = tok[i].first;
            double sign = 1;
            if (tok[i].second == "+" || tok[i].second == "-") {
                sign = tok[i].second == "-" ? -1 : 1;
                ++i;
            } else if (!terms.empty()) {
                throw ParseError(line, "expected '+' or '-' before '" + tok[i].second + "'");
            }
            if (i >= tok.size()) throw ParseError(line, "dangling sign");
            double coef = 1;
            if (auto num = parse_number(tok[i].second)) {
                coef = *num;
                ++i;
                if (i >= tok.size() || is_relation(tok[i].second)) throw ParseError(line, "coefficient without variable");
            }
            terms.push_back({var(tok[i].first, tok[i].second), sign * coef});
            ++i;
        }
        return terms;
    }

    static bool is_relation(const std::string& t) {
        return t == "<=" || t == ">=" || t == "=" || t == "=<" || t == "=>" || t == "<" || t == ">";
    }

    static std::optional<std::string> label(const Tokens& tok, std::size_t& i) {
        if (i < tok.size() && tok[i].second.size() > 1 && tok[i].second.back() == ':') {
            std::string n = tok[i].second.substr(0, tok[i].second.size() - 1);
            ++i;
            return n;
        }
        return std::nullopt;
    }

    void parse_objective(const Tokens& tok) {
        std::size_t i = 0;
        label(tok, i);
        const auto terms = parse_terms(tok, i);
        if (i != tok.size()) throw ParseError(tok[i].first, "relation in objective");
        for (const auto& t : terms) model_.add_objective(t.var, t.coef);
    }

    void parse_rows(const Tokens& tok) {
        std::size_t i = 0;
        std::size_t unnamed = 0;
        while (i < tok.size()) {
            const std::size_t line = tok[i].first;
            auto name = label(tok, i);
            auto terms = parse_terms(tok, i);
            if (i >= tok.size()) throw ParseError(line, "row without relation");
            const std::string rel = tok[i++].second;
            if (i >= tok.size()) throw ParseError(line, "row without right-hand side");
            const auto rhs = parse_number(tok[i].second);
            if (!rhs || std::isinf(*rhs)) throw ParseError(tok[i].first, "bad right-hand side '" + tok[i].second + "'");
            ++i;
            const Sense sense = rel[0] == '<' || rel == "=<" ? Sense::LessEq
                              : rel == "=" ? Sense::Equal
                                           : Sense::GreaterEq;
            model_.add_row(name ? *name : "r" + std::to_string(++unnamed), std::move(terms), sense, *rhs);
        }
    }

    void parse_bound(std::size_t lineno, const std::vector<std::string>& t) {
        auto number = [&](const std::string& s) {
            auto v = parse_number(s);
            if (!v) throw ParseError(lineno, "bad bound '" + s + "'");
            return *v;
        };
        if (t.size() == 2 && (t[1] == "free" || t[1] == "Free")) {
            auto& v = model_.variable(var(lineno, t[0]));
            v.lower = -kInf;
            v.upper = kInf;
        } else if (t.size() == 5 && (t[1] == "<=" || t[1] == "=<") && (t[3] == "<=" || t[3] == "=<")) {
            auto& v = model_.variable(var(lineno, t[2]));
            v.lower = number(t[0]);
            v.upper = number(t[4]);
        } else if (t.size() == 3 && valid_name(t[0])) {
            auto& v = model_.variable(var(lineno, t[0]));
            const double b = number(t[2]);
            if (t[1] == "<=" || t[1] == "=<")
                v.upper = b;
            else if (t[1] == ">=" || t[1] == "=>")
                v.lower = b;
            else if (t[1] == "=")
                v.lower = v.upper = b;
            else
                throw ParseError(lineno, "bad bound relation '" + t[1] + "'");
        } else {
            throw ParseError(lineno, "unrecognized bound");
        }
    }

    std::vector<std::pair<std::size_t, std::string>> lines_;
    MilpModel model_;
};

} // namespace detail

inline MilpModel read_lp(std::istream& in) { return detail::LpReader(in).read(); }

inline MilpModel read_lp(const std::string& text) {
    std::istringstream in(text);
    return read_lp(in);
}

struct EnumerationResult {
    std::optional<double> optimum;  // nullopt: infeasible
    std::vector<double> assignment;
};

inline constexpr std::size_t kDefaultBinaryGuard = 48;

namespace detail {

inline constexpr double kEps = 1e-9;

/// Depth-first enumeration of the binaries with interval pruning. Once all
/// binaries are fixed the continuous part must be a system of difference
/// constraints; its least solution comes from longest paths.
class Enumerator {
public:
    explicit Enumerator(const MilpModel& m) : m_(m), value_(m.variables().size(), 0), set_(m.variables().size(), 0) {
        const auto& vars = m.variables();
        touching_.resize(vars.size());
        for (std::uint32_t r = 0; r < m.rows().size(); ++r)
            for (const auto& t : m.rows()[r].terms) touching_[t.var].push_back(r);
        for (std::uint32_t j = 0; j < vars.size(); ++j) {
            if (vars[j].type == VarType::Binary)
                binaries_.push_back(j);
            else
                continuous_.push_back(j);
        }
        objective_.assign(vars.size(), 0);
        for (const auto& t : m.objective()) objective_[t.var] += t.coef;
        for (auto j : continuous_)
            if (objective_[j] < 0) throw Error("enumeration needs non-negative objective on continuous variables");
    }

    EnumerationResult run() {
        for (std::uint32_t r = 0; r < m_.rows().size(); ++r)
            if (!possible(r)) return {};
        dfs(0);
        EnumerationResult out;
        if (best_) {
            out.optimum = *best_;
            out.assignment = best_assignment_;
        }
        return out;
    }

private:
    std::pair<double, double> range(const Term& t) const {
        const Variable& v = m_.variables()[t.var];
        if (set_[t.var]) return {t.coef * value_[t.var], t.coef * value_[t.var]};
        const double a = t.coef * v.lower, b = t.coef * v.upper;
        return {std::isnan(a) ? 0 : std::min(a, b), std::isnan(b) ? 0 : std::max(a, b)};
    }

    bool possible(std::uint32_t r) const {
        const Row& row = m_.rows()[r];
        double lo = 0, hi = 0;
        for (const auto& t : row.terms) {
            const auto [a, b] = range(t);
            lo += a;
            hi += b;
        }
        if (row.sense != Sense::GreaterEq && lo > row.rhs + kEps) return false;
        if (row.sense != Sense::LessEq && hi < row.rhs - kEps) return false;
        return true;
    }

    double objective_floor() const {
        double z = 0;
        for (std::uint32_t j = 0; j < objective_.size(); ++j) {
            if (objective_[j] == 0) continue;
            const Variable& v = m_.variables()[j];
            z += set_[j] ? objective_[j] * value_[j] : std::min(objective_[j] * v.lower, objective_[j] * v.upper);
        }
        return z;
    }

    void dfs(std::size_t depth) {
        if (best_ && objective_floor() >= *best_ - kEps) return;
        if (depth == binaries_.size()) {
            leaf();
            return;
        }
        const std::uint32_t j = binaries_[depth];
        const double first = objective_[j] > 0 ? 1 : 0;
        for (double val : {first, 1 - first}) {
            set_[j] = 1;
            value_[j] = val;
            bool ok = true;
            for (auto r : touching_[j])
                if (!possible(r)) {
                    ok = false;
                    break;
                }
            if (ok) dfs(depth + 1);
            set_[j] = 0;
        }
    }

    // Least continuous values meeting every row, or false.
    bool settle_continuous() {
        const auto& vars = m_.variables();
        struct Edge {
            std::uint32_t from, to;
            double gap;  // value[to] >= value[from] + gap
        };
        std::vector<double> lo(vars.size()), hi(vars.size());
        for (auto j : continuous_) {
            lo[j] = vars[j].lower;
            hi[j] = vars[j].upper;
        }
        std::vector<Edge> edges;
        for (const Row& row : m_.rows()) {
            double constant = 0;
            std::vector<Term> cont;
            for (const auto& t : row.terms) {
                if (vars[t.var].type == VarType::Binary)
                    constant += t.coef * value_[t.var];
                else if (t.coef != 0)
                    cont.push_back(t);
            }
            const double rhs = row.rhs - constant;
            auto add = [&](Sense sense) {
                // sum(cont) sense rhs, rewritten as bounds or differences
                if (cont.empty()) return sense == Sense::LessEq ? 0 <= rhs + kEps : 0 >= rhs - kEps;
                if (cont.size() == 1) {
                    const auto [j, c] = cont[0];
                    const double b = rhs / c;
                    const bool upper = (sense == Sense::LessEq) == (c > 0);
                    if (upper)
                        hi[j] = std::min(hi[j], b);
                    else
                        lo[j] = std::max(lo[j], b);
                    return true;
                }
                if (cont.size() == 2 && std::abs(cont[0].coef + cont[1].coef) < kEps) {
                    // c*(a - b) sense rhs
                    const double c = cont[0].coef;
                    std::uint32_t a = cont[0].var, b = cont[1].var;
                    double g = rhs / c;
                    bool ge = (sense == Sense::GreaterEq) == (c > 0);
                    if (ge)
                        edges.push_back({b, a, g});  // a >= b + g
                    else
                        edges.push_back({a, b, -g});  // b >= a - g
                    return true;
                }
                throw Error("row '" + row.name + "' is not a difference constraint once binaries are fixed");
            };
            if (row.sense == Sense::Equal) {
                if (!add(Sense::LessEq) || !add(Sense::GreaterEq)) return false;
            } else if (!add(row.sense)) {
                return false;
            }
        }
        for (auto j : continuous_)
            if (lo[j] == -kInf) throw Error("continuous variable '" + vars[j].name + "' has no finite lower bound");
        for (std::size_t pass = 0; pass <= continuous_.size(); ++pass) {
            bool changed = false;
            for (const auto& e : edges)
                if (lo[e.from] + e.gap > lo[e.to] + kEps) {
                    lo[e.to] = lo[e.from] + e.gap;
                    changed = true;
                }
            if (!changed) {
                for (auto j : continuous_) {
                    if (lo[j] > hi[j] + kEps) return false;
                    value_[j] = lo[j];
                }
                return true;
            }
        }
        return false;  // positive cycle
    }

    void leaf() {
        if (!settle_continuous()) return;
        double z = 0;
        for (std::uint32_t j = 0; j < objective_.size(); ++j) z += objective_[j] * value_[j];
        if (!best_ || z < *best_ - kEps) {
            best_ = z;
            best_assignment_ = value_;
        }
    }

    const MilpModel& m_;
    std::vector<double> value_;
    std::vector<std::uint8_t> set_;
    std::vector<std::vector<std::uint32_t>> touching_;
    std::vector<std::uint32_t> binaries_, continuous_;
    std::vector<double> objective_;
    std::optional<double> best_;
    std::vector<double> best_assignment_;
};

} // namespace detail

/// Exact optimum over all 0/1 assignments of the binaries. Continuous
/// variables may only appear in difference constraints and bounds once the
/// binaries are fixed (true for every model built here).
inline EnumerationResult check_model_by_enumeration(const MilpModel& m, std::size_t guard = kDefaultBinaryGuard) {
    if (m.binary_count() > guard)
        throw Error("enumeration guard exceeded: " + std::to_string(m.binary_count()) + " binaries");
    return detail::Enumerator(m).run();
}

} // namespace pds::milp
