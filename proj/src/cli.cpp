#include "tdcount/cli.hpp"

#include "tdcount/asp_dp.hpp"
#include "tdcount/errors.hpp"
#include "tdcount/graph.hpp"
#include "tdcount/oracle.hpp"
#include "tdcount/projection.hpp"
#include "tdcount/sat_dp.hpp"
#include "tdcount/treedecomp.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>

namespace tdcount::cli {

namespace {

struct Options {
    std::string              input = "-";
    std::string              graph = "primal";
    std::string              heuristic = "min-fill";
    std::uint64_t            seed  = 0;
    std::size_t              seeds = 0; // 0: subcommand default
    std::string              format = "auto";
    std::vector<std::string> project;
    std::vector<int>         project_vars;
    std::optional<std::size_t> limit;
    bool                     json = false;
    std::string              trace;
    bool                     oracle_check = false;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class OracleMismatch : public Error {
public:
    using Error::Error;
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("TDCOUNT_SEED")) {
        try {
            return std::stoull(env);
        }
        catch (const std::exception&) {
            throw UsageError(std::string("invalid TDCOUNT_SEED '") + env + "'");
        }
    }
    return 0;
}

void add_options(CLI::App& sub, Options& o) {
    sub.add_option("input", o.input, "instance file, or - for standard input");
    sub.add_option("--graph", o.graph, "graph representation")->check(CLI::IsMember({"primal", "incidence"}));
    sub.add_option("--heuristic", o.heuristic, "elimination ordering heuristic")
        ->check(CLI::IsMember({"min-fill", "min-degree"}));
    sub.add_option("--seed", o.seed, "tie-breaking seed (default: $TDCOUNT_SEED or 0)");
    sub.add_option("--seeds", o.seeds, "number of decompositions to try; the narrowest is kept");
    sub.add_option("--format", o.format, "input format")->check(CLI::IsMember({"asp", "smodels", "dimacs", "auto"}));
    sub.add_option("--project", o.project, "projection atoms (names)")->delimiter(',')->allow_extra_args(false);
    sub.add_option("--project-vars", o.project_vars, "projection variables (DIMACS indices)")->delimiter(',')->allow_extra_args(false);
    sub.add_option("--limit", o.limit, "maximum number of answer sets to print");
    sub.add_flag("--json", o.json, "emit a JSON object");
    sub.add_option("--trace", o.trace, "write per-node table statistics as line-delimited JSON");
    sub.add_flag("--oracle-check", o.oracle_check, "also run the brute-force oracle and compare");
}

std::string read_input(const std::string& path, std::istream& in) {
    if (path == "-") {
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw UsageError("cannot open '" + path + "'");
    }
    return {std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>()};
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string sniff_format(const Options& o, const std::string& text) {
    if (o.format != "auto") {
        return o.format;
    }
    for (auto ext : {".cnf", ".dimacs"}) {
        if (ends_with(o.input, ext)) {
            return "dimacs";
        }
    }
    for (auto ext : {".sm", ".smodels"}) {
        if (ends_with(o.input, ext)) {
            return "smodels";
        }
    }
    for (auto ext : {".lp", ".asp"}) {
        if (ends_with(o.input, ext)) {
            return "asp";
        }
    }
    std::istringstream lines(text);
    std::string        line;
    while (std::getline(lines, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '%') {
            continue;
        }
        if (line.compare(first, 2, "p ") == 0 || line.compare(first, 2, "c ") == 0 || line == "c") {
            return "dimacs";
        }
        return std::isdigit(static_cast<unsigned char>(line[first])) ? "smodels" : "asp";
    }
    return "asp";
}

GroundProgram load_program(const Options& o, const std::string& text) {
    auto fmt = sniff_format(o, text);
    if (fmt == "dimacs") {
        throw UsageError("this subcommand expects a ground ASP program");
    }
    return fmt == "smodels" ? parse_smodels(text) : parse_ground_program(text);
}

CnfFormula load_cnf(const Options& o, const std::string& text) {
    if (o.format != "auto" && o.format != "dimacs") {
        throw UsageError("this subcommand expects a DIMACS CNF formula");
    }
    return parse_dimacs(text);
}

nlohmann::json atom_list(const GroundProgram& p, const AnswerSet& s) {
    auto j = nlohmann::json::array();
    for (auto a : s) {
        j.push_back(p.display_name(a));
    }
    return j;
}

std::string show_answer_set(const GroundProgram& p, const AnswerSet& s) {
    std::string out = "{";
    const char* sep = "";
    for (auto a : s) {
        out += std::exchange(sep, " ");
        out += p.display_name(a);
    }
    return out + "}";
}

void check_oracle(bool equal, const std::string& what) {
    if (!equal) {
        throw OracleMismatch("oracle mismatch: " + what);
    }
}

struct Outcome {
    nlohmann::json result;
    std::string    text;
    Width          width;
    std::uint64_t  seed      = 0;
    int            exit_code = 0;
    std::optional<std::string> oracle;
};

template <class Engine>
void fill_decomposition(Outcome& r, const Engine& e) {
    r.width = e.width();
    r.seed  = e.seed();
}

Outcome run_asp(const std::string& cmd, const Options& o, const std::string& text, const SolveOptions& so) {
    auto      program = load_program(o, text);
    AspSolver solver(program, so);
    Outcome   r;
    fill_decomposition(r, solver);
    if (cmd == "count") {
        auto n   = solver.count();
        r.result = to_string(n);
        r.text   = to_string(n);
        if (o.oracle_check) {
            check_oracle(Integer(oracle::brute_answer_sets(program).size()) == n, "answer set count");
        }
    }
    else if (cmd == "solve") {
        bool ok     = solver.consistent();
        r.result    = ok;
        r.text      = ok ? "CONSISTENT" : "INCONSISTENT";
        r.exit_code = ok ? exit_consistent : exit_inconsistent;
        if (o.oracle_check) {
            check_oracle(oracle::brute_answer_sets(program).empty() != ok, "consistency");
        }
    }
    else if (cmd == "enumerate") {
        auto sets = solver.enumerate(o.limit);
        r.result  = nlohmann::json::array();
        for (const auto& s : sets) {
            r.result.push_back(atom_list(program, s));
            r.text += show_answer_set(program, s) + "\n";
        }
        if (!r.text.empty()) {
            r.text.pop_back();
        }
        if (o.oracle_check) {
            auto expect = oracle::brute_answer_sets(program);
            if (o.limit && expect.size() > *o.limit) {
                expect.resize(*o.limit);
            }
            check_oracle(expect == sets, "answer sets");
        }
    }
    else if (cmd == "optcount") {
        auto opt = solver.count_optimal();
        r.result = {{"cost", opt.cost ? nlohmann::json(to_string(*opt.cost)) : nlohmann::json(nullptr)},
                    {"count", to_string(opt.count)}};
        r.text   = (opt.cost ? to_string(*opt.cost) : std::string("none")) + " " + to_string(opt.count);
        if (o.oracle_check) {
            auto b = oracle::brute_optimum(program);
            check_oracle(b.consistent == opt.cost.has_value() && b.count == opt.count &&
                             (!b.consistent || b.cost == *opt.cost),
                         "optimum");
        }
    }
    else { // pcount
        auto proj = resolve_projection(program, o.project);
        auto n    = projected_count_pass(solver, proj).count;
        r.result  = to_string(n);
        r.text    = to_string(n);
        if (o.oracle_check) {
            check_oracle(oracle::brute_projected_count(program, proj) == n, "projected count");
        }
    }
    if (o.oracle_check) {
        r.oracle = "match";
    }
    return r;
}

Outcome run_sat(const std::string& cmd, const Options& o, const std::string& text, const SolveOptions& so) {
    auto       formula = load_cnf(o, text);
    SatCounter counter(formula, so);
    Outcome    r;
    fill_decomposition(r, counter);
    if (cmd == "mc") {
        auto n   = counter.count();
        r.result = to_string(n);
        r.text   = to_string(n);
        if (o.oracle_check) {
            check_oracle(oracle::brute_count_models(formula) == n, "model count");
        }
    }
    else if (cmd == "wmc") {
        auto w   = counter.weighted_count();
        r.result = to_string(w);
        r.text   = to_string(w);
        if (o.oracle_check) {
            check_oracle(oracle::brute_weighted_count(formula) == w, "weighted count");
        }
    }
    else { // pmc
        auto n   = projected_count_pass(counter, o.project_vars).count;
        r.result = to_string(n);
        r.text   = to_string(n);
        if (o.oracle_check) {
            check_oracle(oracle::brute_projected_count(formula, o.project_vars) == n, "projected count");
        }
    }
    if (o.oracle_check) {
        r.oracle = "match";
    }
    return r;
}

Outcome run_td_stats(const Options& o, const std::string& text, DecomposeOptions d) {
    auto  fmt = sniff_format(o, text);
    Graph g;
    if (fmt == "dimacs") {
        if (o.graph == "incidence") {
            throw UsageError("incidence graphs are only built for ASP programs");
        }
        g = primal_graph_cnf(parse_dimacs(text));
    }
    else {
        auto program = fmt == "smodels" ? parse_smodels(text) : parse_ground_program(text);
        g            = o.graph == "incidence" ? incidence_graph(program) : primal_graph(program);
    }
    Outcome r;
    auto    widths = nlohmann::json::array();
    std::ostringstream txt;
    txt << "graph " << o.graph << " vertices " << g.num_vertices() << " edges " << g.num_edges() << "\n";
    std::optional<Decomposition> best;
    for (std::size_t i = 0; i < d.seeds; ++i) {
        DecomposeOptions one = d;
        one.seed             = d.seed + i;
        one.seeds            = 1;
        auto dec             = decompose(g, one);
        widths.push_back({{"seed", dec.seed}, {"width", dec.width.value}});
        txt << "seed " << dec.seed << " width " << dec.width.value << "\n";
        if (!best || dec.width < best->width) {
            best = std::move(dec);
        }
    }
    std::size_t lo = best->width.value, hi = 0;
    for (const auto& w : widths) {
        hi = std::max(hi, w["width"].get<std::size_t>());
    }
    txt << "min " << lo << " max " << hi;
    r.text   = txt.str();
    r.result = {{"graph", o.graph}, {"vertices", g.num_vertices()}, {"edges", g.num_edges()}, {"widths", widths},
                {"min", lo}, {"max", hi}};
    r.width  = best->width;
    r.seed   = best->seed;
    return r;
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tree-decomposition based counting for ground ASP programs and CNF formulas", "tdcount"};
    app.require_subcommand(1, 1);
    Options opts;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"count", "count answer sets"},
        {"solve", "decide whether an answer set exists (exit 10/20)"},
        {"enumerate", "print answer sets in lexicographic order"},
        {"optcount", "minimum minimize cost and number of optimal answer sets"},
        {"pcount", "count answer sets projected onto --project atoms"},
        {"mc", "count models of a CNF formula"},
        {"wmc", "weighted model count of a CNF formula"},
        {"pmc", "count models projected onto --project-vars"},
        {"td-stats", "report decomposition widths for several seeds"},
    };
    for (const auto& [name, help] : commands) {
        add_options(*app.add_subcommand(name, help), opts);
    }
    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    }
    catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : exit_usage;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    const bool seed_given = app.get_subcommands().front()->count("--seed") > 0;

    try {
        if (!seed_given) {
            opts.seed = default_seed();
        }
        if (opts.graph == "incidence" && cmd != "td-stats") {
            throw UsageError("--graph incidence is only valid for td-stats");
        }
        if (!opts.project.empty() && cmd != "pcount") {
            throw UsageError("--project is only valid for pcount");
        }
        if (!opts.project_vars.empty() && cmd != "pmc") {
            throw UsageError("--project-vars is only valid for pmc");
        }
        DecomposeOptions d;
        d.heuristic = *parse_heuristic(opts.heuristic);
        d.seed      = opts.seed;
        d.seeds     = opts.seeds != 0 ? opts.seeds : (cmd == "td-stats" ? 5 : 1);

        std::ofstream trace_file;
        SolveOptions  so;
        so.decomposition = d;
        if (!opts.trace.empty()) {
            trace_file.open(opts.trace);
            if (!trace_file) {
                throw UsageError("cannot open trace file '" + opts.trace + "'");
            }
            so.trace = [&trace_file](const dp::TraceRecord& rec) { trace_file << dp::to_json_line(rec) << "\n"; };
        }

        const auto start = std::chrono::steady_clock::now();
        const auto text  = read_input(opts.input, in);
        Outcome    r;
        if (cmd == "td-stats") {
            r = run_td_stats(opts, text, d);
        }
        else if (cmd == "mc" || cmd == "wmc" || cmd == "pmc") {
            r = run_sat(cmd, opts, text, so);
        }
        else {
            r = run_asp(cmd, opts, text, so);
        }
        const auto elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();

        if (opts.json) {
            nlohmann::json j;
            j["result"]     = r.result;
            j["width"]      = r.width.value;
            j["heuristic"]  = opts.heuristic;
            j["seed"]       = r.seed;
            j["elapsed_ms"] = elapsed;
            if (r.oracle) {
                j["oracle"] = *r.oracle;
            }
            out << j.dump() << "\n";
        }
        else {
            if (!r.text.empty()) {
                out << r.text << "\n";
            }
            if (r.oracle) {
                err << "oracle: " << *r.oracle << "\n";
            }
        }
        return r.exit_code;
    }
    catch (const OracleMismatch& e) {
        err << "error: " << e.what() << "\n";
        return exit_oracle;
    }
    catch (const UnsupportedRule& e) {
        err << "error: " << e.what() << "\n";
        return exit_unsupported;
    }
    catch (const TooLarge& e) {
        err << "error: " << e.what() << "\n";
        return exit_unsupported;
    }
    catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
}

} // namespace tdcount::cli
