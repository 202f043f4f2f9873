#include "tdcount/cli.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

using tdcount::cli::run;

namespace {

struct Result {
    int         code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args, const std::string& input = "") {
    std::istringstream in(input);
    std::ostringstream out, err;
    int                code = run(args, in, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(TDCOUNT_TEST_DATA) + "/" + name; }

} // namespace

TEST_CASE("cli: count", "[cli]") {
    auto r = call({"count", "-"}, "a :- not b. b :- not a.");
    CHECK(r.code == 0);
    CHECK(r.out == "2\n");
}

TEST_CASE("cli: solve exit codes", "[cli]") {
    CHECK(call({"solve", "-"}, ":- .").code == 20);
    auto r = call({"solve", "-"}, "a.");
    CHECK(r.code == 10);
    CHECK(r.out == "CONSISTENT\n");
}

TEST_CASE("cli: td-stats on the incidence graph", "[cli]") {
    auto r = call({"td-stats", "--graph", "incidence", data("disj.lp")});
    CHECK(r.code == 0);
    std::istringstream lines(r.out);
    std::string        line;
    int                seeds = 0;
    while (std::getline(lines, line)) {
        seeds += line.rfind("seed ", 0) == 0;
    }
    CHECK(seeds == 5);
    CHECK(r.out.find("graph incidence") != std::string::npos);
}

TEST_CASE("cli: incidence is only for td-stats", "[cli]") {
    CHECK(call({"count", "--graph", "incidence", "-"}, "a.").code == 1);
}

TEST_CASE("cli: enumerate, optcount and pcount", "[cli]") {
    const std::string prog = "a :- not b. b :- not a. c :- a.\n#minimize{ 2:a; 1:b }.";
    CHECK(call({"enumerate", "-"}, prog).out == "{a c}\n{b}\n");
    CHECK(call({"enumerate", "--limit", "1", "-"}, prog).out == "{a c}\n");
    CHECK(call({"optcount", "-"}, prog).out == "1 1\n");
    CHECK(call({"optcount", "-"}, "a. :- a.").out == "none 0\n");
    CHECK(call({"pcount", "--project", "c", "-"}, prog).out == "2\n");
    CHECK(call({"pcount", "--project", "a,b,c", "-"}, prog).out == "2\n");
    CHECK(call({"pcount", "--project", "zz", "-"}, prog).code == 1);
}

TEST_CASE("cli: CNF subcommands", "[cli]") {
    CHECK(call({"mc", "-"}, "p cnf 2 1\n1 -2 0\n").out == "3\n");
    CHECK(call({"wmc", "-"}, "p cnf 2 1\nw 1 1/2 0\nw -1 1/2 0\nw 2 1/2 0\nw -2 1/2 0\n1 -2 0\n").out == "3/4\n");
    CHECK(call({"pmc", "--project-vars", "2", "-"}, "p cnf 2 1\n1 -2 0\n").out == "2\n");
    CHECK(call({"mc", "-"}, "p cnf 1 1\n1 0\n-1 0\n").code == 1);
}

TEST_CASE("cli: smodels input", "[cli]") {
    CHECK(call({"count", data("disj.sm")}).out == "3\n");
    CHECK(call({"count", "--format", "smodels", "-"}, "0\n0\nB+\n0\nB-\n0\n1\n").out == "1\n");
    CHECK(call({"count", data("choice_rule.sm")}).code == 2);
}

TEST_CASE("cli: usage errors", "[cli]") {
    CHECK(call({}).code == 1);
    CHECK(call({"frobnicate"}).code == 1);
    CHECK(call({"count", "--heuristic", "best", "-"}, "a.").code == 1);
    CHECK(call({"count", "/nonexistent/file.lp"}).code == 1);
    CHECK(call({"count", "-"}, "a :- X.").code == 1);
    CHECK(call({"count", "-"}, "a :- b").code == 1);
}

TEST_CASE("cli: json output", "[cli]") {
    auto r = call({"count", "--json", "--seed", "3", "--heuristic", "min-degree", "-"}, "a :- not b. b :- not a.");
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["result"] == "2");
    CHECK(j["width"] == 1);
    CHECK(j["heuristic"] == "min-degree");
    CHECK(j["seed"] == 3);
    CHECK(j.contains("elapsed_ms"));
}

TEST_CASE("cli: identical runs give identical output", "[cli]") {
    const std::string prog = "a | b :- c. c :- not d. d :- not c. e :- a, not b.";
    for (auto cmd : {"count", "enumerate", "optcount"}) {
        auto x = call({cmd, "--seed", "9", "-"}, prog);
        auto y = call({cmd, "--seed", "9", "-"}, prog);
        CHECK(x.out == y.out);
    }
}

TEST_CASE("cli: oracle check and trace", "[cli]") {
    auto r = call({"count", "--oracle-check", "-"}, "a :- not b. b :- not a.");
    CHECK(r.code == 0);
    CHECK(r.err.find("match") != std::string::npos);

    const std::string trace = "tdcount_cli_trace.jsonl";
    CHECK(call({"mc", "--trace", trace, "-"}, "p cnf 3 2\n1 2 0\n2 3 0\n").code == 0);
    std::ifstream in(trace);
    std::string   line;
    int           n = 0;
    while (std::getline(in, line)) {
        auto j = nlohmann::json::parse(line);
        CHECK(j.contains("rows"));
        ++n;
    }
    CHECK(n > 0);
    std::remove(trace.c_str());
}
