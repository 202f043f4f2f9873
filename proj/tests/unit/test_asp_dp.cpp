#include "generators.hpp"

#include "tdcount/asp_dp.hpp"
#include "tdcount/errors.hpp"
#include "tdcount/oracle.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace tdcount;
using dp::make_witness;

namespace {

using RowView = std::tuple<dp::Assignment, dp::WitnessSet, Integer>;

std::vector<RowView> view(const AspTable& t) {
    std::vector<RowView> out;
    for (const auto& r : t.rows) {
        out.emplace_back(r.assignment, r.witnesses, r.count);
    }
    std::sort(out.begin(), out.end());
    return out;
}

dp::WitnessSet ws(std::initializer_list<dp::Witness> w) {
    dp::WitnessSet out(w);
    dp::canonicalize(out);
    return out;
}

// M satisfies every rule and no proper subset satisfies the reduct w.r.t. M.
bool is_answer_set(const GroundProgram& p, const AnswerSet& m) {
    std::vector<bool> in(p.num_atoms(), false);
    for (auto a : m) {
        in[a] = true;
    }
    auto any  = [](const std::vector<AtomId>& xs, const std::vector<bool>& s) {
        return std::any_of(xs.begin(), xs.end(), [&](AtomId a) { return s[a]; });
    };
    auto all  = [](const std::vector<AtomId>& xs, const std::vector<bool>& s) {
        return std::all_of(xs.begin(), xs.end(), [&](AtomId a) { return s[a]; });
    };
    for (const auto& r : p.rules()) {
        if (all(r.body_pos, in) && !any(r.body_neg, in) && !any(r.head, in)) {
            return false;
        }
    }
    for (std::uint64_t sub = 0; sub + 1 < (std::uint64_t{1} << m.size()); ++sub) {
        std::vector<bool> n(p.num_atoms(), false);
        for (std::size_t i = 0; i < m.size(); ++i) {
            n[m[i]] = ((sub >> i) & 1U) != 0;
        }
        bool model = true;
        for (const auto& r : p.rules()) {
            if (!any(r.body_neg, in) && all(r.body_pos, n) && !any(r.head, n)) {
                model = false;
            }
        }
        if (model) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("introduce_atom", "[asp]") {
    auto leaf = asp_leaf_table();
    REQUIRE(leaf.size() == 1);
    auto t = introduce_atom(leaf, 0);
    CHECK(t.bag == std::vector<Vertex>{0});
    CHECK(view(t) == std::vector<RowView>{{0, ws({make_witness(0, false)}), 1},
                                          {1, ws({make_witness(1, false), make_witness(0, true)}), 1}});

    AspTable empty;
    CHECK(introduce_atom(empty, 3).empty());

    auto two = introduce_atom(t, 1);
    CHECK(two.size() == 4);
}

TEST_CASE("forget_atom: fact", "[asp]") {
    auto p = parse_ground_program("a.");
    auto t = forget_atom(introduce_atom(asp_leaf_table(), 0), 0, p.rules());
    CHECK(t.bag.empty());
    CHECK(view(t) == std::vector<RowView>{{0, ws({make_witness(0, false)}), 1}});
}

TEST_CASE("forget_atom: self-supporting rule", "[asp]") {
    auto p = parse_ground_program("a :- a.");
    auto t = forget_atom(introduce_atom(asp_leaf_table(), 0), 0, p.rules());
    // a:true keeps its strict witness {a:false}; a:false has none.
    CHECK(view(t) == std::vector<RowView>{{0, ws({make_witness(0, false)}), 1},
                                          {0, ws({make_witness(0, false), make_witness(0, true)}), 1}});
    CHECK(count_answer_sets(p) == 1);
    CHECK(enumerate_answer_sets(p) == std::vector<AnswerSet>{{}});
}

TEST_CASE("forget_atom: no due rules preserves the total count", "[asp]") {
    auto t = introduce_atom(introduce_atom(asp_leaf_table(), 0), 1);
    auto f = forget_atom(t, 0, {});
    Integer before = 0, after = 0;
    for (const auto& r : t.rows) {
        before += r.count;
    }
    for (const auto& r : f.rows) {
        after += r.count;
    }
    CHECK(before == after);
    CHECK(f.bag == std::vector<Vertex>{1});
}

TEST_CASE("join_tables", "[asp]") {
    AspTable l, r;
    l.bag = r.bag = {0};
    l.rows.push_back({1, {make_witness(1, false)}, 2, 0, {}});
    r.rows.push_back({1, {make_witness(1, false)}, 3, 0, {}});
    CHECK(view(join_tables(l, r)) == std::vector<RowView>{{1, ws({make_witness(1, false)}), 6}});

    r.rows[0].assignment = 0;
    r.rows[0].witnesses  = {make_witness(0, false)};
    CHECK(join_tables(l, r).empty());

    AspTable other;
    other.bag = {1};
    CHECK_THROWS_AS(join_tables(l, other), BagMismatch);
}

TEST_CASE("join_tables: a fresh introduce chain is a counting identity", "[asp]") {
    auto fresh = introduce_atom(introduce_atom(asp_leaf_table(), 0), 1);
    auto p     = parse_ground_program("a :- not b. b | c :- a.");
    auto some  = forget_atom(introduce_atom(fresh, 2), 2, std::span<const Rule>(p.rules()).subspan(1));
    auto joined = join_tables(some, fresh);
    std::map<dp::Assignment, Integer> x, y;
    for (const auto& r : some.rows) {
        x[r.assignment] += r.count;
    }
    for (const auto& r : joined.rows) {
        y[r.assignment] += r.count;
    }
    CHECK(x == y);
}

TEST_CASE("join_tables subtracts bag-local minimize weights", "[asp]") {
    ProgramBuilder b;
    b.atom("a");
    b.add_minimize(Literal{0, true}, 5);
    auto      p = std::move(b).build();
    CostModel costs(*p.minimize(), p.num_atoms());
    auto      t = introduce_atom(asp_leaf_table(), 0, costs);
    auto      j = join_tables(t, t, costs);
    for (const auto& r : j.rows) {
        CHECK(r.cost == (r.assignment ? 5 : 0));
    }
}

TEST_CASE("count_answer_sets", "[asp]") {
    CHECK(count_answer_sets(parse_ground_program("")) == 1);
    CHECK(count_answer_sets(parse_ground_program("a :- not b.  b :- not a.")) == 2);
    CHECK(count_answer_sets(parse_ground_program("a.  :- a.")) == 0);
    CHECK(count_answer_sets(parse_ground_program(":- .")) == 0);
    CHECK(count_answer_sets(parse_ground_program("a | b. a :- b. b :- a.")) == 1);
    CHECK(count_answer_sets(parse_ground_program("a | b | c.")) == 3);
}

TEST_CASE("count_answer_sets grows beyond machine integers", "[asp]") {
    std::string text;
    for (int i = 0; i < 70; ++i) {
        text += "p" + std::to_string(i) + " :- not q" + std::to_string(i) + ". q" + std::to_string(i) + " :- not p" +
                std::to_string(i) + ".\n";
    }
    CHECK(to_string(count_answer_sets(parse_ground_program(text))) == "1180591620717411303424");
}

TEST_CASE("count_optimal", "[asp]") {
    CHECK(count_optimal(parse_ground_program("a | b.\n#minimize{ 1:a; 2:b }.")) == OptimalCount{Integer(1), 1});
    CHECK(count_optimal(parse_ground_program("a :- not b. b :- not a.\n#minimize{ 1:a; 1:b }.")) ==
          OptimalCount{Integer(1), 2});
    CHECK(count_optimal(parse_ground_program("a :- not b. b :- not a. c | d.\n#minimize{ }.")) ==
          OptimalCount{Integer(0), 4});
    CHECK(count_optimal(parse_ground_program("a. :- a.\n#minimize{ 1:a }.")) == OptimalCount{std::nullopt, 0});
    CHECK(count_optimal(parse_ground_program("a :- not b. b :- not a.\n#minimize{ 3:a; 1:not b }.")) ==
          OptimalCount{Integer(0), 1});
    CHECK_THROWS(parse_ground_program("a.\n#minimize{ -3:a }."));
}

TEST_CASE("enumerate_answer_sets", "[asp]") {
    auto p = parse_ground_program("a :- not b.  b :- not a.");
    CHECK(enumerate_answer_sets(p) == std::vector<AnswerSet>{{0}, {1}});
    CHECK(enumerate_answer_sets(p, 1) == std::vector<AnswerSet>{{0}});
    CHECK(enumerate_answer_sets(parse_ground_program("a. :- a.")).empty());
}

TEST_CASE("plan_rule_checks places every rule once", "[asp]") {
    testing::Rng rng(12);
    for (int i = 0; i < 100; ++i) {
        auto      p = testing::random_program(rng);
        AspSolver s(p);
        auto      plan = plan_rule_checks(p, s.decomposition());
        std::vector<int> seen(p.rules().size(), 0);
        for (std::size_t id = 0; id < s.decomposition().size(); ++id) {
            for (auto r : plan.checks_at(id)) {
                const auto& nd = s.decomposition().node(id);
                CHECK(nd.type == NodeType::Forget);
                const auto& child = s.decomposition().node(static_cast<std::size_t>(nd.children[0])).bag;
                for (auto a : p.rules()[r].atoms()) {
                    CHECK(std::binary_search(child.begin(), child.end(), a));
                }
                ++seen[r];
            }
        }
        CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    }
    ProgramBuilder b;
    b.atom("a");
    b.atom("b");
    auto      norules = std::move(b).build();
    AspSolver s(norules);
    auto      plan = plan_rule_checks(norules, s.decomposition());
    for (const auto& at : plan.at) {
        CHECK(at.empty());
    }
}

TEST_CASE("asp engine agrees with the oracle on random programs", "[asp]") {
    testing::Rng rng(13);
    for (int i = 0; i < 150; ++i) {
        auto p = testing::random_program(rng);
        INFO(render_ground_program(p));
        AspSolver s(p);
        auto      expect = oracle::brute_answer_sets(p);
        CHECK(s.count() == expect.size());
        CHECK(s.consistent() == !expect.empty());
        auto sets = s.enumerate();
        CHECK(sets == expect);
        for (const auto& m : sets) {
            CHECK(is_answer_set(p, m));
        }
        auto opt = oracle::brute_optimum(p);
        auto got = s.count_optimal();
        CHECK(got.cost.has_value() == opt.consistent);
        CHECK(got.count == opt.count);
        if (opt.consistent) {
            CHECK(*got.cost == opt.cost);
        }
    }
}

TEST_CASE("asp witness sets stay within 2^(|bag|+1)", "[asp]") {
    testing::Rng rng(14);
    for (int i = 0; i < 50; ++i) {
        SolveOptions opts;
        bool         ok = true;
        opts.trace      = [&ok](const dp::TraceRecord& r) {
            ok = ok && r.max_witnesses <= (std::size_t{1} << (r.bag.size() + 1));
        };
        (void)AspSolver(testing::random_program(rng), opts).count();
        CHECK(ok);
    }
}
