#include "generators.hpp"

#include "tdcount/asp_dp.hpp"
#include "tdcount/dp_core.hpp"
#include "tdcount/errors.hpp"
#include "tdcount/sat_dp.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace tdcount;
using namespace tdcount::dp;

namespace {

// Counting handlers over plain assignments, enough to exercise the engine.
Handlers<Integer> free_handlers(std::vector<std::size_t>* order = nullptr) {
    Handlers<Integer> h;
    h.leaf = [order](std::size_t id, const NiceNode&, TableBuilder<Integer>& out) {
        if (order) {
            order->push_back(id);
        }
        out.add(0, {}, 1, 0, Derivation{});
    };
    h.introduce = [order](std::size_t id, const NiceNode& nd, const Table<Integer>& child, TableBuilder<Integer>& out) {
        if (order) {
            order->push_back(id);
        }
        const auto p = bag_position(nd.bag, nd.vertex);
        for (std::uint32_t j = 0; j < child.size(); ++j) {
            for (bool v : {false, true}) {
                out.add(insert_bit(child.rows[j].assignment, p, v), {}, child.rows[j].count, 0, Derivation{{j, no_row}});
            }
        }
    };
    h.forget = [order](std::size_t id, const NiceNode& nd, const Table<Integer>& child, TableBuilder<Integer>& out) {
        if (order) {
            order->push_back(id);
        }
        const auto p = bag_position(child.bag, nd.vertex);
        for (std::uint32_t j = 0; j < child.size(); ++j) {
            out.add(erase_bit(child.rows[j].assignment, p), {}, child.rows[j].count, 0, Derivation{{j, no_row}});
        }
    };
    h.join = [order](std::size_t id, const NiceNode&, const Table<Integer>& l, const Table<Integer>& r,
                     TableBuilder<Integer>& out) {
        if (order) {
            order->push_back(id);
        }
        for (std::uint32_t i = 0; i < l.size(); ++i) {
            for (std::uint32_t j = 0; j < r.size(); ++j) {
                if (l.rows[i].assignment == r.rows[j].assignment) {
                    out.add(l.rows[i].assignment, {}, l.rows[i].count * r.rows[j].count, 0, Derivation{{i, j}});
                }
            }
        }
    };
    return h;
}

NiceTreeDecomposition random_ntd(testing::Rng& rng, std::size_t n) {
    auto g = testing::random_graph(rng, n, 0.3);
    return make_nice(decompose(g, {}).td);
}

template <class Count>
bool same_store(const TableStore<Count>& a, const TableStore<Count>& b) {
    if (a.tables.size() != b.tables.size()) {
        return false;
    }
    for (std::size_t t = 0; t < a.tables.size(); ++t) {
        const auto& x = a.tables[t];
        const auto& y = b.tables[t];
        if (x.bag != y.bag || x.size() != y.size()) {
            return false;
        }
        for (std::size_t r = 0; r < x.size(); ++r) {
            const auto& p = x.rows[r];
            const auto& q = y.rows[r];
            if (p.assignment != q.assignment || p.witnesses != q.witnesses || p.count != q.count || p.cost != q.cost ||
                p.origins != q.origins) {
                return false;
            }
        }
    }
    return true;
}

} // namespace

TEST_CASE("bit helpers", "[dp]") {
    CHECK(insert_bit(0b101, 1, true) == 0b1011);
    CHECK(insert_bit(0b101, 0, false) == 0b1010);
    CHECK(erase_bit(0b1011, 1) == 0b101);
    CHECK(erase_bit(insert_bit(0b110101, 3, true), 3) == 0b110101);
    CHECK(witness_assignment(make_witness(0b11, true)) == 0b11);
    CHECK(witness_strict(make_witness(0b11, true)));
    CHECK_FALSE(witness_strict(make_witness(0b11, false)));
    std::vector<Vertex> bag = {2, 5, 9};
    CHECK(bag_position(bag, 5) == 1);
    CHECK_THROWS_AS(bag_position(bag, 4), InternalError);
    std::vector<Vertex> some = {2, 9};
    CHECK(mask_of(bag, some) == 0b101);
}

TEST_CASE("TableBuilder merges equal keys", "[dp]") {
    TableBuilder<Integer> b({0, 1});
    b.add(1, {make_witness(1, false)}, 2, 0, Derivation{{0, no_row}});
    b.add(1, {make_witness(1, false)}, 3, 0, Derivation{{1, no_row}});
    b.add(1, {make_witness(1, false)}, 3, 1, Derivation{{2, no_row}});
    b.add(1, {make_witness(1, true)}, 3, 0, Derivation{{3, no_row}});
    auto t = std::move(b).finish();
    REQUIRE(t.size() == 3);
    CHECK(t.rows[0].count == 5);
    CHECK(t.rows[0].origins.size() == 2);

    std::vector<Vertex> big(63);
    std::iota(big.begin(), big.end(), 0U);
    CHECK_THROWS_AS(TableBuilder<Integer>(big), TooLarge);
}

TEST_CASE("traverse: single leaf", "[dp]") {
    NiceTreeDecomposition ntd(0, {NiceNode{}});
    auto                  store = traverse(ntd, free_handlers());
    REQUIRE(store.tables.size() == 1);
    CHECK(store.root().size() == 1);
    CHECK(root_aggregate(store, Mode::Counting).count == 1);
}

TEST_CASE("traverse: handlers run child before parent", "[dp]") {
    testing::Rng rng(8);
    for (int i = 0; i < 20; ++i) {
        auto                     ntd = random_ntd(rng, 12);
        std::vector<std::size_t> order;
        auto                     store = traverse(ntd, free_handlers(&order));
        std::vector<std::size_t> position(ntd.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            position[order[k]] = k;
        }
        REQUIRE(order.size() == ntd.size());
        for (std::size_t id = 0; id < ntd.size(); ++id) {
            const auto& nd = ntd.node(id);
            for (std::size_t c = 0; c < nd.num_children(); ++c) {
                CHECK(position[static_cast<std::size_t>(nd.children[c])] < position[id]);
            }
        }
        // no constraints: every assignment of the 12 vertices is a solution
        CHECK(root_aggregate(store, Mode::Counting).count == 4096);
    }
}

TEST_CASE("traverse: deterministic", "[dp]") {
    testing::Rng rng(9);
    auto         ntd = random_ntd(rng, 10);
    CHECK(same_store(traverse(ntd, free_handlers()), traverse(ntd, free_handlers())));
    auto p = testing::random_program(rng);
    AspSolver s(p);
    CHECK(same_store(s.solve_pass(Mode::Counting), s.solve_pass(Mode::Counting)));
}

TEST_CASE("traverse: handler failures carry the node id", "[dp]") {
    NiceTreeDecomposition ntd(1, {NiceNode{}, NiceNode{NodeType::Introduce, {0}, 0, {0, -1}},
                                  NiceNode{NodeType::Forget, {}, 0, {1, -1}}});
    auto h   = free_handlers();
    h.forget = [](std::size_t, const NiceNode&, const Table<Integer>&, TableBuilder<Integer>&) {
        throw std::runtime_error("boom");
    };
    try {
        (void)traverse(ntd, h);
        FAIL("expected HandlerFailure");
    }
    catch (const HandlerFailure& e) {
        CHECK(e.node() == 2);
    }
}

TEST_CASE("traverse: trace records", "[dp]") {
    NiceTreeDecomposition    ntd(1, {NiceNode{}, NiceNode{NodeType::Introduce, {0}, 0, {0, -1}},
                                     NiceNode{NodeType::Forget, {}, 0, {1, -1}}});
    std::vector<TraceRecord> trace;
    (void)traverse(ntd, free_handlers(), [&](const TraceRecord& r) { trace.push_back(r); });
    REQUIRE(trace.size() == 3);
    CHECK(trace[1].rows == 2);
    CHECK(trace[2].rows == 1);
    CHECK(to_json_line(trace[1]).find("\"rows\":2") != std::string::npos);
}

TEST_CASE("root_aggregate", "[dp]") {
    TableStore<Integer> store;
    store.tables.emplace_back();
    auto empty = root_aggregate(store, Mode::Counting);
    CHECK(empty.count == 0);
    CHECK_FALSE(empty.consistent);

    store.tables[0].rows.push_back(Row<Integer>{0, {make_witness(0, false)}, 2, 4, {}});
    store.tables[0].rows.push_back(Row<Integer>{0, {make_witness(0, false), make_witness(1, false)}, 3, 1, {}});
    auto sum = root_aggregate(store, Mode::Counting);
    CHECK(sum.consistent);
    CHECK(sum.count == 5);
    auto opt = root_aggregate(store, Mode::Optimization);
    CHECK(opt.count == 3);
    CHECK(opt.cost == Integer(1));

    store.tables[0].rows.push_back(Row<Integer>{0, {make_witness(0, false), make_witness(0, true)}, 7, 0, {}});
    CHECK(root_aggregate(store, Mode::Counting).count == 5);
    CHECK(root_aggregate(store, Mode::Decision).consistent);

    store.tables[0].bag = {0};
    CHECK_THROWS_AS(root_aggregate(store, Mode::Counting), InternalError);
}

TEST_CASE("purge: inconsistent instance empties every table", "[dp]") {
    AspSolver s(parse_ground_program("a :- b. b :- a. c :- not a. :- c. d | e."));
    auto      store  = s.solve_pass(Mode::Counting);
    auto      purged = purge(s.decomposition(), store, Mode::Counting);
    CHECK(store.total_rows() > 0);
    CHECK(purged.total_rows() == 0);
}

TEST_CASE("purge: unconstrained instance is unchanged", "[dp]") {
    SatCounter c(parse_dimacs("p cnf 4 0"));
    auto       store = c.count_pass();
    CHECK(same_store(purge(c.decomposition(), store, Mode::Counting), store));
}

TEST_CASE("purge preserves aggregates and leaves only reachable rows", "[dp]") {
    testing::Rng rng(10);
    for (int i = 0; i < 200; ++i) {
        AspSolver s(testing::random_program(rng));
        for (auto mode : {Mode::Decision, Mode::Counting, Mode::Optimization}) {
            auto store  = s.solve_pass(mode);
            auto purged = purge(s.decomposition(), store, mode);
            CHECK(root_aggregate(purged, mode) == root_aggregate(store, mode));
            auto marks = mark_reachable(s.decomposition(), purged, mode);
            for (const auto& t : marks) {
                CHECK(std::all_of(t.begin(), t.end(), [](bool b) { return b; }));
            }
        }
    }
}

TEST_CASE("plan_checks", "[dp]") {
    Graph g(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    auto ntd = make_nice(decompose(g, {}).td);
    std::vector<std::vector<Vertex>> scopes = {{0, 1}, {1, 2}, {2}};
    auto                             plan   = plan_checks(ntd, scopes);
    std::vector<int>                 seen(3, 0);
    for (std::size_t id = 0; id < ntd.size(); ++id) {
        for (auto s : plan.checks_at(id)) {
            CHECK(ntd.node(id).type == NodeType::Forget);
            ++seen[s];
        }
    }
    CHECK(seen == std::vector<int>{1, 1, 1});
    std::vector<std::vector<Vertex>> bad = {{0, 2}};
    CHECK_THROWS_AS(plan_checks(ntd, bad), InternalError);
}
