#include "generators.hpp"

#include "tdcount/errors.hpp"
#include "tdcount/oracle.hpp"
#include "tdcount/treedecomp.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

using namespace tdcount;
using testing::Rng;

namespace {

Graph path3() {
    Graph g(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    return g;
}

TreeDecomposition heuristic_td(const Graph& g, Heuristic h, std::uint64_t seed) {
    return td_from_ordering(g, elimination_ordering(g, h, seed));
}

} // namespace

TEST_CASE("elimination_ordering: star under min-degree", "[td]") {
    Graph star(4);
    for (Vertex v = 1; v < 4; ++v) {
        star.add_edge(0, v);
    }
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto order = elimination_ordering(star, Heuristic::MinDegree, seed);
        REQUIRE(order.size() == 4);
        CHECK(order.back() == 0);
    }
}

TEST_CASE("elimination_ordering: triangle and determinism", "[td]") {
    auto tri = testing::complete_graph(3);
    for (auto h : {Heuristic::MinFill, Heuristic::MinDegree}) {
        CHECK(width(heuristic_td(tri, h, 3)) == Width{2});
    }
    Rng  rng(5);
    auto g = testing::random_graph(rng, 30, 0.2);
    for (auto h : {Heuristic::MinFill, Heuristic::MinDegree}) {
        CHECK(elimination_ordering(g, h, 42) == elimination_ordering(g, h, 42));
        auto order = elimination_ordering(g, h, 42);
        std::sort(order.begin(), order.end());
        CHECK(std::adjacent_find(order.begin(), order.end()) == order.end());
        CHECK(order.size() == 30);
    }
}

TEST_CASE("td_from_ordering", "[td]") {
    std::vector<Vertex> order = {0, 2, 1};
    auto td = td_from_ordering(path3(), order);
    CHECK(width(td) == Width{1});
    CHECK_FALSE(validate_td(path3(), td));

    auto k4 = testing::complete_graph(4);
    std::vector<Vertex> any = {2, 0, 3, 1};
    CHECK(width(td_from_ordering(k4, any)) == Width{3});

    Graph edgeless(5);
    std::vector<Vertex> id = {0, 1, 2, 3, 4};
    auto e = td_from_ordering(edgeless, id);
    CHECK(width(e) == Width{0});
    CHECK_FALSE(validate_td(edgeless, e));
}

TEST_CASE("validate_td: violations", "[td]") {
    auto g = path3();
    TreeDecomposition all{3, {{0, 1, 2}}, {-1}};
    CHECK_FALSE(validate_td(g, all));

    TreeDecomposition missing_edge{3, {{0}, {1, 2}}, {1, -1}};
    auto v = validate_td(g, missing_edge);
    REQUIRE(v);
    CHECK(v->kind == ViolationKind::EdgeNotCovered);
    CHECK(v->witness == std::vector<Vertex>{0, 1});

    TreeDecomposition broken{3, {{0, 1}, {2}, {1, 2}}, {1, 2, -1}};
    // The path {0,1} - {2} - {1,2} loses vertex 1 in the middle bag.
    v = validate_td(g, broken);
    REQUIRE(v);
    CHECK(v->kind == ViolationKind::ConnectednessBroken);
    CHECK(v->witness == std::vector<Vertex>{1});

    TreeDecomposition uncovered{3, {{0, 1}}, {-1}};
    v = validate_td(g, uncovered);
    REQUIRE(v);
    CHECK(v->kind == ViolationKind::VertexNotCovered);

    TreeDecomposition cyclic{3, {{0, 1, 2}, {0, 1, 2}}, {1, 0}};
    v = validate_td(g, cyclic);
    REQUIRE(v);
    CHECK(v->kind == ViolationKind::MalformedTree);
}

TEST_CASE("make_nice: single bag", "[td]") {
    Graph g(2);
    g.add_edge(0, 1);
    auto ntd = make_nice(TreeDecomposition{2, {{0, 1}}, {-1}});
    REQUIRE(ntd.size() == 5);
    CHECK(ntd.node(0).type == NodeType::Leaf);
    CHECK(ntd.node(1).type == NodeType::Introduce);
    CHECK(ntd.node(2).type == NodeType::Introduce);
    CHECK(ntd.node(2).bag == std::vector<Vertex>{0, 1});
    CHECK(ntd.node(3).type == NodeType::Forget);
    CHECK(ntd.node(4).type == NodeType::Forget);
    CHECK(ntd.node(4).bag.empty());
    CHECK(width(ntd) == Width{1});
    CHECK_FALSE(validate_nice(g, ntd));
}

TEST_CASE("make_nice: already nice input keeps width", "[td]") {
    Graph g(2);
    g.add_edge(0, 1);
    auto once  = make_nice(TreeDecomposition{2, {{0, 1}}, {-1}});
    auto twice = make_nice(once.as_tree_decomposition());
    CHECK(width(twice) == width(once));
    CHECK_FALSE(validate_nice(g, twice));
}

TEST_CASE("make_nice: random 30-vertex graphs", "[td]") {
    Rng rng(30);
    for (int i = 0; i < 40; ++i) {
        auto g   = testing::random_graph(rng, 30, 0.05 + 0.02 * (i % 10));
        auto td  = heuristic_td(g, i % 2 ? Heuristic::MinFill : Heuristic::MinDegree, static_cast<std::uint64_t>(i));
        auto ntd = make_nice(td);
        CHECK(width(ntd) == width(td));
        CHECK_FALSE(validate_nice(g, ntd));
        CHECK(ntd.node(ntd.root()).bag.empty());
        // every source bag appears as a nice bag
        for (const auto& bag : td.bags) {
            auto nodes = ntd.nodes();
            CHECK(std::any_of(nodes.begin(), nodes.end(), [&](const NiceNode& n) { return n.bag == bag; }));
        }
        // each vertex is forgotten exactly once, children precede parents, joins are binary
        std::vector<int> forgets(30, 0);
        for (std::size_t id = 0; id < ntd.size(); ++id) {
            const auto& n = ntd.node(id);
            if (n.type == NodeType::Forget) {
                ++forgets[n.vertex];
                CHECK(ntd.forget_node(n.vertex) == id);
            }
            for (std::size_t k = 0; k < n.num_children(); ++k) {
                CHECK(n.children[k] < static_cast<std::int64_t>(id));
            }
            CHECK((n.type == NodeType::Join) == (n.num_children() == 2));
        }
        CHECK(std::all_of(forgets.begin(), forgets.end(), [](int c) { return c == 1; }));
    }
}

TEST_CASE("validate_nice rejects malformed node contracts", "[td]") {
    Graph g(1);
    // Introduce that does not add its vertex.
    std::vector<NiceNode> nodes = {
        NiceNode{NodeType::Leaf, {}, 0, {-1, -1}},
        NiceNode{NodeType::Introduce, {0}, 0, {0, -1}},
        NiceNode{NodeType::Introduce, {0}, 0, {1, -1}},
        NiceNode{NodeType::Forget, {}, 0, {2, -1}},
    };
    auto v = validate_nice(g, NiceTreeDecomposition(1, nodes));
    REQUIRE(v);
    CHECK(v->kind == ViolationKind::NotNice);

    // Leaf with a non-empty bag.
    std::vector<NiceNode> leafy = {NiceNode{NodeType::Leaf, {0}, 0, {-1, -1}}, NiceNode{NodeType::Forget, {}, 0, {0, -1}}};
    v = validate_nice(g, NiceTreeDecomposition(1, leafy));
    REQUIRE(v);
    CHECK(v->kind == ViolationKind::NotNice);
}

TEST_CASE("width examples", "[td]") {
    Rng rng(1);
    for (std::size_t n = 2; n < 40; n += 3) {
        auto tree = testing::random_tree(rng, n);
        for (auto h : {Heuristic::MinFill, Heuristic::MinDegree}) {
            CHECK(width(heuristic_td(tree, h, n)) == Width{1});
        }
    }
    auto k5 = testing::complete_graph(5);
    CHECK(width(heuristic_td(k5, Heuristic::MinFill, 0)) == Width{4});
    CHECK(oracle::brute_treewidth(testing::cycle_graph(4)) == 2);
    CHECK(width(heuristic_td(testing::cycle_graph(4), Heuristic::MinFill, 0)) == Width{2});
}

TEST_CASE("heuristic width bounds exact treewidth on small graphs", "[td]") {
    Rng rng(2);
    for (int i = 0; i < 60; ++i) {
        auto g     = testing::random_graph(rng, testing::uniform(rng, 1, 11), 0.35);
        auto exact = oracle::brute_treewidth(g);
        for (auto h : {Heuristic::MinFill, Heuristic::MinDegree}) {
            CHECK(width(heuristic_td(g, h, static_cast<std::uint64_t>(i))).value >= exact);
        }
    }
}

TEST_CASE("decompose picks lowest width then lowest seed", "[td]") {
    Rng  rng(3);
    auto g    = testing::random_graph(rng, 40, 0.15);
    auto best = decompose(g, DecomposeOptions{Heuristic::MinFill, 10, 5});
    std::optional<std::pair<Width, std::uint64_t>> expected;
    for (std::uint64_t s = 10; s < 15; ++s) {
        auto w = width(heuristic_td(g, Heuristic::MinFill, s));
        if (!expected || w < expected->first) {
            expected = {w, s};
        }
    }
    CHECK(best.width == expected->first);
    CHECK(best.seed == expected->second);
    CHECK(width(best.td) == best.width);
    CHECK_FALSE(validate_td(g, best.td));
}

TEST_CASE("PACE td round trip", "[td]") {
    Rng  rng(4);
    auto g  = testing::random_graph(rng, 15, 0.3);
    auto td = heuristic_td(g, Heuristic::MinDegree, 1);
    std::stringstream s;
    write_pace_td(s, td);
    auto back = read_pace_td(s);
    CHECK(back.size() == td.size());
    CHECK(width(back) == width(td));
    CHECK_FALSE(validate_td(g, back));

    std::istringstream extra("s td 2 1 2\nb 1 1\nb 2 2\n1 2\n2 1\n");
    CHECK_THROWS_AS(read_pace_td(extra), FormatError);
    std::istringstream split("s td 2 1 2\nb 1 1\nb 2 2\n");
    CHECK_THROWS_AS(read_pace_td(split), FormatError);
}

TEST_CASE("heuristic names", "[td]") {
    CHECK(parse_heuristic("min-fill") == Heuristic::MinFill);
    CHECK(parse_heuristic("min-degree") == Heuristic::MinDegree);
    CHECK_FALSE(parse_heuristic("random"));
    CHECK(to_string(Heuristic::MinDegree) == "min-degree");
}
