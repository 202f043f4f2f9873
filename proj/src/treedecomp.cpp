#include "tdcount/treedecomp.hpp"

#include "tdcount/errors.hpp"

#include <algorithm>
#include <future>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>

namespace tdcount {

std::string_view to_string(Heuristic h) { return h == Heuristic::MinFill ? "min-fill" : "min-degree"; }

std::optional<Heuristic> parse_heuristic(std::string_view text) {
    if (text == "min-fill") {
        return Heuristic::MinFill;
    }
    if (text == "min-degree") {
        return Heuristic::MinDegree;
    }
    return std::nullopt;
}

std::string_view to_string(NodeType t) {
    switch (t) {
        case NodeType::Leaf     : return "leaf";
        case NodeType::Introduce: return "introduce";
        case NodeType::Forget   : return "forget";
        case NodeType::Join     : return "join";
    }
    return "?";
}

std::string_view to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::MalformedTree      : return "MalformedTree";
        case ViolationKind::VertexNotCovered   : return "VertexNotCovered";
        case ViolationKind::EdgeNotCovered     : return "EdgeNotCovered";
        case ViolationKind::ConnectednessBroken: return "ConnectednessBroken";
        case ViolationKind::NotNice            : return "NotNice";
    }
    return "?";
}

std::size_t TreeDecomposition::root() const {
    for (std::size_t i = 0; i < parent.size(); ++i) {
        if (parent[i] < 0) {
            return i;
        }
    }
    throw InternalError("tree decomposition without root");
}

std::vector<std::vector<std::size_t>> TreeDecomposition::children() const {
    std::vector<std::vector<std::size_t>> out(parent.size());
    for (std::size_t i = 0; i < parent.size(); ++i) {
        if (parent[i] >= 0) {
            out.at(static_cast<std::size_t>(parent[i])).push_back(i);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Elimination orderings
// ---------------------------------------------------------------------------

namespace {

using AdjSets = std::vector<std::set<Vertex>>;

AdjSets to_sets(const Graph& g) {
    AdjSets adj(g.num_vertices());
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        auto nb = g.neighbors(v);
        adj[v].insert(nb.begin(), nb.end());
    }
    return adj;
}

std::size_t fill_in(const AdjSets& adj, Vertex v) {
    std::size_t missing = 0;
    const auto& nb      = adj[v];
    for (auto it = nb.begin(); it != nb.end(); ++it) {
        for (auto jt = std::next(it); jt != nb.end(); ++jt) {
            if (adj[*it].count(*jt) == 0) {
                ++missing;
            }
        }
    }
    return missing;
}

void eliminate(AdjSets& adj, Vertex v) {
    std::vector<Vertex> nb(adj[v].begin(), adj[v].end());
    for (std::size_t i = 0; i < nb.size(); ++i) {
        adj[nb[i]].erase(v);
        for (std::size_t j = i + 1; j < nb.size(); ++j) {
            adj[nb[i]].insert(nb[j]);
            adj[nb[j]].insert(nb[i]);
        }
    }
    adj[v].clear();
}

} // namespace

std::vector<Vertex> elimination_ordering(const Graph& graph, Heuristic heuristic, std::uint64_t seed) {
    const auto          n = graph.num_vertices();
    AdjSets             adj = to_sets(graph);
    std::vector<bool>   done(n, false);
    std::vector<Vertex> order;
    order.reserve(n);
    std::mt19937_64 rng(seed);

    using Score = std::pair<std::size_t, std::size_t>;
    std::vector<Vertex> best;
    for (std::size_t step = 0; step < n; ++step) {
        Score best_score{std::numeric_limits<std::size_t>::max(), std::numeric_limits<std::size_t>::max()};
        best.clear();
        for (Vertex v = 0; v < n; ++v) {
            if (done[v]) {
                continue;
            }
            Score s = heuristic == Heuristic::MinDegree ? Score{adj[v].size(), graph.neighbors(v).size()}
                                                        : Score{fill_in(adj, v), adj[v].size()};
            if (s < best_score) {
                best_score = s;
                best.clear();
            }
            if (s == best_score) {
                best.push_back(v);
            }
        }
        std::uniform_int_distribution<std::size_t> pick(0, best.size() - 1);
        Vertex v = best[pick(rng)];
        done[v]  = true;
        order.push_back(v);
        eliminate(adj, v);
    }
    return order;
}

TreeDecomposition td_from_ordering(const Graph& graph, std::span<const Vertex> ordering) {
    const auto n = graph.num_vertices();
    if (ordering.size() != n) {
        throw InternalError("ordering is not a permutation of the vertices");
    }
    std::vector<std::size_t> pos(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (ordering[i] >= n || pos[ordering[i]] != n) {
            throw InternalError("ordering is not a permutation of the vertices");
        }
        pos[ordering[i]] = i;
    }

    TreeDecomposition td;
    td.num_graph_vertices = n;
    if (n == 0) {
        td.bags.emplace_back();
        td.parent.push_back(-1);
        return td;
    }
    td.bags.resize(n);
    td.parent.assign(n, -1);

    AdjSets adj = to_sets(graph);
    for (std::size_t i = 0; i < n; ++i) {
        Vertex v   = ordering[i];
        auto&  bag = td.bags[i];
        bag.push_back(v);
        std::size_t parent_pos = n;
        for (auto u : adj[v]) {
            bag.push_back(u);
            parent_pos = std::min(parent_pos, pos[u]);
        }
        std::sort(bag.begin(), bag.end());
        if (parent_pos < n) {
            td.parent[i] = static_cast<std::int64_t>(parent_pos);
        }
        eliminate(adj, v);
    }
    // One node per connected component has no parent; hang them below the last one.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (td.parent[i] < 0) {
            td.parent[i] = static_cast<std::int64_t>(n - 1);
        }
    }
    return td;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

std::optional<Violation> check_tree(const TreeDecomposition& td) {
    const auto m = td.bags.size();
    if (m == 0 || td.parent.size() != m) {
        return Violation{ViolationKind::MalformedTree, {}};
    }
    std::size_t roots = 0;
    for (auto p : td.parent) {
        if (p < 0) {
            ++roots;
        }
        else if (static_cast<std::size_t>(p) >= m) {
            return Violation{ViolationKind::MalformedTree, {}};
        }
    }
    if (roots != 1) {
        return Violation{ViolationKind::MalformedTree, {}};
    }
    // Every node must reach the root without revisiting a node.
    std::vector<int> state(m, 0); // 0 unknown, 1 on stack, 2 reaches root
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<std::size_t> path;
        std::size_t              cur = i;
        while (state[cur] == 0) {
            state[cur] = 1;
            path.push_back(cur);
            if (td.parent[cur] < 0) {
                break;
            }
            cur = static_cast<std::size_t>(td.parent[cur]);
        }
        if (state[cur] == 1 && td.parent[cur] >= 0) {
            return Violation{ViolationKind::MalformedTree, {}};
        }
        for (auto p : path) {
            state[p] = 2;
        }
    }
    for (const auto& bag : td.bags) {
        if (!std::is_sorted(bag.begin(), bag.end()) || std::adjacent_find(bag.begin(), bag.end()) != bag.end()) {
            return Violation{ViolationKind::MalformedTree, {}};
        }
        if (!bag.empty() && bag.back() >= td.num_graph_vertices) {
            return Violation{ViolationKind::MalformedTree, {bag.back()}};
        }
    }
    return std::nullopt;
}

} // namespace

std::optional<Violation> validate_td(const Graph& graph, const TreeDecomposition& td) {
    if (td.num_graph_vertices != graph.num_vertices()) {
        return Violation{ViolationKind::MalformedTree, {}};
    }
    if (auto v = check_tree(td)) {
        return v;
    }
    const auto                            n = graph.num_vertices();
    std::vector<std::vector<std::size_t>> occurs(n);
    for (std::size_t i = 0; i < td.bags.size(); ++i) {
        for (auto v : td.bags[i]) {
            occurs[v].push_back(i);
        }
    }
    for (Vertex v = 0; v < n; ++v) {
        if (occurs[v].empty()) {
            return Violation{ViolationKind::VertexNotCovered, {v}};
        }
    }
    for (auto [u, v] : graph.edges()) {
        std::vector<std::size_t> common;
        std::set_intersection(occurs[u].begin(), occurs[u].end(), occurs[v].begin(), occurs[v].end(),
                              std::back_inserter(common));
        if (common.empty()) {
            return Violation{ViolationKind::EdgeNotCovered, {u, v}};
        }
    }
    // The occurrence set of v is connected iff exactly one of its nodes has a parent outside it.
    for (Vertex v = 0; v < n; ++v) {
        std::size_t tops = 0;
        for (auto i : occurs[v]) {
            auto p = td.parent[i];
            if (p < 0 || !std::binary_search(td.bags[static_cast<std::size_t>(p)].begin(),
                                             td.bags[static_cast<std::size_t>(p)].end(), v)) {
                ++tops;
            }
        }
        if (tops != 1) {
            return Violation{ViolationKind::ConnectednessBroken, {v}};
        }
    }
    return std::nullopt;
}

std::optional<Violation> validate_nice(const Graph& graph, const NiceTreeDecomposition& ntd) {
    if (auto v = validate_td(graph, ntd.as_tree_decomposition())) {
        return v;
    }
    auto nodes = ntd.nodes();
    if (!nodes.back().bag.empty()) {
        return Violation{ViolationKind::NotNice, nodes.back().bag};
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& nd = nodes[i];
        auto        kids = nd.num_children();
        auto        child_bag = [&](std::size_t k) -> const std::vector<Vertex>& {
            return nodes[static_cast<std::size_t>(nd.children[k])].bag;
        };
        for (std::size_t k = 0; k < kids; ++k) {
            if (static_cast<std::size_t>(nd.children[k]) >= i) {
                return Violation{ViolationKind::NotNice, {}};
            }
        }
        bool ok = true;
        switch (nd.type) {
            case NodeType::Leaf: ok = kids == 0 && nd.bag.empty(); break;
            case NodeType::Join: ok = kids == 2 && child_bag(0) == nd.bag && child_bag(1) == nd.bag; break;
            case NodeType::Introduce: {
                if (kids != 1) {
                    ok = false;
                    break;
                }
                auto expect = child_bag(0);
                ok = !std::binary_search(expect.begin(), expect.end(), nd.vertex);
                expect.insert(std::lower_bound(expect.begin(), expect.end(), nd.vertex), nd.vertex);
                ok = ok && expect == nd.bag;
                break;
            }
            case NodeType::Forget: {
                if (kids != 1) {
                    ok = false;
                    break;
                }
                auto expect = child_bag(0);
                auto it     = std::lower_bound(expect.begin(), expect.end(), nd.vertex);
                ok          = it != expect.end() && *it == nd.vertex;
                if (ok) {
                    expect.erase(it);
                    ok = expect == nd.bag;
                }
                break;
            }
        }
        if (!ok) {
            return Violation{ViolationKind::NotNice, nd.bag};
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Nice decompositions
// ---------------------------------------------------------------------------

NiceTreeDecomposition::NiceTreeDecomposition(std::size_t num_graph_vertices, std::vector<NiceNode> nodes)
    : num_graph_vertices_(num_graph_vertices)
    , nodes_(std::move(nodes))
    , parent_(nodes_.size(), -1)
    , forget_of_(num_graph_vertices, std::numeric_limits<std::size_t>::max()) {
    if (nodes_.empty()) {
        throw InternalError("nice tree decomposition without nodes");
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& nd = nodes_[i];
        for (std::size_t k = 0; k < nd.num_children(); ++k) {
            auto c = nd.children[k];
            if (c < 0 || static_cast<std::size_t>(c) >= i || parent_[static_cast<std::size_t>(c)] >= 0) {
                throw InternalError("nice tree decomposition is not stored in post-order");
            }
            parent_[static_cast<std::size_t>(c)] = static_cast<std::int64_t>(i);
        }
        if (nd.type == NodeType::Forget) {
            if (nd.vertex >= num_graph_vertices_ || forget_of_[nd.vertex] != std::numeric_limits<std::size_t>::max()) {
                throw InternalError("vertex forgotten more than once");
            }
            forget_of_[nd.vertex] = i;
        }
    }
}

TreeDecomposition NiceTreeDecomposition::as_tree_decomposition() const {
    TreeDecomposition td;
    td.num_graph_vertices = num_graph_vertices_;
    td.parent             = parent_;
    for (const auto& nd : nodes_) {
        td.bags.push_back(nd.bag);
    }
    return td;
}

NiceTreeDecomposition make_nice(const TreeDecomposition& td) {
    std::vector<NiceNode> nodes;
    auto add = [&](NiceNode nd) {
        nodes.push_back(std::move(nd));
        return static_cast<std::int64_t>(nodes.size() - 1);
    };
    // Moves from the bag at `top` to `target`: forget what is not kept, then introduce what is new.
    auto transition = [&](std::int64_t top, const std::vector<Vertex>& target) {
        auto cur = nodes[static_cast<std::size_t>(top)].bag;
        std::vector<Vertex> drop, gain;
        std::set_difference(cur.begin(), cur.end(), target.begin(), target.end(), std::back_inserter(drop));
        std::set_difference(target.begin(), target.end(), cur.begin(), cur.end(), std::back_inserter(gain));
        for (auto v : drop) {
            cur.erase(std::lower_bound(cur.begin(), cur.end(), v));
            top = add(NiceNode{NodeType::Forget, cur, v, {top, -1}});
        }
        for (auto v : gain) {
            cur.insert(std::lower_bound(cur.begin(), cur.end(), v), v);
            top = add(NiceNode{NodeType::Introduce, cur, v, {top, -1}});
        }
        return top;
    };

    const auto children = td.children();
    const auto root     = td.root();
    std::vector<std::int64_t> top(td.size(), -1);
    // Iterative DFS; a node is finished once all of its children are.
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
        auto& [t, next] = stack.back();
        if (next < children[t].size()) {
            auto c = children[t][next++];
            stack.emplace_back(c, 0);
            continue;
        }
        const auto& bag = td.bags[t];
        std::int64_t cur = -1;
        if (children[t].empty()) {
            cur = transition(add(NiceNode{NodeType::Leaf, {}, 0, {-1, -1}}), bag);
        }
        else {
            for (auto c : children[t]) {
                cur = cur < 0 ? top[c] : add(NiceNode{NodeType::Join, bag, 0, {cur, top[c]}});
            }
        }
        auto parent = td.parent[t];
        top[t] = transition(cur, parent < 0 ? std::vector<Vertex>{} : td.bags[static_cast<std::size_t>(parent)]);
        stack.pop_back();
    }
    return NiceTreeDecomposition(td.num_graph_vertices, std::move(nodes));
}

Width width(const TreeDecomposition& td) {
    std::size_t m = 0;
    for (const auto& b : td.bags) {
        m = std::max(m, b.size());
    }
    return Width{m == 0 ? 0 : m - 1};
}

Width width(const NiceTreeDecomposition& ntd) {
    std::size_t m = 0;
    for (const auto& nd : ntd.nodes()) {
        m = std::max(m, nd.bag.size());
    }
    return Width{m == 0 ? 0 : m - 1};
}

Decomposition decompose(const Graph& graph, const DecomposeOptions& options) {
    const auto tries = std::max<std::size_t>(options.seeds, 1);
    auto run = [&graph, &options](std::uint64_t seed) {
        auto order = elimination_ordering(graph, options.heuristic, seed);
        auto td    = td_from_ordering(graph, order);
        auto w     = width(td);
        return Decomposition{std::move(td), seed, w};
    };
    std::vector<std::future<Decomposition>> jobs;
    for (std::size_t i = 0; i < tries; ++i) {
        jobs.push_back(std::async(tries > 1 ? std::launch::async : std::launch::deferred, run, options.seed + i));
    }
    std::optional<Decomposition> best;
    for (auto& j : jobs) {
        auto d = j.get();
        if (!best || d.width < best->width) {
            best = std::move(d);
        }
    }
    return std::move(*best);
}

// ---------------------------------------------------------------------------
// PACE .td
// ---------------------------------------------------------------------------

void write_pace_td(std::ostream& out, const TreeDecomposition& td) {
    std::size_t max_bag = 0;
    for (const auto& b : td.bags) {
        max_bag = std::max(max_bag, b.size());
    }
    out << "s td " << td.size() << " " << max_bag << " " << td.num_graph_vertices << "\n";
    for (std::size_t i = 0; i < td.size(); ++i) {
        out << "b " << (i + 1);
        for (auto v : td.bags[i]) {
            out << " " << (v + 1);
        }
        out << "\n";
    }
    for (std::size_t i = 0; i < td.size(); ++i) {
        if (td.parent[i] >= 0) {
            out << (td.parent[i] + 1) << " " << (i + 1) << "\n";
        }
    }
}

TreeDecomposition read_pace_td(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool        header  = false;
    std::size_t num_bags = 0, max_bag = 0, num_edges = 0;
    TreeDecomposition td;
    std::vector<bool> seen;
    std::vector<std::vector<std::size_t>> adj;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string        first;
        if (!(ls >> first) || first == "c") {
            continue;
        }
        if (first == "s") {
            std::string kind;
            if (header || !(ls >> kind >> num_bags >> max_bag >> td.num_graph_vertices) || kind != "td" || num_bags == 0) {
                throw SyntaxError(line_no, 1, "expected single 's td <bags> <maxbag> <vertices>' line");
            }
            header = true;
            td.bags.resize(num_bags);
            seen.assign(num_bags, false);
            adj.resize(num_bags);
            continue;
        }
        if (!header) {
            throw SyntaxError(line_no, 1, "content before solution line");
        }
        if (first == "b") {
            std::size_t id = 0;
            if (!(ls >> id) || id == 0 || id > num_bags || seen[id - 1]) {
                throw SyntaxError(line_no, 1, "invalid bag id");
            }
            seen[id - 1] = true;
            std::size_t v = 0;
            while (ls >> v) {
                if (v == 0 || v > td.num_graph_vertices) {
                    throw SyntaxError(line_no, 1, "bag vertex out of range");
                }
                td.bags[id - 1].push_back(static_cast<Vertex>(v - 1));
            }
            auto& bag = td.bags[id - 1];
            std::sort(bag.begin(), bag.end());
            bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
            if (bag.size() > max_bag) {
                throw HeaderMismatch("bag " + std::to_string(id) + " exceeds declared maximum size");
            }
            continue;
        }
        std::istringstream es(line);
        std::size_t        a = 0, b = 0;
        if (!(es >> a >> b) || a == 0 || b == 0 || a > num_bags || b > num_bags) {
            throw SyntaxError(line_no, 1, "invalid tree edge");
        }
        adj[a - 1].push_back(b - 1);
        adj[b - 1].push_back(a - 1);
        ++num_edges;
    }
    if (!header) {
        throw SyntaxError(line_no, 1, "missing solution line");
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw FormatError("missing bag line");
    }
    if (num_bags == 0) {
        return td;
    }
    if (num_edges != num_bags - 1) {
        throw FormatError("decomposition has " + std::to_string(num_edges) + " tree edges, expected " +
                          std::to_string(num_bags - 1));
    }
    // Orient the tree from bag 1.
    td.parent.assign(num_bags, -2);
    td.parent[0] = -1;
    std::queue<std::size_t> q;
    q.push(0);
    std::size_t reached = 1;
    while (!q.empty()) {
        auto u = q.front();
        q.pop();
        for (auto v : adj[u]) {
            if (td.parent[v] == -2) {
                td.parent[v] = static_cast<std::int64_t>(u);
                ++reached;
                q.push(v);
            }
        }
    }
    if (reached != num_bags) {
        throw FormatError("decomposition tree is not connected");
    }
    return td;
}

} // namespace tdcount
