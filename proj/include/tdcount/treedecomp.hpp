#pragma once

#include "tdcount/graph.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tdcount {

enum class Heuristic { MinFill, MinDegree };

std::string_view         to_string(Heuristic h);
std::optional<Heuristic> parse_heuristic(std::string_view text);

//! Largest bag size minus one (zero for decompositions with only empty bags).
struct Width {
    std::size_t value = 0;
    friend auto operator<=>(const Width&, const Width&) = default;
};

//! Rooted tree of bags. Node ids index `bags` and `parent`; the root has parent -1.
struct TreeDecomposition {
    std::size_t                      num_graph_vertices = 0;
    std::vector<std::vector<Vertex>> bags;
    std::vector<std::int64_t>        parent;

    [[nodiscard]] std::size_t                           size() const noexcept { return bags.size(); }
    [[nodiscard]] std::size_t                           root() const;
    [[nodiscard]] std::vector<std::vector<std::size_t>> children() const;
};

enum class NodeType { Leaf, Introduce, Forget, Join };

std::string_view to_string(NodeType t);

struct NiceNode {
    NodeType                    type = NodeType::Leaf;
    std::vector<Vertex>         bag;     //!< sorted
    Vertex                      vertex = 0; //!< introduced or forgotten vertex
    std::array<std::int64_t, 2> children{-1, -1};

    [[nodiscard]] std::size_t num_children() const noexcept {
        return static_cast<std::size_t>(children[0] >= 0) + static_cast<std::size_t>(children[1] >= 0);
    }
};

//! Nice tree decomposition stored in post-order: children precede parents and the root is the last node.
class NiceTreeDecomposition {
public:
    NiceTreeDecomposition() = default;
    NiceTreeDecomposition(std::size_t num_graph_vertices, std::vector<NiceNode> nodes);

    [[nodiscard]] std::size_t                num_graph_vertices() const noexcept { return num_graph_vertices_; }
    [[nodiscard]] std::size_t                size() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::size_t                root() const noexcept { return nodes_.size() - 1; }
    [[nodiscard]] const NiceNode&            node(std::size_t id) const { return nodes_.at(id); }
    [[nodiscard]] std::span<const NiceNode>  nodes() const noexcept { return nodes_; }
    //! Parent of every node (-1 for the root).
    [[nodiscard]] const std::vector<std::int64_t>& parents() const noexcept { return parent_; }
    //! The unique Forget node of each graph vertex.
    [[nodiscard]] std::size_t                forget_node(Vertex v) const { return forget_of_.at(v); }
    //! Plain tree-decomposition view (same nodes and bags).
    [[nodiscard]] TreeDecomposition          as_tree_decomposition() const;

private:
    std::size_t               num_graph_vertices_ = 0;
    std::vector<NiceNode>     nodes_;
    std::vector<std::int64_t> parent_;
    std::vector<std::size_t>  forget_of_;
};

//! Greedy elimination ordering. Ties on the heuristic score are broken by a secondary score
//! (original degree for min-degree, current degree for min-fill) and then uniformly at random
//! from a generator seeded with `seed`.
std::vector<Vertex> elimination_ordering(const Graph& graph, Heuristic heuristic, std::uint64_t seed);

//! Bucket elimination: the bag of vertex v is v plus its later-eliminated neighbours in the fill-in graph.
TreeDecomposition td_from_ordering(const Graph& graph, std::span<const Vertex> ordering);

enum class ViolationKind { MalformedTree, VertexNotCovered, EdgeNotCovered, ConnectednessBroken, NotNice };

std::string_view to_string(ViolationKind k);

struct Violation {
    ViolationKind       kind = ViolationKind::MalformedTree;
    std::vector<Vertex> witness;
};

//! Checks the three decomposition conditions; std::nullopt means valid.
std::optional<Violation> validate_td(const Graph& graph, const TreeDecomposition& td);
//! Additionally checks the node-type contracts of a nice decomposition.
std::optional<Violation> validate_nice(const Graph& graph, const NiceTreeDecomposition& ntd);

NiceTreeDecomposition make_nice(const TreeDecomposition& td);

Width width(const TreeDecomposition& td);
Width width(const NiceTreeDecomposition& ntd);

struct DecomposeOptions {
    Heuristic     heuristic = Heuristic::MinFill;
    std::uint64_t seed      = 0;
    std::size_t   seeds     = 1; //!< tries seed, seed+1, ..., keeps the narrowest
};

struct Decomposition {
    TreeDecomposition td;
    std::uint64_t     seed = 0;
    Width             width;
};

//! Decomposes with every seed (concurrently) and keeps the lowest width, then the lowest seed.
Decomposition decompose(const Graph& graph, const DecomposeOptions& options);

//! PACE ".td" format: `s td <bags> <width+1> <vertices>`, `b <id> <v...>` lines, tree edges.
void              write_pace_td(std::ostream& out, const TreeDecomposition& td);
TreeDecomposition read_pace_td(std::istream& in);

} // namespace tdcount
