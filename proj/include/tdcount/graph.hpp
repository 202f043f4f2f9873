#pragma once

#include "tdcount/program.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tdcount {

using Vertex = std::uint32_t;

//! Simple undirected graph with sorted adjacency lists.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t num_vertices);

    [[nodiscard]] std::size_t num_vertices() const noexcept { return adjacency_.size(); }
    [[nodiscard]] std::size_t num_edges() const noexcept { return num_edges_; }

    [[nodiscard]] std::span<const Vertex> neighbors(Vertex v) const { return adjacency_.at(v); }
    [[nodiscard]] bool                    has_edge(Vertex u, Vertex v) const;
    [[nodiscard]] std::vector<std::pair<Vertex, Vertex>> edges() const;

    //! Adds {u,v}; self-loops and duplicates are ignored. Returns true if the edge is new.
    bool add_edge(Vertex u, Vertex v);
    void add_clique(std::span<const Vertex> vertices);

    [[nodiscard]] const std::optional<std::vector<std::string>>& labels() const noexcept { return labels_; }
    void set_labels(std::vector<std::string> labels);

private:
    std::vector<std::vector<Vertex>>         adjacency_;
    std::size_t                              num_edges_ = 0;
    std::optional<std::vector<std::string>>  labels_;
};

//! Atoms are vertices; the atoms of every rule form a clique.
Graph primal_graph(const GroundProgram& program);

//! Bipartite graph: vertices 0..n-1 are atoms, n..n+m-1 are rules.
Graph incidence_graph(const GroundProgram& program);

//! Variables are vertices (variable i is vertex i-1); every clause forms a clique.
Graph primal_graph_cnf(const CnfFormula& formula);

//! PACE ".gr" edge list: `p tw n m` header, 1-based endpoints.
void  write_pace_graph(std::ostream& out, const Graph& g);
Graph read_pace_graph(std::istream& in);

} // namespace tdcount
