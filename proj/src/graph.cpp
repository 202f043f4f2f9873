#include "tdcount/graph.hpp"

#include "tdcount/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace tdcount {

Graph::Graph(std::size_t num_vertices)
    : adjacency_(num_vertices) {}

bool Graph::has_edge(Vertex u, Vertex v) const {
    const auto& adj = adjacency_.at(u);
    return std::binary_search(adj.begin(), adj.end(), v);
}

bool Graph::add_edge(Vertex u, Vertex v) {
    if (u == v) {
        return false;
    }
    auto& au = adjacency_.at(u);
    auto  it = std::lower_bound(au.begin(), au.end(), v);
    if (it != au.end() && *it == v) {
        return false;
    }
    au.insert(it, v);
    auto& av = adjacency_.at(v);
    av.insert(std::lower_bound(av.begin(), av.end(), u), u);
    ++num_edges_;
    return true;
}

void Graph::add_clique(std::span<const Vertex> vertices) {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        for (std::size_t j = i + 1; j < vertices.size(); ++j) {
            add_edge(vertices[i], vertices[j]);
        }
    }
}

std::vector<std::pair<Vertex, Vertex>> Graph::edges() const {
    std::vector<std::pair<Vertex, Vertex>> out;
    out.reserve(num_edges_);
    for (Vertex u = 0; u < adjacency_.size(); ++u) {
        for (auto v : adjacency_[u]) {
            if (u < v) {
                out.emplace_back(u, v);
            }
        }
    }
    return out;
}

void Graph::set_labels(std::vector<std::string> labels) {
    if (labels.size() != adjacency_.size()) {
        throw InternalError("label count does not match vertex count");
    }
    labels_ = std::move(labels);
}

Graph primal_graph(const GroundProgram& program) {
    Graph g(program.num_atoms());
    for (const auto& r : program.rules()) {
        auto atoms = r.atoms();
        g.add_clique(std::span<const Vertex>(atoms.data(), atoms.size()));
    }
    std::vector<std::string> labels;
    for (const auto& a : program.atoms()) {
        labels.push_back(program.display_name(a.id));
    }
    g.set_labels(std::move(labels));
    return g;
}

Graph incidence_graph(const GroundProgram& program) {
    const auto n = program.num_atoms();
    Graph      g(n + program.rules().size());
    std::vector<std::string> labels;
    for (const auto& a : program.atoms()) {
        labels.push_back(program.display_name(a.id));
    }
    for (std::size_t i = 0; i < program.rules().size(); ++i) {
        auto rv = static_cast<Vertex>(n + i);
        for (auto a : program.rules()[i].atoms()) {
            g.add_edge(a, rv);
        }
        labels.push_back("r" + std::to_string(i + 1));
    }
    g.set_labels(std::move(labels));
    return g;
}

Graph primal_graph_cnf(const CnfFormula& formula) {
    Graph               g(formula.num_vars);
    std::vector<Vertex> vars;
    for (const auto& clause : formula.clauses) {
        vars.clear();
        for (auto lit : clause) {
            vars.push_back(static_cast<Vertex>(std::abs(lit) - 1));
        }
        g.add_clique(vars);
    }
    return g;
}

void write_pace_graph(std::ostream& out, const Graph& g) {
    out << "p tw " << g.num_vertices() << " " << g.num_edges() << "\n";
    for (auto [u, v] : g.edges()) {
        out << (u + 1) << " " << (v + 1) << "\n";
    }
}

Graph read_pace_graph(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<Graph> g;
    std::size_t declared_edges = 0, edges = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string        first;
        if (!(ls >> first) || first == "c") {
            continue;
        }
        if (first == "p") {
            std::string kind;
            std::size_t n = 0;
            if (!(ls >> kind >> n >> declared_edges) || kind != "tw" || g) {
                throw SyntaxError(line_no, 1, "expected single 'p tw <n> <m>' header");
            }
            g.emplace(n);
            continue;
        }
        if (!g) {
            throw SyntaxError(line_no, 1, "edge before header");
        }
        std::size_t u = 0, v = 0;
        std::istringstream es(line);
        if (!(es >> u >> v) || u == 0 || v == 0 || u > g->num_vertices() || v > g->num_vertices()) {
            throw SyntaxError(line_no, 1, "invalid edge line");
        }
        g->add_edge(static_cast<Vertex>(u - 1), static_cast<Vertex>(v - 1));
        ++edges;
    }
    if (!g) {
        throw SyntaxError(line_no, 1, "missing header");
    }
    if (edges != declared_edges) {
        throw HeaderMismatch(std::to_string(edges) + " edges found, " + std::to_string(declared_edges) + " declared");
    }
    return std::move(*g);
}

} // namespace tdcount
