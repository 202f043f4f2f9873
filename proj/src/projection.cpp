#include "tdcount/projection.hpp"

#include <algorithm>

namespace tdcount {

using dp::Assignment;

Integer ProjTable::intersection_count(std::span<const std::uint32_t> rows) const {
    Integer sum = 0;
    for (const auto& [key, value] : entries) {
        if (std::includes(key.begin(), key.end(), rows.begin(), rows.end())) {
            sum += value;
        }
    }
    return sum;
}

Integer ProjTable::union_count(std::span<const std::uint32_t> rows) const {
    if (rows.size() > 24) {
        throw TooLarge("inclusion-exclusion over more than 24 rows");
    }
    Integer                    sum = 0;
    std::vector<std::uint32_t> subset;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << rows.size()); ++mask) {
        subset.clear();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if ((mask >> i) & 1U) {
                subset.push_back(rows[i]);
            }
        }
        auto term = intersection_count(subset);
        if (subset.size() % 2 == 1) {
            sum += term;
        }
        else {
            sum -= term;
        }
    }
    return sum;
}

Integer ProjTable::total() const {
    Integer sum = 0;
    for (const auto& [key, value] : entries) {
        sum += value;
    }
    return sum;
}

namespace {

void add_entry(ProjTable& t, ProjTable::Key key, const Integer& value) {
    if (key.empty() || value == 0) {
        return;
    }
    std::sort(key.begin(), key.end());
    key.erase(std::unique(key.begin(), key.end()), key.end());
    t.entries[std::move(key)] += value;
}

Assignment projection_mask(std::span<const Vertex> bag, const std::vector<bool>& in_projection) {
    Assignment m = 0;
    for (std::size_t i = 0; i < bag.size(); ++i) {
        if (in_projection.at(bag[i])) {
            m |= Assignment{1} << i;
        }
    }
    return m;
}

} // namespace

ProjTable build_proj_table(const NiceTreeDecomposition& ntd, std::size_t node, const dp::TableStore<Integer>& purged,
                           std::span<const ProjTable* const> children, const std::vector<bool>& in_projection) {
    const auto& nd    = ntd.node(node);
    const auto& table = purged.tables.at(node);
    ProjTable   out;
    if (children.size() != nd.num_children()) {
        throw InternalError("wrong number of child projection tables");
    }

    if (nd.type == NodeType::Leaf) {
        if (!table.empty()) {
            add_entry(out, {0}, 1);
        }
        return out;
    }

    if (nd.type == NodeType::Join) {
        const auto child_rows = purged.tables.at(static_cast<std::size_t>(nd.children[0])).size();
        // For each left row: (right row, parent row) of every derivation.
        std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> pairs(child_rows);
        for (std::uint32_t u = 0; u < table.size(); ++u) {
            for (const auto& d : table.rows[u].origins) {
                pairs.at(d.rows[0]).emplace_back(d.rows[1], u);
            }
        }
        const auto& left_rows  = purged.tables.at(static_cast<std::size_t>(nd.children[0])).rows;
        const auto& right_rows = purged.tables.at(static_cast<std::size_t>(nd.children[1])).rows;
        const auto  pmask      = projection_mask(nd.bag, in_projection);
        std::map<Assignment, std::vector<const std::pair<const ProjTable::Key, Integer>*>> right_by_bucket;
        for (const auto& e : children[1]->entries) {
            right_by_bucket[right_rows.at(e.first.front()).assignment & pmask].push_back(&e);
        }
        for (const auto& [k1, c1] : children[0]->entries) {
            auto bucket = right_by_bucket.find(left_rows.at(k1.front()).assignment & pmask);
            if (bucket == right_by_bucket.end()) {
                continue;
            }
            for (const auto* e2 : bucket->second) {
                const auto&     k2 = e2->first;
                ProjTable::Key key;
                for (auto i : k1) {
                    for (auto [j, u] : pairs[i]) {
                        if (std::binary_search(k2.begin(), k2.end(), j)) {
                            key.push_back(u);
                        }
                    }
                }
                add_entry(out, std::move(key), c1 * e2->second);
            }
        }
        return out;
    }

    // Introduce and Forget: every row has derivations from the single child.
    const auto child_rows = purged.tables.at(static_cast<std::size_t>(nd.children[0])).size();
    std::vector<std::vector<std::uint32_t>> parents(child_rows);
    for (std::uint32_t u = 0; u < table.size(); ++u) {
        for (const auto& d : table.rows[u].origins) {
            parents.at(d.rows[0]).push_back(u);
        }
    }
    const bool split = nd.type == NodeType::Introduce && in_projection.at(nd.vertex);
    const auto p     = split ? dp::bag_position(nd.bag, nd.vertex) : 0;
    for (const auto& [k, c] : children[0]->entries) {
        ProjTable::Key key[2];
        for (auto j : k) {
            for (auto u : parents[j]) {
                key[split && dp::test_bit(table.rows[u].assignment, p)].push_back(u);
            }
        }
        add_entry(out, std::move(key[0]), c);
        add_entry(out, std::move(key[1]), c);
    }
    return out;
}

ProjectionPass projection_pass(const NiceTreeDecomposition& ntd, const dp::TableStore<Integer>& purged,
                               const std::vector<bool>& in_projection) {
    ProjectionPass         pass;
    std::vector<ProjTable> tables(ntd.size());
    for (std::size_t id = 0; id < ntd.size(); ++id) {
        const auto&             nd = ntd.node(id);
        std::vector<const ProjTable*> kids;
        for (std::size_t k = 0; k < nd.num_children(); ++k) {
            kids.push_back(&tables[static_cast<std::size_t>(nd.children[k])]);
        }
        tables[id] = build_proj_table(ntd, id, purged, kids, in_projection);
        pass.keys_per_node.push_back(tables[id].size());
        pass.rows_per_node.push_back(purged.tables[id].size());
        for (std::size_t k = 0; k < nd.num_children(); ++k) {
            tables[static_cast<std::size_t>(nd.children[k])].entries.clear();
        }
    }
    const auto roots = dp::solution_rows(purged.root(), dp::Mode::Counting);
    pass.count       = tables.back().union_count(roots);
    if (pass.count < 0 || pass.count != tables.back().total()) {
        throw InternalError("projected count at the root is inconsistent");
    }
    return pass;
}

ProjectionPass projected_count_pass(const AspSolver& solver, std::span<const AtomId> projection) {
    std::vector<bool> mask(solver.program().num_atoms(), false);
    for (auto a : projection) {
        if (a >= mask.size()) {
            throw ProjectionOutOfRange("projection atom " + std::to_string(a) + " out of range");
        }
        mask[a] = true;
    }
    const auto& ntd    = solver.decomposition();
    const auto  purged = dp::purge(ntd, solver.solve_pass(dp::Mode::Counting), dp::Mode::Counting);
    return projection_pass(ntd, purged, mask);
}

Integer projected_count(const GroundProgram& program, std::span<const AtomId> projection, const SolveOptions& options) {
    for (auto a : projection) {
        if (a >= program.num_atoms()) {
            throw ProjectionOutOfRange("projection atom " + std::to_string(a) + " out of range");
        }
    }
    return projected_count_pass(AspSolver(program, options), projection).count;
}

ProjectionPass projected_count_pass(const SatCounter& counter, std::span<const int> projection) {
    std::vector<bool> mask(counter.formula().num_vars, false);
    for (auto v : projection) {
        if (v < 1 || static_cast<std::size_t>(v) > mask.size()) {
            throw ProjectionOutOfRange("projection variable " + std::to_string(v) + " out of range");
        }
        mask[static_cast<std::size_t>(v - 1)] = true;
    }
    const auto& ntd    = counter.decomposition();
    const auto  purged = dp::purge(ntd, counter.count_pass(), dp::Mode::Counting);
    return projection_pass(ntd, purged, mask);
}

Integer projected_count(const CnfFormula& formula, std::span<const int> projection, const SolveOptions& options) {
    for (auto v : projection) {
        if (v < 1 || static_cast<std::size_t>(v) > formula.num_vars) {
            throw ProjectionOutOfRange("projection variable " + std::to_string(v) + " out of range");
        }
    }
    return projected_count_pass(SatCounter(formula, options), projection).count;
}

std::vector<AtomId> resolve_projection(const GroundProgram& program, std::span<const std::string> names) {
    std::vector<AtomId> out;
    for (const auto& n : names) {
        auto id = program.find(n);
        if (!id) {
            throw ProjectionOutOfRange("unknown projection atom '" + n + "'");
        }
        out.push_back(*id);
    }
    return out;
}

} // namespace tdcount
