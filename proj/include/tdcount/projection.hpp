#pragma once

#include "tdcount/asp_dp.hpp"
#include "tdcount/dp_core.hpp"
#include "tdcount/program.hpp"
#include "tdcount/sat_dp.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace tdcount {

//! Projected-counting table of one node, built on top of the purged table of that node.
//!
//! Every partial solution below the node maps to exactly one purged row, so each projection
//! (restriction to the projection atoms seen so far) is supported by a set of rows. An entry
//! maps such a row set to the number of projections supported by exactly that set. All rows of
//! a key agree on the projection atoms of the bag.
struct ProjTable {
    using Key = std::vector<std::uint32_t>; //!< sorted purged-row indices

    std::map<Key, Integer> entries;

    [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }
    //! Projections supported by every row of `rows`.
    [[nodiscard]] Integer intersection_count(std::span<const std::uint32_t> rows) const;
    //! Projections supported by some row of `rows`, by inclusion-exclusion over intersection counts.
    //! Throws TooLarge for more than 24 rows.
    [[nodiscard]] Integer union_count(std::span<const std::uint32_t> rows) const;
    //! Sum of all entries: projections supported by any row.
    [[nodiscard]] Integer total() const;
};

//! `in_projection[v]` marks the projected vertices; `children` are the ProjTables of the node's children.
ProjTable build_proj_table(const NiceTreeDecomposition& ntd, std::size_t node, const dp::TableStore<Integer>& purged,
                           std::span<const ProjTable* const> children, const std::vector<bool>& in_projection);

struct ProjectionPass {
    Integer                  count;
    std::vector<std::size_t> keys_per_node;
    std::vector<std::size_t> rows_per_node;
};

//! Bottom-up pass over a purged counting store; the result is the union count of the root solution rows.
ProjectionPass projection_pass(const NiceTreeDecomposition& ntd, const dp::TableStore<Integer>& purged,
                               const std::vector<bool>& in_projection);

//! |{ M ∩ P : M answer set }|.
Integer projected_count(const GroundProgram& program, std::span<const AtomId> projection, const SolveOptions& options = {});
ProjectionPass projected_count_pass(const AspSolver& solver, std::span<const AtomId> projection);

//! |{ M ∩ P : M model }| for 1-based variable indices.
Integer projected_count(const CnfFormula& formula, std::span<const int> projection, const SolveOptions& options = {});
ProjectionPass projected_count_pass(const SatCounter& counter, std::span<const int> projection);

//! Resolves atom names; throws ProjectionOutOfRange for unknown names.
std::vector<AtomId> resolve_projection(const GroundProgram& program, std::span<const std::string> names);

} // namespace tdcount
