#pragma once

#include "tdcount/errors.hpp"
#include "tdcount/numeric.hpp"
#include "tdcount/treedecomp.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace tdcount::dp {

//! Truth values of the bag vertices; bit i belongs to the i-th vertex of the sorted bag.
using Assignment = std::uint64_t;

inline constexpr std::size_t max_bag_size = 62;

//! Counter-witness state encoded as (sub-assignment << 1) | strict.
using Witness    = std::uint64_t;
//! Sorted and duplicate free; SAT tables leave it empty.
using WitnessSet = std::vector<Witness>;

constexpr Witness    make_witness(Assignment sub, bool strict) { return (sub << 1) | static_cast<Witness>(strict); }
constexpr Assignment witness_assignment(Witness w) { return w >> 1; }
constexpr bool       witness_strict(Witness w) { return (w & 1U) != 0; }

constexpr bool test_bit(Assignment a, std::size_t pos) { return ((a >> pos) & 1U) != 0; }

//! Inserts `value` at bit position `pos`, shifting higher bits up.
constexpr Assignment insert_bit(Assignment a, std::size_t pos, bool value) {
    const Assignment low = a & ((Assignment{1} << pos) - 1);
    return low | (static_cast<Assignment>(value) << pos) | ((a >> pos) << (pos + 1));
}

//! Removes bit position `pos`, shifting higher bits down.
constexpr Assignment erase_bit(Assignment a, std::size_t pos) {
    const Assignment low = a & ((Assignment{1} << pos) - 1);
    return low | ((a >> (pos + 1)) << pos);
}

inline void canonicalize(WitnessSet& w) {
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
}

inline bool has_strict_witness(const WitnessSet& w) {
    return std::any_of(w.begin(), w.end(), [](Witness x) { return witness_strict(x); });
}

//! Position of `v` in the sorted bag.
inline std::size_t bag_position(std::span<const Vertex> bag, Vertex v) {
    auto it = std::lower_bound(bag.begin(), bag.end(), v);
    if (it == bag.end() || *it != v) {
        throw InternalError("vertex " + std::to_string(v) + " not in bag");
    }
    return static_cast<std::size_t>(it - bag.begin());
}

inline constexpr std::uint32_t no_row = std::numeric_limits<std::uint32_t>::max();

//! Child rows one row was derived from: one entry per child, unused slots hold no_row.
struct Derivation {
    std::array<std::uint32_t, 2> rows{no_row, no_row};
    friend bool operator==(const Derivation&, const Derivation&) = default;
};

enum class Mode { Decision, Counting, Optimization };

template <class Count>
struct Row {
    Assignment              assignment = 0;
    WitnessSet              witnesses;
    Count                   count{};
    Integer                 cost{};
    std::vector<Derivation> origins;
};

template <class Count>
struct Table {
    std::vector<Vertex>     bag;
    std::vector<Row<Count>> rows;

    [[nodiscard]] std::size_t size() const noexcept { return rows.size(); }
    [[nodiscard]] bool        empty() const noexcept { return rows.empty(); }
    [[nodiscard]] std::size_t max_witnesses() const {
        std::size_t m = 0;
        for (const auto& r : rows) {
            m = std::max(m, r.witnesses.size());
        }
        return m;
    }
};

//! Collects rows for one table, merging rows with equal (assignment, witnesses, cost):
//! counts are summed and origins concatenated.
template <class Count>
class TableBuilder {
public:
    explicit TableBuilder(std::vector<Vertex> bag) {
        if (bag.size() > max_bag_size) {
            throw TooLarge("bag of " + std::to_string(bag.size()) + " vertices exceeds the supported maximum of " +
                           std::to_string(max_bag_size));
        }
        table_.bag = std::move(bag);
    }

    [[nodiscard]] const std::vector<Vertex>& bag() const noexcept { return table_.bag; }

    void add(Assignment a, WitnessSet w, Count count, Integer cost, Derivation origin) {
        const auto h  = hash(a, w, cost);
        auto&      ix = index_[h];
        for (auto i : ix) {
            auto& r = table_.rows[i];
            if (r.assignment == a && r.cost == cost && r.witnesses == w) {
                r.count += count;
                r.origins.push_back(origin);
                return;
            }
        }
        ix.push_back(table_.rows.size());
        table_.rows.push_back(Row<Count>{a, std::move(w), std::move(count), std::move(cost), {origin}});
    }

    Table<Count> finish() && { return std::move(table_); }

private:
    static std::size_t hash(Assignment a, const WitnessSet& w, const Integer& cost) {
        std::size_t h = std::hash<Assignment>{}(a);
        auto        mix = [&h](std::uint64_t x) { h ^= std::hash<std::uint64_t>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
        for (auto x : w) {
            mix(x);
        }
        mix(static_cast<std::uint64_t>(cost & Integer(std::numeric_limits<std::uint64_t>::max())));
        return h;
    }

    Table<Count>                                              table_;
    std::unordered_map<std::size_t, std::vector<std::size_t>> index_;
};

//! Tables of one completed pass, indexed by nice-TD node id.
template <class Count>
struct TableStore {
    std::vector<Table<Count>> tables;

    [[nodiscard]] const Table<Count>& root() const { return tables.back(); }
    [[nodiscard]] std::size_t         total_rows() const {
        std::size_t n = 0;
        for (const auto& t : tables) {
            n += t.size();
        }
        return n;
    }
};

template <class Count>
struct Handlers {
    std::function<void(std::size_t node, const NiceNode&, TableBuilder<Count>&)>                      leaf;
    std::function<void(std::size_t node, const NiceNode&, const Table<Count>&, TableBuilder<Count>&)> introduce;
    std::function<void(std::size_t node, const NiceNode&, const Table<Count>&, TableBuilder<Count>&)> forget;
    std::function<void(std::size_t node, const NiceNode&, const Table<Count>&, const Table<Count>&, TableBuilder<Count>&)>
        join;
};

struct TraceRecord {
    std::size_t         node = 0;
    NodeType            type = NodeType::Leaf;
    std::vector<Vertex> bag;
    std::size_t         rows          = 0;
    std::size_t         max_witnesses = 0;
};

using TraceSink = std::function<void(const TraceRecord&)>;

//! One line of line-delimited JSON for a trace record.
std::string to_json_line(const TraceRecord& record);

//! Computes every node's table after its children's tables (the nodes are stored in post-order).
template <class Count>
TableStore<Count> traverse(const NiceTreeDecomposition& ntd, const Handlers<Count>& handlers, const TraceSink& trace = {}) {
    TableStore<Count> store;
    store.tables.reserve(ntd.size());
    for (std::size_t id = 0; id < ntd.size(); ++id) {
        const auto&         nd = ntd.node(id);
        TableBuilder<Count> out(nd.bag);
        try {
            auto child = [&](std::size_t k) -> const Table<Count>& {
                return store.tables.at(static_cast<std::size_t>(nd.children[k]));
            };
            switch (nd.type) {
                case NodeType::Leaf     : handlers.leaf(id, nd, out); break;
                case NodeType::Introduce: handlers.introduce(id, nd, child(0), out); break;
                case NodeType::Forget   : handlers.forget(id, nd, child(0), out); break;
                case NodeType::Join     : handlers.join(id, nd, child(0), child(1), out); break;
            }
        }
        catch (const HandlerFailure&) {
            throw;
        }
        catch (const TooLarge&) {
            throw;
        }
        catch (const std::exception& e) {
            throw HandlerFailure(id, e.what());
        }
        store.tables.push_back(std::move(out).finish());
        if (trace) {
            const auto& t = store.tables.back();
            trace(TraceRecord{id, nd.type, nd.bag, t.size(), t.max_witnesses()});
        }
    }
    return store;
}

//! Rows of a root table that encode solutions: no strict counter-witness and, in optimization
//! mode, minimum cost among those.
template <class Count>
std::vector<std::uint32_t> solution_rows(const Table<Count>& root, Mode mode) {
    std::vector<std::uint32_t> out;
    std::optional<Integer>     best;
    for (std::uint32_t i = 0; i < root.rows.size(); ++i) {
        const auto& r = root.rows[i];
        if (has_strict_witness(r.witnesses)) {
            continue;
        }
        if (mode == Mode::Optimization) {
            if (best && r.cost > *best) {
                continue;
            }
            if (!best || r.cost < *best) {
                best = r.cost;
                out.clear();
            }
        }
        out.push_back(i);
    }
    return out;
}

template <class Count>
struct Aggregate {
    bool                   consistent = false;
    Count                  count{};
    std::optional<Integer> cost; //!< optimization mode only, absent when inconsistent
    friend bool            operator==(const Aggregate&, const Aggregate&) = default;
};

template <class Count>
Aggregate<Count> root_aggregate(const TableStore<Count>& store, Mode mode) {
    Aggregate<Count> agg;
    const auto&      root = store.root();
    if (!root.bag.empty()) {
        throw InternalError("root bag is not empty");
    }
    for (auto i : solution_rows(root, mode)) {
        agg.consistent = true;
        agg.count += root.rows[i].count;
        if (mode == Mode::Optimization) {
            agg.cost = root.rows[i].cost;
        }
    }
    return agg;
}

//! Marks every row reachable top-down along origins from the root solution rows.
template <class Count>
std::vector<std::vector<bool>> mark_reachable(const NiceTreeDecomposition& ntd, const TableStore<Count>& store,
                                              Mode mode) {
    std::vector<std::vector<bool>> marked(store.tables.size());
    for (std::size_t i = 0; i < store.tables.size(); ++i) {
        marked[i].assign(store.tables[i].size(), false);
    }
    for (auto r : solution_rows(store.root(), mode)) {
        marked.back()[r] = true;
    }
    for (std::size_t id = store.tables.size(); id-- > 0;) {
        const auto& nd = ntd.node(id);
        for (std::size_t r = 0; r < store.tables[id].size(); ++r) {
            if (!marked[id][r]) {
                continue;
            }
            for (const auto& d : store.tables[id].rows[r].origins) {
                for (std::size_t k = 0; k < nd.num_children(); ++k) {
                    marked[static_cast<std::size_t>(nd.children[k])][d.rows[k]] = true;
                }
            }
        }
    }
    return marked;
}

//! Deletes every row that does not extend to a root solution row and renumbers origins.
template <class Count>
TableStore<Count> purge(const NiceTreeDecomposition& ntd, const TableStore<Count>& store, Mode mode) {
    const auto                              marked = mark_reachable(ntd, store, mode);
    std::vector<std::vector<std::uint32_t>> renumber(store.tables.size());
    TableStore<Count>                       out;
    out.tables.resize(store.tables.size());
    for (std::size_t id = 0; id < store.tables.size(); ++id) {
        const auto& nd  = ntd.node(id);
        const auto& src = store.tables[id];
        auto&       dst = out.tables[id];
        dst.bag         = src.bag;
        renumber[id].assign(src.size(), no_row);
        for (std::size_t r = 0; r < src.size(); ++r) {
            if (!marked[id][r]) {
                continue;
            }
            renumber[id][r] = static_cast<std::uint32_t>(dst.rows.size());
            auto row        = src.rows[r];
            for (auto& d : row.origins) {
                for (std::size_t k = 0; k < nd.num_children(); ++k) {
                    d.rows[k] = renumber[static_cast<std::size_t>(nd.children[k])][d.rows[k]];
                }
            }
            dst.rows.push_back(std::move(row));
        }
    }
    return out;
}

//! Nodes at which each scope (set of vertices that must be checked together) is evaluated:
//! the Forget node, lowest in post-order, among the forget nodes of its vertices.
struct CheckPlan {
    std::vector<std::vector<std::size_t>> at; //!< per node, indices into the scope list

    [[nodiscard]] std::span<const std::size_t> checks_at(std::size_t node) const { return at.at(node); }
};

//! Throws InternalError for an empty scope or one whose vertices never share the child bag.
CheckPlan plan_checks(const NiceTreeDecomposition& ntd, std::span<const std::vector<Vertex>> scopes);

//! Bit mask of `vertices` relative to the sorted `bag`.
Assignment mask_of(std::span<const Vertex> bag, std::span<const Vertex> vertices);

} // namespace tdcount::dp
