#include "tdcount/sat_dp.hpp"

#include "tdcount/graph.hpp"

#include <cstdlib>
#include <unordered_map>

namespace tdcount {

using dp::Assignment;
using dp::Derivation;

SatCounter::SatCounter(CnfFormula formula, SolveOptions options)
    : formula_(std::move(formula))
    , options_(std::move(options)) {
    const auto graph = primal_graph_cnf(formula_);
    auto       d     = decompose(graph, options_.decomposition);
    width_           = d.width;
    seed_            = d.seed;
    ntd_             = make_nice(d.td);
    std::vector<std::vector<Vertex>> scopes;
    for (std::size_t i = 0; i < formula_.clauses.size(); ++i) {
        const auto& c = formula_.clauses[i];
        if (c.empty()) {
            continue;
        }
        std::vector<Vertex> vars;
        for (auto lit : c) {
            vars.push_back(static_cast<Vertex>(std::abs(lit) - 1));
        }
        std::sort(vars.begin(), vars.end());
        vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
        scopes.push_back(std::move(vars));
        nonempty_.push_back(i);
    }
    plan_ = dp::plan_checks(ntd_, scopes);
}

template <class Count>
dp::TableStore<Count> SatCounter::run(bool weighted) const {
    using Builder = dp::TableBuilder<Count>;
    using Table   = dp::Table<Count>;
    struct ClauseMask {
        Assignment pos = 0;
        Assignment neg = 0;
    };

    dp::Handlers<Count> h;
    h.leaf      = [](std::size_t, const NiceNode&, Builder& out) { out.add(0, {}, Count(1), 0, Derivation{}); };
    h.introduce = [](std::size_t, const NiceNode& nd, const Table& child, Builder& out) {
        const auto p = dp::bag_position(nd.bag, nd.vertex);
        for (std::uint32_t j = 0; j < child.rows.size(); ++j) {
            const auto& row = child.rows[j];
            out.add(dp::insert_bit(row.assignment, p, false), {}, row.count, 0, Derivation{{j, dp::no_row}});
            out.add(dp::insert_bit(row.assignment, p, true), {}, row.count, 0, Derivation{{j, dp::no_row}});
        }
    };
    h.forget = [&](std::size_t id, const NiceNode& nd, const Table& child, Builder& out) {
        std::vector<ClauseMask> masks;
        for (auto c : plan_.checks_at(id)) {
            ClauseMask m;
            for (auto lit : formula_.clauses[nonempty_[c]]) {
                const auto bit = Assignment{1} << dp::bag_position(child.bag, static_cast<Vertex>(std::abs(lit) - 1));
                (lit > 0 ? m.pos : m.neg) |= bit;
            }
            masks.push_back(m);
        }
        const auto p   = dp::bag_position(child.bag, nd.vertex);
        const int  var = static_cast<int>(nd.vertex) + 1;
        Count      w_true(1), w_false(1);
        if (weighted) {
            w_true  = Count(formula_.weight(var));
            w_false = Count(formula_.weight(-var));
        }
        for (std::uint32_t j = 0; j < child.rows.size(); ++j) {
            const auto& row = child.rows[j];
            const auto  a   = row.assignment;
            const bool  sat = std::all_of(masks.begin(), masks.end(),
                                          [a](const ClauseMask& m) { return (a & m.pos) != 0 || (~a & m.neg) != 0; });
            if (!sat) {
                continue;
            }
            Count c = row.count;
            if (weighted) {
                c *= dp::test_bit(a, p) ? w_true : w_false;
                if (c == 0) {
                    continue;
                }
            }
            out.add(dp::erase_bit(a, p), {}, std::move(c), 0, Derivation{{j, dp::no_row}});
        }
    };
    h.join = [](std::size_t, const NiceNode&, const Table& l, const Table& r, Builder& out) {
        if (l.bag != r.bag) {
            throw BagMismatch("join of tables over different bags");
        }
        std::unordered_map<Assignment, std::uint32_t> by_assignment;
        for (std::uint32_t j = 0; j < r.rows.size(); ++j) {
            by_assignment.emplace(r.rows[j].assignment, j);
        }
        for (std::uint32_t i = 0; i < l.rows.size(); ++i) {
            auto it = by_assignment.find(l.rows[i].assignment);
            if (it != by_assignment.end()) {
                out.add(l.rows[i].assignment, {}, l.rows[i].count * r.rows[it->second].count, 0,
                        Derivation{{i, it->second}});
            }
        }
    };
    auto store = dp::traverse(ntd_, h, options_.trace);
    if (formula_.has_empty_clause()) {
        for (auto& t : store.tables) {
            t.rows.clear();
        }
    }
    return store;
}

dp::TableStore<Integer> SatCounter::count_pass() const { return run<Integer>(false); }

dp::TableStore<Rational> SatCounter::weighted_pass() const { return run<Rational>(true); }

Integer SatCounter::count() const { return dp::root_aggregate(count_pass(), dp::Mode::Counting).count; }

Rational SatCounter::weighted_count() const { return dp::root_aggregate(weighted_pass(), dp::Mode::Counting).count; }

Integer count_models(const CnfFormula& formula, const SolveOptions& options) {
    return SatCounter(formula, options).count();
}

Rational weighted_count(const CnfFormula& formula, const SolveOptions& options) {
    return SatCounter(formula, options).weighted_count();
}

} // namespace tdcount
