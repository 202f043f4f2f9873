#include "tdcount/asp_dp.hpp"

#include "tdcount/graph.hpp"

#include <algorithm>
#include <unordered_map>

namespace tdcount {

using dp::Assignment;
using dp::Derivation;
using dp::WitnessSet;
using Builder = dp::TableBuilder<Integer>;

CostModel::CostModel(const MinimizeStatement& minimize, std::size_t num_atoms)
    : true_weight_(num_atoms)
    , false_weight_(num_atoms) {
    for (const auto& [lit, w] : minimize.weights) {
        (lit.positive ? true_weight_ : false_weight_).at(lit.atom) += w;
    }
}

Integer CostModel::weight(AtomId atom, bool value) const {
    if (empty()) {
        return 0;
    }
    return value ? true_weight_.at(atom) : false_weight_.at(atom);
}

Integer CostModel::bag_cost(std::span<const Vertex> bag, Assignment assignment) const {
    Integer sum = 0;
    if (empty()) {
        return sum;
    }
    for (std::size_t i = 0; i < bag.size(); ++i) {
        if (dp::test_bit(assignment, i)) {
            sum += true_weight_.at(bag[i]);
        }
    }
    return sum;
}

RuleCheckPlan plan_rule_checks(const GroundProgram& program, const NiceTreeDecomposition& ntd) {
    std::vector<std::vector<Vertex>> scopes;
    scopes.reserve(program.rules().size());
    for (const auto& r : program.rules()) {
        scopes.push_back(r.atoms());
    }
    return dp::plan_checks(ntd, scopes);
}

namespace {

struct RuleMask {
    Assignment head = 0;
    Assignment pos  = 0;
    Assignment neg  = 0;
};

RuleMask mask_rule(std::span<const Vertex> bag, const Rule& r) {
    return RuleMask{dp::mask_of(bag, r.head), dp::mask_of(bag, r.body_pos), dp::mask_of(bag, r.body_neg)};
}

// Classical satisfaction of the rule by the candidate.
bool violates(const RuleMask& m, Assignment a) {
    return (a & m.pos) == m.pos && (a & m.neg) == 0 && (a & m.head) == 0;
}

// Satisfaction of the rule's reduct (w.r.t. candidate a) by the witness b.
bool violates_reduct(const RuleMask& m, Assignment a, Assignment b) {
    return (a & m.neg) == 0 && (b & m.pos) == m.pos && (b & m.head) == 0;
}

void leaf_into(Builder& out) { out.add(0, {dp::make_witness(0, false)}, 1, 0, Derivation{}); }

void introduce_into(const AspTable& child, AtomId atom, const CostModel& costs, Builder& out) {
    const auto    p      = dp::bag_position(out.bag(), atom);
    const Integer charge = costs.weight(atom, true);
    for (std::uint32_t j = 0; j < child.rows.size(); ++j) {
        const auto& row = child.rows[j];
        // Inserting a zero bit is monotone, so the witness set stays canonical.
        WitnessSet w0;
        w0.reserve(row.witnesses.size());
        WitnessSet w1;
        w1.reserve(2 * row.witnesses.size());
        for (auto x : row.witnesses) {
            auto b = dp::witness_assignment(x);
            w0.push_back(dp::make_witness(dp::insert_bit(b, p, false), dp::witness_strict(x)));
            w1.push_back(dp::make_witness(dp::insert_bit(b, p, true), dp::witness_strict(x)));
            w1.push_back(dp::make_witness(dp::insert_bit(b, p, false), true));
        }
        dp::canonicalize(w1);
        out.add(dp::insert_bit(row.assignment, p, false), std::move(w0), row.count, row.cost, Derivation{{j, dp::no_row}});
        out.add(dp::insert_bit(row.assignment, p, true), std::move(w1), row.count, row.cost + charge,
                Derivation{{j, dp::no_row}});
    }
}

void forget_into(const AspTable& child, AtomId atom, std::span<const RuleMask> due, const CostModel& costs,
                 Builder& out) {
    const auto    p      = dp::bag_position(child.bag, atom);
    const Integer charge = costs.weight(atom, false);
    for (std::uint32_t j = 0; j < child.rows.size(); ++j) {
        const auto& row = child.rows[j];
        const auto  a   = row.assignment;
        if (std::any_of(due.begin(), due.end(), [a](const RuleMask& m) { return violates(m, a); })) {
            continue;
        }
        WitnessSet w;
        w.reserve(row.witnesses.size());
        bool self = false;
        for (auto x : row.witnesses) {
            const auto b = dp::witness_assignment(x);
            if (std::any_of(due.begin(), due.end(), [a, b](const RuleMask& m) { return violates_reduct(m, a, b); })) {
                continue;
            }
            self = self || x == dp::make_witness(a, false);
            w.push_back(dp::make_witness(dp::erase_bit(b, p), dp::witness_strict(x)));
        }
        if (!self) {
            throw InternalError("self witness lost at forget of atom " + std::to_string(atom));
        }
        dp::canonicalize(w);
        auto cost = dp::test_bit(a, p) ? row.cost : row.cost + charge;
        out.add(dp::erase_bit(a, p), std::move(w), row.count, std::move(cost), Derivation{{j, dp::no_row}});
    }
}

// Pairs witnesses of both sides on equal sub-assignments; strictness is or-ed.
WitnessSet combine(const WitnessSet& l, const WitnessSet& r) {
    WitnessSet  out;
    std::size_t i = 0, j = 0;
    while (i < l.size() && j < r.size()) {
        auto bl = dp::witness_assignment(l[i]);
        auto br = dp::witness_assignment(r[j]);
        if (bl < br) {
            ++i;
            continue;
        }
        if (br < bl) {
            ++j;
            continue;
        }
        auto ie = i, je = j;
        while (ie < l.size() && dp::witness_assignment(l[ie]) == bl) {
            ++ie;
        }
        while (je < r.size() && dp::witness_assignment(r[je]) == bl) {
            ++je;
        }
        bool strict[2] = {false, false};
        for (auto x = i; x < ie; ++x) {
            for (auto y = j; y < je; ++y) {
                strict[dp::witness_strict(l[x]) || dp::witness_strict(r[y])] = true;
            }
        }
        for (bool s : {false, true}) {
            if (strict[s]) {
                out.push_back(dp::make_witness(bl, s));
            }
        }
        i = ie;
        j = je;
    }
    return out;
}

void join_into(const AspTable& left, const AspTable& right, const CostModel& costs, Builder& out) {
    if (left.bag != right.bag) {
        throw BagMismatch("join of tables over different bags");
    }
    std::unordered_map<Assignment, std::vector<std::uint32_t>> by_assignment;
    for (std::uint32_t j = 0; j < right.rows.size(); ++j) {
        by_assignment[right.rows[j].assignment].push_back(j);
    }
    for (std::uint32_t i = 0; i < left.rows.size(); ++i) {
        const auto& l  = left.rows[i];
        auto        it = by_assignment.find(l.assignment);
        if (it == by_assignment.end()) {
            continue;
        }
        const auto shared = costs.bag_cost(left.bag, l.assignment);
        for (auto j : it->second) {
            const auto& r = right.rows[j];
            out.add(l.assignment, combine(l.witnesses, r.witnesses), l.count * r.count, l.cost + r.cost - shared,
                    Derivation{{i, j}});
        }
    }
}

std::vector<Vertex> with_vertex(std::vector<Vertex> bag, Vertex v) {
    bag.insert(std::lower_bound(bag.begin(), bag.end(), v), v);
    return bag;
}

std::vector<Vertex> without_vertex(std::vector<Vertex> bag, Vertex v) {
    bag.erase(bag.begin() + static_cast<std::ptrdiff_t>(dp::bag_position(bag, v)));
    return bag;
}

} // namespace

AspTable asp_leaf_table() {
    Builder out({});
    leaf_into(out);
    return std::move(out).finish();
}

AspTable introduce_atom(const AspTable& child, AtomId atom, const CostModel& costs) {
    Builder out(with_vertex(child.bag, atom));
    introduce_into(child, atom, costs, out);
    return std::move(out).finish();
}

AspTable forget_atom(const AspTable& child, AtomId atom, std::span<const Rule> due_rules, const CostModel& costs) {
    std::vector<RuleMask> masks;
    for (const auto& r : due_rules) {
        masks.push_back(mask_rule(child.bag, r));
    }
    Builder out(without_vertex(child.bag, atom));
    forget_into(child, atom, masks, costs, out);
    return std::move(out).finish();
}

AspTable join_tables(const AspTable& left, const AspTable& right, const CostModel& costs) {
    Builder out(left.bag);
    join_into(left, right, costs, out);
    return std::move(out).finish();
}

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

namespace {

GroundProgram without_empty_rules(const GroundProgram& program) {
    ProgramBuilder b;
    for (const auto& a : program.atoms()) {
        auto id = b.add_anonymous_atom();
        if (a.name) {
            b.set_name(id, *a.name);
        }
    }
    for (const auto& r : program.rules()) {
        if (!r.empty()) {
            b.add_rule(r);
        }
    }
    return std::move(b).build();
}

} // namespace

AspSolver::AspSolver(GroundProgram program, SolveOptions options)
    : program_(std::move(program))
    , options_(std::move(options)) {
    const auto graph = primal_graph(program_);
    auto       d     = decompose(graph, options_.decomposition);
    width_           = d.width;
    seed_            = d.seed;
    ntd_             = make_nice(d.td);
    plan_            = plan_rule_checks(program_.has_empty_rule() ? without_empty_rules(program_) : program_, ntd_);
}

AspStore AspSolver::solve_pass(dp::Mode mode) const {
    const CostModel costs = mode == dp::Mode::Optimization && program_.minimize()
                                ? CostModel(*program_.minimize(), program_.num_atoms())
                                : CostModel();
    std::vector<const Rule*> nonempty;
    for (const auto& r : program_.rules()) {
        if (!r.empty()) {
            nonempty.push_back(&r);
        }
    }

    dp::Handlers<Integer> h;
    h.leaf      = [](std::size_t, const NiceNode&, Builder& out) { leaf_into(out); };
    h.introduce = [&](std::size_t, const NiceNode& nd, const AspTable& child, Builder& out) {
        introduce_into(child, nd.vertex, costs, out);
    };
    h.forget = [&](std::size_t id, const NiceNode& nd, const AspTable& child, Builder& out) {
        std::vector<RuleMask> masks;
        for (auto r : plan_.checks_at(id)) {
            masks.push_back(mask_rule(child.bag, *nonempty[r]));
        }
        forget_into(child, nd.vertex, masks, costs, out);
    };
    h.join = [&](std::size_t, const NiceNode&, const AspTable& l, const AspTable& r, Builder& out) {
        join_into(l, r, costs, out);
    };
    auto store = dp::traverse(ntd_, h, options_.trace);
    if (program_.has_empty_rule()) {
        for (auto& t : store.tables) {
            t.rows.clear();
        }
    }
    return store;
}

bool AspSolver::consistent() const { return dp::root_aggregate(solve_pass(dp::Mode::Decision), dp::Mode::Decision).consistent; }

Integer AspSolver::count() const { return dp::root_aggregate(solve_pass(dp::Mode::Counting), dp::Mode::Counting).count; }

OptimalCount AspSolver::count_optimal() const {
    auto agg = dp::root_aggregate(solve_pass(dp::Mode::Optimization), dp::Mode::Optimization);
    return OptimalCount{agg.cost, agg.count};
}

std::vector<AnswerSet> AspSolver::enumerate(std::optional<std::size_t> limit) const {
    const auto store = dp::purge(ntd_, solve_pass(dp::Mode::Counting), dp::Mode::Counting);
    // Per row: the true atoms among those forgotten below the node, one entry per derivation tree.
    std::vector<std::vector<std::vector<AnswerSet>>> partial(ntd_.size());
    for (std::size_t id = 0; id < ntd_.size(); ++id) {
        const auto& nd    = ntd_.node(id);
        const auto& table = store.tables[id];
        auto&       mine  = partial[id];
        mine.resize(table.size());
        for (std::size_t r = 0; r < table.size(); ++r) {
            for (const auto& d : table.rows[r].origins) {
                switch (nd.type) {
                    case NodeType::Leaf: mine[r].emplace_back(); break;
                    case NodeType::Introduce: {
                        const auto& src = partial[static_cast<std::size_t>(nd.children[0])][d.rows[0]];
                        mine[r].insert(mine[r].end(), src.begin(), src.end());
                        break;
                    }
                    case NodeType::Forget: {
                        const auto  c     = static_cast<std::size_t>(nd.children[0]);
                        const bool  truth = dp::test_bit(store.tables[c].rows[d.rows[0]].assignment,
                                                         dp::bag_position(ntd_.node(c).bag, nd.vertex));
                        for (auto s : partial[c][d.rows[0]]) {
                            if (truth) {
                                s.insert(std::lower_bound(s.begin(), s.end(), nd.vertex), nd.vertex);
                            }
                            mine[r].push_back(std::move(s));
                        }
                        break;
                    }
                    case NodeType::Join: {
                        const auto& ls = partial[static_cast<std::size_t>(nd.children[0])][d.rows[0]];
                        const auto& rs = partial[static_cast<std::size_t>(nd.children[1])][d.rows[1]];
                        for (const auto& x : ls) {
                            for (const auto& y : rs) {
                                AnswerSet u;
                                std::merge(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(u));
                                mine[r].push_back(std::move(u));
                            }
                        }
                        break;
                    }
                }
            }
        }
        for (std::size_t k = 0; k < nd.num_children(); ++k) {
            partial[static_cast<std::size_t>(nd.children[k])].clear();
        }
    }
    std::vector<AnswerSet> out;
    for (auto r : dp::solution_rows(store.root(), dp::Mode::Counting)) {
        auto& sets = partial.back()[r];
        out.insert(out.end(), std::make_move_iterator(sets.begin()), std::make_move_iterator(sets.end()));
    }
    std::sort(out.begin(), out.end());
    if (limit && out.size() > *limit) {
        out.resize(*limit);
    }
    return out;
}

Integer count_answer_sets(const GroundProgram& program, const SolveOptions& options) {
    return AspSolver(program, options).count();
}

OptimalCount count_optimal(const GroundProgram& program, const SolveOptions& options) {
    return AspSolver(program, options).count_optimal();
}

std::vector<AnswerSet> enumerate_answer_sets(const GroundProgram& program, std::optional<std::size_t> limit,
                                             const SolveOptions& options) {
    return AspSolver(program, options).enumerate(limit);
}

} // namespace tdcount
