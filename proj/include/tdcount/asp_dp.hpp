#pragma once

#include "tdcount/dp_core.hpp"
#include "tdcount/program.hpp"
#include "tdcount/treedecomp.hpp"

#include <optional>
#include <span>
#include <vector>

namespace tdcount {

using AspTable = dp::Table<Integer>;
using AspStore = dp::TableStore<Integer>;

//! Minimize weights charged while building tables. Positive literals are charged when the atom
//! is introduced as true (and the bag-local share is subtracted again at joins); negative
//! literals are charged when the atom is forgotten as false.
class CostModel {
public:
    CostModel() = default;
    CostModel(const MinimizeStatement& minimize, std::size_t num_atoms);

    [[nodiscard]] bool    empty() const noexcept { return true_weight_.empty(); }
    [[nodiscard]] Integer weight(AtomId atom, bool value) const;
    //! Sum of the true-literal weights of the atoms set in `assignment`.
    [[nodiscard]] Integer bag_cost(std::span<const Vertex> bag, dp::Assignment assignment) const;

private:
    std::vector<Integer> true_weight_;
    std::vector<Integer> false_weight_;
};

//! Every rule is checked at the Forget node of its earliest-forgotten atom.
using RuleCheckPlan = dp::CheckPlan;

RuleCheckPlan plan_rule_checks(const GroundProgram& program, const NiceTreeDecomposition& ntd);

//! Leaf table: the empty assignment with its non-strict self witness.
AspTable asp_leaf_table();
AspTable introduce_atom(const AspTable& child, AtomId atom, const CostModel& costs = {});
AspTable forget_atom(const AspTable& child, AtomId atom, std::span<const Rule> due_rules, const CostModel& costs = {});
//! Throws BagMismatch if the tables are over different bags.
AspTable join_tables(const AspTable& left, const AspTable& right, const CostModel& costs = {});

struct SolveOptions {
    DecomposeOptions decomposition;
    dp::TraceSink    trace;
};

struct OptimalCount {
    std::optional<Integer> cost; //!< absent when there is no answer set
    Integer                count;
    friend bool            operator==(const OptimalCount&, const OptimalCount&) = default;
};

using AnswerSet = std::vector<AtomId>;

//! Decomposes the primal graph of a program once and runs the table passes on it.
class AspSolver {
public:
    explicit AspSolver(GroundProgram program, SolveOptions options = {});

    [[nodiscard]] const GroundProgram&         program() const noexcept { return program_; }
    [[nodiscard]] const NiceTreeDecomposition& decomposition() const noexcept { return ntd_; }
    [[nodiscard]] Width                        width() const noexcept { return width_; }
    [[nodiscard]] std::uint64_t                seed() const noexcept { return seed_; }

    //! First pass; optimization mode tracks minimize costs.
    [[nodiscard]] AspStore solve_pass(dp::Mode mode) const;

    [[nodiscard]] bool                   consistent() const;
    [[nodiscard]] Integer                count() const;
    [[nodiscard]] OptimalCount           count_optimal() const;
    //! Answer sets in lexicographic order of their sorted atom ids.
    [[nodiscard]] std::vector<AnswerSet> enumerate(std::optional<std::size_t> limit = std::nullopt) const;

private:
    GroundProgram         program_;
    SolveOptions          options_;
    NiceTreeDecomposition ntd_;
    Width                 width_;
    std::uint64_t         seed_ = 0;
    RuleCheckPlan         plan_;
};

Integer                count_answer_sets(const GroundProgram& program, const SolveOptions& options = {});
OptimalCount           count_optimal(const GroundProgram& program, const SolveOptions& options = {});
std::vector<AnswerSet> enumerate_answer_sets(const GroundProgram& program, std::optional<std::size_t> limit = std::nullopt,
                                             const SolveOptions& options = {});

} // namespace tdcount
