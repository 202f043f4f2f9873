#pragma once

#include "tdcount/asp_dp.hpp"
#include "tdcount/dp_core.hpp"
#include "tdcount/program.hpp"
#include "tdcount/treedecomp.hpp"

namespace tdcount {

//! Decomposes the primal graph of a CNF formula and counts models over it.
//! Clauses are checked at the Forget node of their earliest-forgotten variable.
class SatCounter {
public:
    explicit SatCounter(CnfFormula formula, SolveOptions options = {});

    [[nodiscard]] const CnfFormula&            formula() const noexcept { return formula_; }
    [[nodiscard]] const NiceTreeDecomposition& decomposition() const noexcept { return ntd_; }
    [[nodiscard]] Width                        width() const noexcept { return width_; }
    [[nodiscard]] std::uint64_t                seed() const noexcept { return seed_; }

    //! Unweighted pass; every row of the root table is a solution row.
    [[nodiscard]] dp::TableStore<Integer>  count_pass() const;
    //! Weighted pass; literal weights are multiplied in when a variable is forgotten.
    [[nodiscard]] dp::TableStore<Rational> weighted_pass() const;

    [[nodiscard]] Integer  count() const;
    [[nodiscard]] Rational weighted_count() const;

private:
    template <class Count>
    dp::TableStore<Count> run(bool weighted) const;

    CnfFormula            formula_;
    SolveOptions          options_;
    NiceTreeDecomposition ntd_;
    Width                 width_;
    std::uint64_t         seed_ = 0;
    dp::CheckPlan         plan_;
    std::vector<std::size_t> nonempty_;
};

Integer  count_models(const CnfFormula& formula, const SolveOptions& options = {});
//! Sum over models of the product of the weights of their true literals (unweighted literals weigh one).
Rational weighted_count(const CnfFormula& formula, const SolveOptions& options = {});

} // namespace tdcount
