#pragma once

#include "tdcount/graph.hpp"
#include "tdcount/numeric.hpp"
#include "tdcount/program.hpp"

#include <span>
#include <vector>

// Exhaustive reference implementations. They share no code with the decomposition-based
// engines and refuse (TooLarge) rather than approximate beyond their size guards.
namespace tdcount::oracle {

inline constexpr std::size_t max_atoms    = 20;
inline constexpr std::size_t max_vertices = 11;

//! All answer sets (as sorted atom-id lists, in lexicographic order), via the Gelfond-Lifschitz reduct.
std::vector<std::vector<AtomId>> brute_answer_sets(const GroundProgram& program);

//! Minimum minimize cost over all answer sets and the number of answer sets attaining it.
struct BruteOptimum {
    bool    consistent = false;
    Integer cost;
    Integer count;
};
BruteOptimum brute_optimum(const GroundProgram& program);

Integer  brute_count_models(const CnfFormula& formula);
Rational brute_weighted_count(const CnfFormula& formula);

Integer brute_projected_count(const GroundProgram& program, std::span<const AtomId> projection);
Integer brute_projected_count(const CnfFormula& formula, std::span<const int> projection);

//! Minimum over all elimination orderings of the induced width, by dynamic programming over vertex subsets.
std::size_t brute_treewidth(const Graph& graph);

} // namespace tdcount::oracle
