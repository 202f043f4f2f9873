#pragma once

#include "tdcount/numeric.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tdcount {

using AtomId = std::uint32_t;

struct Atom {
    AtomId                     id = 0;
    std::optional<std::string> name;
};

//! Disjunctive rule `h1 | ... | hk :- p1, ..., pm, not n1, ..., not nj.`
//! All three atom lists are kept sorted and duplicate free.
struct Rule {
    std::vector<AtomId> head;
    std::vector<AtomId> body_pos;
    std::vector<AtomId> body_neg;

    //! Sorted union of head and body atoms.
    [[nodiscard]] std::vector<AtomId> atoms() const;
    [[nodiscard]] bool                empty() const { return head.empty() && body_pos.empty() && body_neg.empty(); }

    friend bool operator==(const Rule&, const Rule&) = default;
};

struct Literal {
    AtomId atom     = 0;
    bool   positive = true;

    friend auto operator<=>(const Literal&, const Literal&) = default;
};

struct MinimizeStatement {
    std::map<Literal, Integer> weights;

    //! Weight charged when `atom` is assigned `value` (zero if absent).
    [[nodiscard]] Integer weight(AtomId atom, bool value) const;
};

class GroundProgram {
public:
    GroundProgram() = default;

    [[nodiscard]] const std::vector<Atom>&               atoms() const noexcept { return atoms_; }
    [[nodiscard]] const std::vector<Rule>&               rules() const noexcept { return rules_; }
    [[nodiscard]] const std::optional<MinimizeStatement>& minimize() const noexcept { return minimize_; }
    [[nodiscard]] std::size_t                            num_atoms() const noexcept { return atoms_.size(); }

    //! True if some rule has neither head nor body; such a program has no answer set.
    [[nodiscard]] bool has_empty_rule() const;

    [[nodiscard]] std::optional<AtomId> find(std::string_view name) const;
    //! Name for display; unnamed atoms are rendered as `_<id+1>`.
    [[nodiscard]] std::string display_name(AtomId id) const;

private:
    friend class ProgramBuilder;

    std::vector<Atom>                            atoms_;
    std::vector<Rule>                            rules_;
    std::optional<MinimizeStatement>             minimize_;
    std::unordered_map<std::string, AtomId>      by_name_;
};

//! Incrementally assembles a validated GroundProgram.
class ProgramBuilder {
public:
    //! Returns the id of the atom called `name`, adding it on first use.
    AtomId atom(std::string_view name);
    AtomId add_anonymous_atom();
    void   set_name(AtomId id, std::string name);

    //! Sorts and deduplicates the rule's lists; throws ParseError on unknown atom ids.
    void add_rule(Rule rule);
    void add_minimize(Literal lit, const Integer& weight);
    //! Marks the program as carrying a (possibly empty) minimize statement.
    void enable_minimize();

    [[nodiscard]] std::size_t num_atoms() const noexcept { return program_.atoms_.size(); }

    GroundProgram build() &&;

private:
    GroundProgram program_;
};

//! Propositional formula in conjunctive normal form; literals are signed 1-based variable indices.
struct CnfFormula {
    std::size_t                             num_vars = 0;
    std::vector<std::vector<int>>           clauses;
    std::optional<std::map<int, Rational>>  weights;

    //! Literal weight; literals without an explicit weight weigh one.
    [[nodiscard]] Rational weight(int lit) const;
    [[nodiscard]] bool     has_empty_clause() const;
};

GroundProgram parse_ground_program(std::istream& in);
GroundProgram parse_ground_program(std::string_view text);

GroundProgram parse_smodels(std::istream& in);
GroundProgram parse_smodels(std::string_view text);

CnfFormula parse_dimacs(std::istream& in);
CnfFormula parse_dimacs(std::string_view text);

//! Renders a program in the textual grammar accepted by parse_ground_program.
std::string render_ground_program(const GroundProgram& program);

//! Writes the program in the numeric smodels subset (rule types 1, 6 and 8).
std::string render_smodels(const GroundProgram& program);

} // namespace tdcount
