#include "tdcount/oracle.hpp"

#include "tdcount/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <set>

namespace tdcount::oracle {

namespace {

using Mask = std::uint32_t;

struct RuleBits {
    Mask head = 0, pos = 0, neg = 0;
};

std::vector<RuleBits> rule_bits(const GroundProgram& p) {
    if (p.num_atoms() > max_atoms) {
        throw TooLarge("oracle supports at most " + std::to_string(max_atoms) + " atoms");
    }
    std::vector<RuleBits> out;
    for (const auto& r : p.rules()) {
        RuleBits b;
        for (auto a : r.head) {
            b.head |= Mask{1} << a;
        }
        for (auto a : r.body_pos) {
            b.pos |= Mask{1} << a;
        }
        for (auto a : r.body_neg) {
            b.neg |= Mask{1} << a;
        }
        out.push_back(b);
    }
    return out;
}

bool is_model(const std::vector<RuleBits>& rules, Mask m) {
    for (const auto& r : rules) {
        if ((m & r.pos) == r.pos && (m & r.neg) == 0 && (m & r.head) == 0) {
            return false;
        }
    }
    return true;
}

// n satisfies the reduct of the program with respect to m.
bool is_reduct_model(const std::vector<RuleBits>& rules, Mask m, Mask n) {
    for (const auto& r : rules) {
        if ((m & r.neg) == 0 && (n & r.pos) == r.pos && (n & r.head) == 0) {
            return false;
        }
    }
    return true;
}

std::vector<Mask> stable_masks(const GroundProgram& p) {
    const auto        rules = rule_bits(p);
    const Mask        full  = p.num_atoms() == 0 ? 0 : static_cast<Mask>((std::uint64_t{1} << p.num_atoms()) - 1);
    std::vector<Mask> out;
    for (std::uint64_t mm = 0; mm <= full; ++mm) {
        const auto m = static_cast<Mask>(mm);
        if (!is_model(rules, m)) {
            continue;
        }
        bool minimal = true;
        // Proper subsets of m, largest first.
        for (Mask n = (m - 1) & m; minimal; n = (n - 1) & m) {
            if (n != m && is_reduct_model(rules, m, n)) {
                minimal = false;
            }
            if (n == 0) {
                break;
            }
        }
        if (m == 0) {
            minimal = true;
        }
        if (minimal) {
            out.push_back(m);
        }
    }
    return out;
}

std::vector<AtomId> to_atoms(Mask m) {
    std::vector<AtomId> out;
    for (AtomId a = 0; m != 0; ++a, m >>= 1) {
        if (m & 1U) {
            out.push_back(a);
        }
    }
    return out;
}

std::vector<Mask> models(const CnfFormula& f) {
    if (f.num_vars > max_atoms) {
        throw TooLarge("oracle supports at most " + std::to_string(max_atoms) + " variables");
    }
    std::vector<std::pair<Mask, Mask>> clauses;
    for (const auto& c : f.clauses) {
        Mask pos = 0, neg = 0;
        for (auto lit : c) {
            (lit > 0 ? pos : neg) |= Mask{1} << (std::abs(lit) - 1);
        }
        clauses.emplace_back(pos, neg);
    }
    std::vector<Mask> out;
    for (std::uint64_t mm = 0; mm < (std::uint64_t{1} << f.num_vars); ++mm) {
        const auto m  = static_cast<Mask>(mm);
        bool       ok = std::all_of(clauses.begin(), clauses.end(),
                                    [m](const auto& c) { return (m & c.first) != 0 || (~m & c.second) != 0; });
        if (ok) {
            out.push_back(m);
        }
    }
    return out;
}

} // namespace

std::vector<std::vector<AtomId>> brute_answer_sets(const GroundProgram& program) {
    std::vector<std::vector<AtomId>> out;
    for (auto m : stable_masks(program)) {
        out.push_back(to_atoms(m));
    }
    std::sort(out.begin(), out.end());
    return out;
}

BruteOptimum brute_optimum(const GroundProgram& program) {
    BruteOptimum best;
    for (auto m : stable_masks(program)) {
        Integer cost = 0;
        if (const auto& mz = program.minimize()) {
            for (const auto& [lit, w] : mz->weights) {
                if (((m >> lit.atom) & 1U) == static_cast<Mask>(lit.positive)) {
                    cost += w;
                }
            }
        }
        if (!best.consistent || cost < best.cost) {
            best.consistent = true;
            best.cost       = cost;
            best.count      = 0;
        }
        if (cost == best.cost) {
            best.count += 1;
        }
    }
    return best;
}

Integer brute_count_models(const CnfFormula& formula) { return Integer(models(formula).size()); }

Rational brute_weighted_count(const CnfFormula& formula) {
    Rational sum = 0;
    for (auto m : models(formula)) {
        Rational prod = 1;
        for (std::size_t v = 1; v <= formula.num_vars; ++v) {
            const int lit = static_cast<int>(v);
            prod *= formula.weight(((m >> (v - 1)) & 1U) ? lit : -lit);
        }
        sum += prod;
    }
    return sum;
}

Integer brute_projected_count(const GroundProgram& program, std::span<const AtomId> projection) {
    Mask pm = 0;
    for (auto a : projection) {
        if (a >= program.num_atoms()) {
            throw ProjectionOutOfRange("projection atom out of range");
        }
        pm |= Mask{1} << a;
    }
    std::set<Mask> seen;
    for (auto m : stable_masks(program)) {
        seen.insert(m & pm);
    }
    return Integer(seen.size());
}

Integer brute_projected_count(const CnfFormula& formula, std::span<const int> projection) {
    Mask pm = 0;
    for (auto v : projection) {
        if (v < 1 || static_cast<std::size_t>(v) > formula.num_vars) {
            throw ProjectionOutOfRange("projection variable out of range");
        }
        pm |= Mask{1} << (v - 1);
    }
    std::set<Mask> seen;
    for (auto m : models(formula)) {
        seen.insert(m & pm);
    }
    return Integer(seen.size());
}

std::size_t brute_treewidth(const Graph& graph) {
    const auto n = graph.num_vertices();
    if (n > max_vertices) {
        throw TooLarge("exact treewidth supports at most " + std::to_string(max_vertices) + " vertices");
    }
    std::vector<Mask> adj(n, 0);
    for (auto [u, v] : graph.edges()) {
        adj[u] |= Mask{1} << v;
        adj[v] |= Mask{1} << u;
    }
    // q(s, v): vertices outside s and v reachable from v through vertices of s.
    auto q = [&](Mask s, std::size_t v) {
        Mask reach = Mask{1} << v, frontier = reach;
        while (frontier != 0) {
            Mask next = 0;
            for (std::size_t x = 0; x < n; ++x) {
                if ((frontier >> x) & 1U) {
                    next |= adj[x];
                }
            }
            next &= ~reach;
            reach |= next;
            frontier = next & s;
        }
        return static_cast<std::size_t>(std::popcount(reach & ~s & ~(Mask{1} << v)));
    };
    const std::size_t        full = std::size_t{1} << n;
    std::vector<std::size_t> tw(full, 0);
    for (std::size_t s = 1; s < full; ++s) {
        std::size_t best = std::numeric_limits<std::size_t>::max();
        for (std::size_t v = 0; v < n; ++v) {
            if ((s >> v) & 1U) {
                const auto rest = static_cast<Mask>(s & ~(std::size_t{1} << v));
                best            = std::min(best, std::max(tw[rest], q(rest, v)));
            }
        }
        tw[s] = best;
    }
    return tw[full - 1];
}

} // namespace tdcount::oracle
