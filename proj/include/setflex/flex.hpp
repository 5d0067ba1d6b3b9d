#pragma once

#include <array>
#include <limits>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "setflex/phylo.hpp"
#include "setflex/set_system.hpp"

namespace setflex {

inline constexpr std::size_t default_enumeration_cap = 8;
inline constexpr long long default_flex_budget = 1'000'000;

/// (2m-3)!! with (2*1-3)!! read as 1; nullopt on overflow.
inline std::optional<std::uint64_t> binary_tree_count(std::size_t m) {
    if (m == 0) return std::nullopt;
    std::uint64_t acc = 1;
    for (std::size_t k = 3; k + 3 <= 2 * m; k += 2) {
        if (acc > std::numeric_limits<std::uint64_t>::max() / k) return std::nullopt;
        acc *= k;
    }
    return acc;
}

/// All rooted binary trees on the given leaves, each exactly once.
///
/// Leaves are inserted in increasing id order; each new leaf is attached by
/// subdividing one of the existing edges or above the current root.
inline std::vector<RootedPhyloTree> enumerate_binary_trees(const TaxonSet& leaf_set,
                                                           std::size_t cap = default_enumeration_cap) {
    TaxonSet leaves = leaf_set;
    normalize(leaves);
    if (leaves.empty()) throw InputError("tree enumeration needs at least one leaf");
    if (leaves.size() > cap)
        throw CapExceeded("enumerating binary trees on " + std::to_string(leaves.size()) +
                          " leaves exceeds the cap of " + std::to_string(cap));
    const std::size_t m = leaves.size();

    // nodes 0..m-1 are leaves, m.. are interior; parent[-1] marks the root
    struct Shape {
        std::vector<int> parent;
        std::vector<std::array<int, 2>> kids;  // by interior index
        int root = 0;
    };
    std::vector<RootedPhyloTree> out;
    out.reserve(*binary_tree_count(m));

    const auto emit = [&](const Shape& s) {
        const std::size_t n = s.parent.size();
        std::vector<RootedPhyloTree::Vertex> vs(n);
        for (std::size_t v = 0; v < n; ++v) {
            vs[v].parent = s.parent[v];
            if (v < m) {
                vs[v].taxon = leaves[v];
            } else {
                const auto& k = s.kids[v - m];
                vs[v].children = {k[0], k[1]};
            }
        }
        out.emplace_back(std::move(vs), s.root);
    };

    const auto rec = [&](auto&& self, Shape& s, std::size_t next_leaf) -> void {
        if (next_leaf == m) {
            emit(s);
            return;
        }
        // existing nodes: leaves 0..next_leaf-1 and interior m..m+next_leaf-2
        std::vector<int> nodes;
        for (std::size_t v = 0; v < next_leaf; ++v) nodes.push_back(static_cast<int>(v));
        for (std::size_t i = 0; i + 1 < next_leaf; ++i) nodes.push_back(static_cast<int>(m + i));
        for (int v : nodes) {
            Shape t = s;
            const int w = static_cast<int>(m + next_leaf - 1);
            t.parent.resize(static_cast<std::size_t>(w) + 1, -1);
            t.kids.push_back({v, static_cast<int>(next_leaf)});
            const int p = t.parent[static_cast<std::size_t>(v)];
            t.parent[static_cast<std::size_t>(w)] = p;
            if (p < 0) {
                t.root = w;
            } else {
                auto& pk = t.kids[static_cast<std::size_t>(p) - m];
                (pk[0] == v ? pk[0] : pk[1]) = w;
            }
            t.parent[static_cast<std::size_t>(v)] = w;
            t.parent[next_leaf] = w;
            self(self, t, next_leaf + 1);
        }
    };

    Shape start;
    start.parent.assign(m, -1);
    start.root = 0;
    rec(rec, start, 1);
    return out;
}

/// One binary tree per member of a set system, index-aligned with its members.
using TreeAssignment = std::vector<RootedPhyloTree>;

struct FlexReport {
    bool verdict = false;
    std::optional<TreeAssignment> counterexample;
    long long assignments_checked = 0;
};

/// Every rooted triple displayed by some tree of the assignment.
inline TripleSet pooled_triples(std::span<const RootedPhyloTree> trees) {
    std::vector<RootedTriple> all;
    for (const auto& t : trees) {
        const auto ts = triples_of(t);
        all.insert(all.end(), ts.begin(), ts.end());
    }
    return make_triple_set(std::move(all));
}

/// Number of assignments a brute-force scan would visit; nullopt on overflow.
inline std::optional<long long> assignment_count(const SetSystem& system) {
    constexpr auto limit = static_cast<std::uint64_t>(std::numeric_limits<long long>::max());
    std::uint64_t acc = 1;
    for (const auto& m : system.members()) {
        const auto c = binary_tree_count(m.size());
        if (!c || *c > limit || acc > limit / *c) return std::nullopt;
        acc *= *c;
    }
    return static_cast<long long>(acc);
}

/// Ground-truth flexibility: every assignment of binary trees to the members
/// is run through BUILD. The scan order is a mixed-radix counter over
/// members in canonical order, last member fastest, so the reported
/// counterexample is the first failing assignment in that order.
inline FlexReport is_flexible_bruteforce(const SetSystem& system, long long budget = default_flex_budget) {
    if (system.empty()) throw InputError("flexibility is defined for non-empty set systems");
    for (std::size_t i = 0; i < system.size(); ++i)
        if (system[i].size() < 3)
            throw SizeError("flexibility needs members of size at least 3, got {" + system.member_label(i) + "}");
    const auto total = assignment_count(system);
    if (!total || *total > budget)
        throw CapExceeded("brute-force flexibility would visit more than " + std::to_string(budget) +
                          " assignments; use graphopt::is_slim instead");

    const std::size_t n = system.size();
    std::vector<std::vector<RootedPhyloTree>> trees(n);
    for (std::size_t i = 0; i < n; ++i) trees[i] = enumerate_binary_trees(system[i], system[i].size());

    const auto all_taxa = system.leaf_set();
    const bool use_masks = !all_taxa.empty() && all_taxa.back() < 64;
    std::vector<std::vector<std::vector<detail::MaskTriple>>> masks(n);
    std::vector<std::vector<TripleSet>> triple_sets(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& t : trees[i]) {
            triple_sets[i].push_back(triples_of(t));
            std::vector<detail::MaskTriple> mt;
            if (use_masks)
                for (const auto& tr : triple_sets[i].back()) {
                    const auto bit = [](TaxonId x) { return std::uint64_t{1} << x; };
                    mt.push_back({bit(tr.a), bit(tr.b), bit(tr.a) | bit(tr.b) | bit(tr.c)});
                }
            masks[i].push_back(std::move(mt));
        }
    std::uint64_t universe_mask = 0;
    if (use_masks)
        for (auto x : all_taxa) universe_mask |= std::uint64_t{1} << x;

    FlexReport rep;
    std::vector<std::size_t> digit(n, 0);
    std::vector<detail::MaskTriple> pool;
    std::vector<RootedTriple> pool_triples;
    while (true) {
        ++rep.assignments_checked;
        bool ok;
        if (use_masks) {
            pool.clear();
            for (std::size_t i = 0; i < n; ++i) pool.insert(pool.end(), masks[i][digit[i]].begin(), masks[i][digit[i]].end());
            ok = detail::masks_compatible(pool, universe_mask);
        } else {
            pool_triples.clear();
            for (std::size_t i = 0; i < n; ++i)
                pool_triples.insert(pool_triples.end(), triple_sets[i][digit[i]].begin(), triple_sets[i][digit[i]].end());
            ok = build_supertree(pool_triples).compatible();
        }
        if (!ok) {
            TreeAssignment a;
            for (std::size_t i = 0; i < n; ++i) a.push_back(trees[i][digit[i]]);
            if (build_supertree(pooled_triples(a)).compatible())
                throw InternalError("fast compatibility check disagrees with BUILD");
            rep.verdict = false;
            rep.counterexample = std::move(a);
            return rep;
        }
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++digit[pos] < trees[pos].size()) break;
            digit[pos] = 0;
            if (pos == 0) {
                rep.verdict = true;
                return rep;
            }
        }
    }
}

/// Number of binary trees on X that display every triple.
inline long long count_displaying(std::span<const RootedTriple> triples, const TaxonSet& x_set,
                                  std::size_t cap = default_enumeration_cap) {
    TaxonSet x = x_set;
    normalize(x);
    if (!is_subset(leaf_union(triples), x)) throw InputError("triples use taxa outside X");
    long long count = 0;
    for (const auto& t : enumerate_binary_trees(x, cap)) {
        bool all = true;
        for (const auto& tr : triples)
            if (!displays_triple(t, tr)) {
                all = false;
                break;
            }
        count += all ? 1 : 0;
    }
    return count;
}

/// Number of binary trees on X that display every (binary) tree of R.
inline long long count_displaying(std::span<const RootedPhyloTree> trees, const TaxonSet& x_set,
                                  std::size_t cap = default_enumeration_cap) {
    for (const auto& t : trees)
        if (!t.is_binary()) throw PreconditionError("displayed trees must be binary");
    const auto pooled = pooled_triples(trees);
    TaxonSet x = x_set;
    normalize(x);
    for (const auto& t : trees)
        if (!is_subset(t.leaves(), x)) throw InputError("tree leaves outside X");
    return count_displaying(std::span<const RootedTriple>(pooled), x, cap);
}

/// (2n-3)!! / 3^(n/3): binary trees on n leaves displaying n/3 disjoint triples.
inline std::uint64_t disjoint_count_formula(int n) {
    if (n < 3 || n % 3 != 0) throw InputError("the disjoint-triples formula needs n divisible by 3, n >= 3");
    const auto numerator = binary_tree_count(static_cast<std::size_t>(n));
    if (!numerator) throw InputError("(2n-3)!! overflows 64 bits for n = " + std::to_string(n));
    std::uint64_t denominator = 1;
    for (int k = 0; k < n / 3; ++k) denominator *= 3;
    if (*numerator % denominator != 0) throw InternalError("(2n-3)!! is not divisible by 3^(n/3)");
    return *numerator / denominator;
}

/// n-2 triples that only the given binary tree displays, built by repeatedly
/// peeling one leaf of a cherry. Choices are canonical: the cherry with the
/// smallest leaf, and the smallest leaf below the cherry's sibling. Returned
/// in induction order (the 3-leaf base case first).
inline std::vector<RootedTriple> defining_triples(const RootedPhyloTree& tree) {
    if (!tree.is_binary()) throw PreconditionError("defining triples need a binary tree");
    if (tree.leaf_count() < 3) throw PreconditionError("defining triples need at least three leaves");
    if (tree.leaf_count() == 3) return triples_of(tree);

    int best_v = -1;
    TaxonId best_min = 0;
    for (auto v : tree.interior_vertices()) {
        const auto& kids = tree.vertex(v).children;
        if (!tree.is_leaf(kids[0]) || !tree.is_leaf(kids[1])) continue;
        const TaxonId lo = std::min(tree.vertex(kids[0]).taxon, tree.vertex(kids[1]).taxon);
        if (best_v < 0 || lo < best_min) {
            best_v = v;
            best_min = lo;
        }
    }
    const auto& cherry = tree.vertex(best_v).children;
    const TaxonId a = std::min(tree.vertex(cherry[0]).taxon, tree.vertex(cherry[1]).taxon);
    const TaxonId b = std::max(tree.vertex(cherry[0]).taxon, tree.vertex(cherry[1]).taxon);
    const int u = tree.vertex(best_v).parent;
    const auto& ukids = tree.vertex(u).children;
    const int sibling = ukids[0] == best_v ? ukids[1] : ukids[0];
    const TaxonId c = tree.cluster(sibling).front();

    auto rest = defining_triples(restrict(tree, set_difference(tree.leaves(), TaxonSet{a})));
    rest.push_back(RootedTriple::make(a, b, c));
    return rest;
}

/// True iff exactly one binary tree on L(R) plus `extra_taxa` displays R.
/// A displaying non-binary tree has at least two binary refinements that
/// also display R, so uniqueness among binary trees is uniqueness overall.
inline bool is_unique_display(std::span<const RootedTriple> triples, const TaxonSet& extra_taxa = {},
                              std::size_t cap = default_enumeration_cap) {
    TaxonSet x = set_union(leaf_union(triples), [&] {
        TaxonSet e = extra_taxa;
        normalize(e);
        return e;
    }());
    return count_displaying(triples, x, cap) == 1;
}

}  // namespace setflex
