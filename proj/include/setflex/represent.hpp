#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "setflex/graphopt.hpp"
#include "setflex/phylo.hpp"
#include "setflex/report.hpp"
#include "setflex/set_system.hpp"

namespace setflex {

// ---------------------------------------------------------------------------
// Caterpillars as leaf orders
//
// An unrooted caterpillar on n >= 3 leaves is given by its leaf order
// l_0 .. l_{n-1} along the spine: spine vertices s_0 .. s_{n-3}, with
// {l_0, l_1} on s_0, {l_{n-2}, l_{n-1}} on s_{n-3}, and l_i on s_{i-1}
// otherwise. Inserting a leaf anywhere into the order subdivides an edge
// and keeps the tree a caterpillar.

namespace detail {

inline std::size_t spine_position(std::size_t index, std::size_t n) {
    if (index == 0) return 0;
    return std::min(index - 1, n - 3);
}

// med of three leaves on a caterpillar is the middle of their spine positions
inline std::size_t caterpillar_median(const std::vector<std::size_t>& position, const TaxonSet& s, std::size_t n) {
    std::size_t p[3];
    for (int k = 0; k < 3; ++k) p[k] = spine_position(position[static_cast<std::size_t>(s[static_cast<std::size_t>(k)])], n);
    std::sort(p, p + 3);
    return p[1];
}

inline bool caterpillar_injective(const std::vector<TaxonId>& order, const std::vector<TaxonSet>& members,
                                  std::size_t universe) {
    const std::size_t n = order.size();
    if (n < 3) return members.empty();
    std::vector<std::size_t> position(universe, 0);
    std::vector<char> present(universe, 0);
    for (std::size_t i = 0; i < n; ++i) {
        position[static_cast<std::size_t>(order[i])] = i;
        present[static_cast<std::size_t>(order[i])] = 1;
    }
    std::vector<char> used(n - 2, 0);
    for (const auto& m : members) {
        for (auto x : m)
            if (!present[static_cast<std::size_t>(x)]) return false;
        auto& slot = used[caterpillar_median(position, m, n)];
        if (slot) return false;
        slot = 1;
    }
    return true;
}

}  // namespace detail

/// Unrooted caterpillar from a leaf order; interior vertices are numbered
/// 0..n-3 along the spine, leaves follow in order.
inline UnrootedPhyloTree caterpillar_from_order(const std::vector<TaxonId>& order) {
    const std::size_t n = order.size();
    if (n < 3) throw InputError("an unrooted caterpillar needs at least three leaves");
    const std::size_t spine = n - 2;
    std::vector<std::vector<int>> adj(spine + n);
    std::vector<TaxonId> taxa(spine + n, -1);
    const auto link = [&](std::size_t u, std::size_t v) {
        adj[u].push_back(static_cast<int>(v));
        adj[v].push_back(static_cast<int>(u));
    };
    for (std::size_t i = 0; i + 1 < spine; ++i) link(i, i + 1);
    for (std::size_t i = 0; i < n; ++i) {
        taxa[spine + i] = order[i];
        link(detail::spine_position(i, n), spine + i);
    }
    return UnrootedPhyloTree(std::move(adj), std::move(taxa));
}

struct MedianCheck {
    bool injective = true;
    std::vector<int> medians;  // per member
    std::optional<std::pair<std::size_t, std::size_t>> collision;
};

/// Recomputes med_T for every member from scratch and checks the map is one-to-one.
inline MedianCheck verify_median_injective(const UnrootedPhyloTree& tree, const SetSystem& system) {
    MedianCheck c;
    for (std::size_t i = 0; i < system.size(); ++i) {
        if (system[i].size() != 3) throw SizeError("median representation needs 3-element members");
        for (auto x : system[i])
            if (!tree.has_leaf(x)) throw InputError("member {" + system.member_label(i) + "} is not covered by the tree");
        c.medians.push_back(median(tree, system[i]));
    }
    for (std::size_t i = 0; i < c.medians.size() && c.injective; ++i)
        for (std::size_t j = i + 1; j < c.medians.size(); ++j)
            if (c.medians[i] == c.medians[j]) {
                c.injective = false;
                c.collision = std::pair{i, j};
                break;
            }
    return c;
}

struct MedianRepresentation {
    UnrootedPhyloTree tree;
    std::vector<TaxonId> spine_order;
    std::vector<int> vertex_map;  // member -> interior vertex (spine index)
    bool verified = false;
    TaxonSet appended_taxa;       // universe taxa outside L(tau)
    long long fallback_searches = 0;
    long long candidate_retries = 0;
};

namespace detail {

struct CaterpillarBuilder {
    std::size_t universe;
    long long fallbacks = 0;
    long long retries = 0;

    static TaxonSet leaves_of(const std::vector<TaxonSet>& tau) {
        TaxonSet out;
        for (const auto& m : tau) out.insert(out.end(), m.begin(), m.end());
        normalize(out);
        return out;
    }

    bool thin(const std::vector<TaxonSet>& tau) const {
        if (tau.empty()) return true;
        TaxonTable table;
        for (std::size_t i = 0; i < universe; ++i) table.intern("t" + std::to_string(i));
        return sigma_star(SetSystem(table, tau)).value >= 2;
    }

    std::optional<std::vector<TaxonId>> search_orders(TaxonSet leaves, const std::vector<TaxonSet>& tau) const {
        std::vector<TaxonId> order(leaves.begin(), leaves.end());
        do {
            if (caterpillar_injective(order, tau, universe)) return order;
        } while (std::next_permutation(order.begin(), order.end()));
        return std::nullopt;
    }

    // Inserts `missing` (x last) into every slot combination; first injective wins.
    std::optional<std::vector<TaxonId>> place(std::vector<TaxonId> order, const std::vector<TaxonId>& missing,
                                              std::size_t k, const std::vector<TaxonSet>& tau) const {
        if (k == missing.size()) {
            if (caterpillar_injective(order, tau, universe)) return order;
            return std::nullopt;
        }
        for (std::size_t slot = order.size() + 1; slot-- > 0;) {
            auto next = order;
            next.insert(next.begin() + static_cast<std::ptrdiff_t>(slot), missing[k]);
            if (auto done = place(std::move(next), missing, k + 1, tau)) return done;
        }
        return std::nullopt;
    }

    std::optional<std::vector<TaxonId>> build(const std::vector<TaxonSet>& tau) {
        if (tau.empty()) return std::vector<TaxonId>{};
        const auto x_set = leaves_of(tau);
        if (x_set.size() <= 4) return search_orders(x_set, tau);

        // leaf with the fewest occurrences, smallest id on ties
        TaxonId x = -1;
        std::size_t best = 0;
        for (auto y : x_set) {
            std::size_t n = 0;
            for (const auto& m : tau) n += contains(m, y) ? 1 : 0;
            if (x < 0 || n < best) {
                x = y;
                best = n;
            }
        }
        std::vector<std::size_t> with_x;
        for (std::size_t i = 0; i < tau.size(); ++i)
            if (contains(tau[i], x)) with_x.push_back(i);

        const auto without = [&](std::initializer_list<std::size_t> drop, std::optional<TaxonSet> add) {
            std::vector<TaxonSet> out;
            for (std::size_t i = 0; i < tau.size(); ++i)
                if (std::find(drop.begin(), drop.end(), i) == drop.end()) out.push_back(tau[i]);
            if (add && std::find(out.begin(), out.end(), *add) == out.end()) out.push_back(*add);
            std::sort(out.begin(), out.end());
            return out;
        };

        std::vector<std::vector<TaxonSet>> candidates;
        if (with_x.size() == 1) {
            // one member holds x: drop it, then hang x off its a-b path
            candidates.push_back(without({with_x[0]}, std::nullopt));
        } else if (with_x.size() == 2) {
            const auto& t = tau[with_x[0]];
            const auto& u = tau[with_x[1]];
            const auto common = set_intersection(t, u);
            const auto t_rest = set_difference(t, TaxonSet{x});
            const auto u_rest = set_difference(u, TaxonSet{x});
            if (common.size() == 2) {
                // {a,b,x}, {a,b',x} -> {a,b,b'}
                auto merged = set_union(t_rest, u_rest);
                candidates.push_back(without({with_x[0], with_x[1]}, merged));
            } else {
                // {a,b,x}, {a',b',x} -> one pair plus one element of the other member
                std::vector<TaxonSet> options;
                for (auto y : u_rest) options.push_back(set_union(t_rest, TaxonSet{y}));
                for (auto y : t_rest) options.push_back(set_union(u_rest, TaxonSet{y}));
                std::sort(options.begin(), options.end());
                for (auto& o : options) {
                    auto cand = without({with_x[0], with_x[1]}, o);
                    if (thin(cand)) candidates.push_back(std::move(cand));
                }
            }
        }

        for (const auto& cand : candidates) {
            auto sub = build(cand);
            if (!sub) {
                ++retries;
                continue;
            }
            auto missing = set_difference(x_set, leaves_of(cand));
            missing.erase(std::remove(missing.begin(), missing.end(), x), missing.end());
            missing.push_back(x);
            if (auto done = place(*sub, missing, 0, tau)) return done;
            ++retries;
        }
        ++fallbacks;
        if (x_set.size() > 10) return std::nullopt;
        return search_orders(x_set, tau);
    }
};

}  // namespace detail

/// An unrooted caterpillar on the universe whose median map is one-to-one on
/// a thin system of 3-sets.
///
/// Follows the inductive construction: remove a taxon x of minimal
/// occurrence (at most 2 for thin systems); with one occurrence drop that
/// member, with two merge the pair into a single 3-set, recurse, then
/// re-insert the dropped taxa into the caterpillar. Taxa outside L(tau) are
/// appended past the far end of the spine. The result is re-verified with
/// `median` before it is returned.
inline MedianRepresentation caterpillar_median_representation(const SetSystem& system) {
    if (system.empty()) throw InputError("median representation needs a non-empty set system");
    if (system.uniform_size() != std::size_t{3}) throw SizeError("median representation needs 3-element members");
    if (system.universe().size() < 4) throw PreconditionError("median caterpillars need at least four taxa");
    const auto thin = is_thin(system, 3);
    if (!thin.verdict) {
        std::string w;
        for (auto i : *thin.witness()) w += (w.empty() ? "" : " ") + system.member_label(i);
        throw PreconditionError("set system is not thin (sigma* = " + std::to_string(*thin.value) +
                                ", witness: " + w + ")");
    }

    detail::CaterpillarBuilder builder{system.universe().size()};
    const std::vector<TaxonSet> tau(system.members().begin(), system.members().end());
    auto order = builder.build(tau);
    if (!order) throw InternalError("caterpillar construction failed on a thin system");

    MedianRepresentation rep;
    rep.appended_taxa = set_difference(system.universe().all(), system.leaf_set());
    order->insert(order->end(), rep.appended_taxa.begin(), rep.appended_taxa.end());
    rep.spine_order = *order;
    rep.tree = caterpillar_from_order(rep.spine_order);
    rep.fallback_searches = builder.fallbacks;
    rep.candidate_retries = builder.retries;

    const auto check = verify_median_injective(rep.tree, system);
    rep.vertex_map = check.medians;
    rep.verified = check.injective && rep.tree.is_binary() && rep.tree.cherry_count() <= 2;
    if (!rep.verified) throw InternalError("caterpillar median representation failed verification");
    return rep;
}

// ---------------------------------------------------------------------------
// Rooted caterpillars with injective lca maps (pair systems)

struct LcaRepresentation {
    RootedPhyloTree tree;
    std::vector<TaxonId> leaf_order;  // bottom cherry first, root child last
    std::vector<int> vertex_map;      // member -> interior vertex
    bool verified = false;
    TaxonSet appended_taxa;
};

/// Rooted caterpillar from a leaf order: vertices 0..n-2 are the interior
/// spine bottom-up (n-2 is the root), leaves follow in order.
inline RootedPhyloTree rooted_caterpillar_from_order(const std::vector<TaxonId>& order) {
    const std::size_t n = order.size();
    if (n == 0) throw InputError("empty leaf order");
    if (n == 1) return RootedPhyloTree::leaf(order.front());
    const std::size_t spine = n - 1;
    std::vector<RootedPhyloTree::Vertex> vs(spine + n);
    const auto attach = [&](std::size_t parent, std::size_t child) {
        vs[parent].children.push_back(static_cast<int>(child));
        vs[child].parent = static_cast<int>(parent);
    };
    for (std::size_t i = 0; i < n; ++i) vs[spine + i].taxon = order[i];
    attach(0, spine + 0);
    attach(0, spine + 1);
    for (std::size_t i = 1; i < spine; ++i) {
        attach(i, i - 1);
        attach(i, spine + i + 1);
    }
    return RootedPhyloTree(std::move(vs), static_cast<int>(spine - 1));
}

/// A rooted caterpillar on the universe with lca one-to-one on a thin pair system.
inline LcaRepresentation lca_caterpillar_representation(const SetSystem& system) {
    if (system.empty()) throw InputError("lca representation needs a non-empty set system");
    if (system.uniform_size() != std::size_t{2}) throw SizeError("lca representation needs 2-element members");
    const auto thin = is_thin(system, 2);
    if (!thin.verdict) {
        std::string w;
        for (auto i : *thin.witness()) w += (w.empty() ? "" : " ") + system.member_label(i);
        throw PreconditionError("pair system is not thin (sigma* = " + std::to_string(*thin.value) +
                                ", witness: " + w + ")");
    }

    // peel a taxon x with one occurrence {a, x}; rebuild as (T', x) or ((T', a), x)
    const auto rec = [&](auto&& self, std::vector<TaxonSet> tau) -> std::vector<TaxonId> {
        if (tau.empty()) return {};
        TaxonSet leaves;
        for (const auto& m : tau) leaves.insert(leaves.end(), m.begin(), m.end());
        normalize(leaves);
        TaxonId x = -1;
        for (auto y : leaves) {
            const auto n = std::count_if(tau.begin(), tau.end(), [&](const TaxonSet& m) { return contains(m, y); });
            if (n == 1) {
                x = y;
                break;
            }
        }
        if (x < 0) throw InternalError("thin pair system without a taxon of occurrence one");
        const auto it = std::find_if(tau.begin(), tau.end(), [&](const TaxonSet& m) { return contains(m, x); });
        const TaxonId a = (*it)[0] == x ? (*it)[1] : (*it)[0];
        tau.erase(it);
        auto order = self(self, tau);
        const bool a_kept = std::any_of(tau.begin(), tau.end(), [&](const TaxonSet& m) { return contains(m, a); });
        if (!a_kept) order.push_back(a);
        order.push_back(x);
        return order;
    };

    LcaRepresentation rep;
    rep.leaf_order = rec(rec, std::vector<TaxonSet>(system.members().begin(), system.members().end()));
    rep.appended_taxa = set_difference(system.universe().all(), system.leaf_set());
    rep.leaf_order.insert(rep.leaf_order.end(), rep.appended_taxa.begin(), rep.appended_taxa.end());
    rep.tree = rooted_caterpillar_from_order(rep.leaf_order);

    std::vector<int> seen;
    bool injective = true;
    for (const auto& m : system.members()) {
        const int v = lca(rep.tree, m);
        injective = injective && std::find(seen.begin(), seen.end(), v) == seen.end();
        seen.push_back(v);
    }
    rep.vertex_map = seen;
    // a rooted caterpillar has exactly one cherry (or is a single leaf / cherry)
    std::size_t cherries = 0;
    for (auto v : rep.tree.interior_vertices()) {
        const auto& k = rep.tree.vertex(v).children;
        cherries += (rep.tree.is_leaf(k[0]) && rep.tree.is_leaf(k[1])) ? 1 : 0;
    }
    rep.verified = injective && rep.tree.is_binary() && cherries <= 1;
    if (!rep.verified) throw InternalError("lca caterpillar representation failed verification");
    return rep;
}

// ---------------------------------------------------------------------------
// Total orders

/// For each pair member, the chosen precedence (first precedes second).
using Orientation = std::vector<std::pair<TaxonId, TaxonId>>;

struct TotalOrderResult {
    std::optional<std::vector<TaxonId>> order;
    std::vector<TaxonId> cycle;  // x_1 < x_2 < ... < x_k < x_1
};

/// Topological extension (smallest id first among available taxa), or a directed cycle.
inline TotalOrderResult extend_to_total_order(const TaxonSet& universe_set, const Orientation& orientation) {
    TaxonSet universe = universe_set;
    normalize(universe);
    const auto pos = [&](TaxonId t) {
        auto it = std::lower_bound(universe.begin(), universe.end(), t);
        if (it == universe.end() || *it != t) throw InputError("orientation uses a taxon outside the universe");
        return static_cast<std::size_t>(it - universe.begin());
    };
    const std::size_t n = universe.size();
    std::vector<std::vector<std::size_t>> succ(n), pred(n);
    std::vector<int> indeg(n, 0);
    for (const auto& [x, y] : orientation) {
        if (x == y) throw InputError("orientation relates a taxon to itself");
        const auto px = pos(x), py = pos(y);
        succ[px].push_back(py);
        pred[py].push_back(px);
        ++indeg[py];
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.push(i);
    std::vector<TaxonId> order;
    std::vector<char> done(n, 0);
    while (!ready.empty()) {
        const auto v = ready.top();
        ready.pop();
        done[v] = 1;
        order.push_back(universe[v]);
        for (auto w : succ[v])
            if (--indeg[w] == 0) ready.push(w);
    }
    TotalOrderResult res;
    if (order.size() == n) {
        res.order = std::move(order);
        return res;
    }
    // every remaining vertex has a remaining predecessor: walk back until a repeat
    std::size_t v = 0;
    while (done[v]) ++v;
    std::vector<std::size_t> walk;
    std::vector<int> seen_at(n, -1);
    while (seen_at[v] < 0) {
        seen_at[v] = static_cast<int>(walk.size());
        walk.push_back(v);
        std::size_t next = n;
        for (auto p : pred[v])
            if (!done[p]) next = std::min(next, p);
        v = next;
    }
    std::vector<std::size_t> cyc(walk.begin() + seen_at[v], walk.end());
    std::reverse(cyc.begin(), cyc.end());
    // rotate so the smallest taxon comes first
    std::rotate(cyc.begin(), std::min_element(cyc.begin(), cyc.end()), cyc.end());
    for (auto c : cyc) res.cycle.push_back(universe[c]);
    return res;
}

enum class OrderMode { bruteforce, forest };

inline constexpr std::size_t default_orientation_cap = 20;

/// Total-order flexibility of a pair system: every orientation of the pairs
/// extends to a total order. Brute force tries all 2^|tau| orientations
/// (last member fastest); forest mode tests whether G(tau) is acyclic.
inline CheckReport is_total_order_flexible(const SetSystem& system, OrderMode mode,
                                           std::size_t cap = default_orientation_cap) {
    if (system.empty()) throw InputError("total-order flexibility needs a non-empty set system");
    if (system.uniform_size() != std::size_t{2}) throw SizeError("total-order flexibility needs 2-element members");
    CheckReport rep;
    if (mode == OrderMode::forest) {
        rep.method = Method::forest;
        auto f = is_forest(incidence_graph(system));
        rep.verdict = f.forest;
        if (!f.forest) rep.certificate = std::move(f.cycle);
        return rep;
    }
    rep.method = Method::bruteforce;
    const std::size_t n = system.size();
    if (n > cap || n > 62)
        throw CapExceeded("brute-force orientation scan over " + std::to_string(n) + " pairs exceeds the cap of " +
                          std::to_string(cap));
    const auto universe = system.universe().all();
    const std::uint64_t total = std::uint64_t{1} << n;
    Orientation o(n);
    for (std::uint64_t code = 0; code < total; ++code) {
        for (std::size_t i = 0; i < n; ++i) {
            const bool flip = (code >> (n - 1 - i)) & 1u;
            const auto& m = system[i];
            o[i] = flip ? std::pair{m[1], m[0]} : std::pair{m[0], m[1]};
        }
        auto ext = extend_to_total_order(universe, o);
        if (!ext.order) {
            rep.verdict = false;
            rep.certificate = OrderWitness{o, ext.cycle};
            rep.stats["orientations_checked"] = static_cast<long long>(code + 1);
            return rep;
        }
    }
    rep.verdict = true;
    rep.stats["orientations_checked"] = static_cast<long long>(total);
    return rep;
}

}  // namespace setflex
