#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "setflex/report.hpp"
#include "setflex/set_system.hpp"

namespace setflex {

enum class Weighting { unit, size_minus_two };

/// The containment graph G(tau): members on the left, taxa of L(tau) on the right.
struct BipartiteIncidenceGraph {
    std::size_t left_count = 0;
    TaxonSet right;                                // sorted taxa of L(tau)
    std::vector<std::vector<std::size_t>> adjacency;  // left -> positions in `right`
    std::vector<long long> left_weight;

    std::size_t edge_count() const {
        std::size_t e = 0;
        for (const auto& a : adjacency) e += a.size();
        return e;
    }
    std::size_t node_count() const { return left_count + right.size(); }

    std::size_t right_index(TaxonId x) const {
        auto it = std::lower_bound(right.begin(), right.end(), x);
        if (it == right.end() || *it != x) throw InputError("taxon not in incidence graph");
        return static_cast<std::size_t>(it - right.begin());
    }
};

inline BipartiteIncidenceGraph incidence_graph(const SetSystem& system, Weighting weighting = Weighting::unit) {
    BipartiteIncidenceGraph g;
    g.left_count = system.size();
    g.right = system.leaf_set();
    g.adjacency.resize(system.size());
    g.left_weight.resize(system.size());
    for (std::size_t i = 0; i < system.size(); ++i) {
        const auto& m = system[i];
        if (weighting == Weighting::size_minus_two) {
            if (m.size() < 3)
                throw SizeError("size-minus-two weighting needs members of size at least 3, got {" +
                                system.member_label(i) + "}");
            g.left_weight[i] = static_cast<long long>(m.size()) - 2;
        } else {
            g.left_weight[i] = 1;
        }
        for (auto x : m) g.adjacency[i].push_back(g.right_index(x));
    }
    return g;
}

// ---------------------------------------------------------------------------
// Max-flow / min-cut

struct MaxFlowResult {
    long long value = 0;
    std::vector<bool> source_side;  // largest source side of a minimum cut
    std::vector<std::size_t> cut_arcs;
    long long cut_capacity = 0;
};

/// Directed network with non-negative integer capacities (Dinic's algorithm).
/// Arcs are explored in insertion order, so results are reproducible.
class FlowNetwork {
public:
    struct Arc {
        std::size_t from, to;
        long long capacity;
    };

    explicit FlowNetwork(std::size_t nodes = 0) : adj_(nodes) {}

    std::size_t add_node() {
        adj_.emplace_back();
        return adj_.size() - 1;
    }

    std::size_t add_arc(std::size_t from, std::size_t to, long long capacity) {
        if (from >= adj_.size() || to >= adj_.size()) throw InputError("arc endpoint out of range");
        if (capacity < 0) throw InputError("negative arc capacity");
        arcs_.push_back({from, to, capacity});
        return arcs_.size() - 1;
    }

    std::size_t node_count() const { return adj_.size(); }
    const std::vector<Arc>& arcs() const { return arcs_; }

    MaxFlowResult max_flow(std::size_t source, std::size_t sink) const {
        const std::size_t n = adj_.size();
        if (source >= n || sink >= n || source == sink) throw InputError("bad source/sink");
        // residual edges: 2*i forward, 2*i+1 backward
        std::vector<std::size_t> head(2 * arcs_.size());
        std::vector<long long> residual(2 * arcs_.size());
        std::vector<std::vector<std::size_t>> out(n);
        for (std::size_t i = 0; i < arcs_.size(); ++i) {
            const auto& a = arcs_[i];
            head[2 * i] = a.to;
            residual[2 * i] = a.capacity;
            head[2 * i + 1] = a.from;
            residual[2 * i + 1] = 0;
            out[a.from].push_back(2 * i);
            out[a.to].push_back(2 * i + 1);
        }

        std::vector<int> level(n);
        std::vector<std::size_t> next(n);
        const auto bfs = [&] {
            std::fill(level.begin(), level.end(), -1);
            std::queue<std::size_t> q;
            level[source] = 0;
            q.push(source);
            while (!q.empty()) {
                const auto v = q.front();
                q.pop();
                for (auto e : out[v])
                    if (residual[e] > 0 && level[head[e]] < 0) {
                        level[head[e]] = level[v] + 1;
                        q.push(head[e]);
                    }
            }
            return level[sink] >= 0;
        };
        const auto dfs = [&](auto&& self, std::size_t v, long long pushed) -> long long {
            if (v == sink) return pushed;
            for (auto& i = next[v]; i < out[v].size(); ++i) {
                const auto e = out[v][i];
                const auto w = head[e];
                if (residual[e] <= 0 || level[w] != level[v] + 1) continue;
                if (long long got = self(self, w, std::min(pushed, residual[e])); got > 0) {
                    residual[e] -= got;
                    residual[e ^ 1] += got;
                    return got;
                }
            }
            return 0;
        };

        MaxFlowResult r;
        while (bfs()) {
            std::fill(next.begin(), next.end(), 0);
            while (long long f = dfs(dfs, source, std::numeric_limits<long long>::max())) r.value += f;
        }

        std::vector<bool> reaches_sink(n, false);
        std::queue<std::size_t> q;
        reaches_sink[sink] = true;
        q.push(sink);
        while (!q.empty()) {
            const auto v = q.front();
            q.pop();
            for (auto e : out[v])
                if (residual[e ^ 1] > 0 && !reaches_sink[head[e]]) {
                    reaches_sink[head[e]] = true;
                    q.push(head[e]);
                }
        }
        r.source_side.assign(n, false);
        for (std::size_t v = 0; v < n; ++v) r.source_side[v] = !reaches_sink[v];
        for (std::size_t i = 0; i < arcs_.size(); ++i)
            if (r.source_side[arcs_[i].from] && !r.source_side[arcs_[i].to]) {
                r.cut_arcs.push_back(i);
                r.cut_capacity += arcs_[i].capacity;
            }
        return r;
    }

private:
    std::vector<std::vector<std::size_t>> adj_;
    std::vector<Arc> arcs_;
};

// ---------------------------------------------------------------------------
// sigma* / gamma*

/// An arc of the minimising cut: a member left out (source side cut) or a
/// covered taxon (sink side cut).
struct CutArc {
    bool member_arc = false;
    std::size_t index = 0;  // member position, or taxon id
    long long capacity = 0;
};

struct MinimizerReport {
    long long value = 0;
    SubsetSelection witness;
    std::vector<CutArc> cut;
    long long cut_capacity = 0;
    long long offset = 0;  // total left weight; cut_capacity == value + offset
    std::size_t forced_member = 0;
    long long flows_solved = 0;
};

/// min over non-empty Y of |N(Y)| - w(Y), one forced member per max-flow solve.
inline MinimizerReport minimize_surplus(const BipartiteIncidenceGraph& g) {
    if (g.left_count == 0) throw InputError("minimisation needs a non-empty set system");
    const long long total_weight = std::accumulate(g.left_weight.begin(), g.left_weight.end(), 0LL);
    const long long infinite = 1 + total_weight + static_cast<long long>(g.right.size());
    const std::size_t source = 0, sink = 1, first_member = 2;
    const std::size_t first_taxon = first_member + g.left_count;

    std::optional<MinimizerReport> best;
    for (std::size_t forced = 0; forced < g.left_count; ++forced) {
        FlowNetwork net(first_taxon + g.right.size());
        for (std::size_t s = 0; s < g.left_count; ++s)
            net.add_arc(source, first_member + s, s == forced ? infinite : g.left_weight[s]);
        for (std::size_t s = 0; s < g.left_count; ++s)
            for (auto x : g.adjacency[s]) net.add_arc(first_member + s, first_taxon + x, infinite);
        for (std::size_t x = 0; x < g.right.size(); ++x) net.add_arc(first_taxon + x, sink, 1);

        const auto flow = net.max_flow(source, sink);
        if (flow.cut_capacity != flow.value) throw InternalError("max-flow and min-cut disagree");
        const long long value = flow.value - total_weight;
        if (best && value >= best->value) continue;
        MinimizerReport rep;
        rep.value = value;
        rep.offset = total_weight;
        rep.cut_capacity = flow.cut_capacity;
        rep.forced_member = forced;
        std::vector<std::size_t> chosen;
        for (std::size_t s = 0; s < g.left_count; ++s)
            if (flow.source_side[first_member + s]) chosen.push_back(s);
        rep.witness = SubsetSelection(std::move(chosen));
        for (auto a : flow.cut_arcs) {
            const auto& arc = net.arcs()[a];
            if (arc.from == source)
                rep.cut.push_back({true, arc.to - first_member, arc.capacity});
            else
                rep.cut.push_back({false, static_cast<std::size_t>(g.right[arc.from - first_taxon]), arc.capacity});
        }
        best = std::move(rep);
    }
    best->flows_solved = static_cast<long long>(g.left_count);
    return *best;
}

inline MinimizerReport sigma_star(const SetSystem& system) {
    if (system.empty()) throw InputError("sigma* needs a non-empty set system");
    return minimize_surplus(incidence_graph(system, Weighting::unit));
}

inline MinimizerReport gamma_star(const SetSystem& system) {
    if (system.empty()) throw InputError("gamma* needs a non-empty set system");
    return minimize_surplus(incidence_graph(system, Weighting::size_minus_two));
}

/// Thin iff sigma* >= r - 1 (every non-empty sub-collection has exc >= 0).
inline CheckReport is_thin(const SetSystem& system, int r) {
    if (system.empty()) throw InputError("thinness is defined for non-empty set systems");
    require_uniform(system, SubsetSelection::all(system.size()), r);
    const auto min = sigma_star(system);
    CheckReport rep;
    rep.method = Method::mincut;
    rep.value = min.value;
    rep.verdict = min.value >= r - 1;
    if (!rep.verdict) rep.certificate = min.witness;
    if (r == 2) rep.notes.emplace_back("r=2: threshold sigma* >= 1 follows from exc = sigma - 1");
    rep.stats["flows_solved"] = min.flows_solved;
    return rep;
}

/// Slim iff gamma* >= 2.
inline CheckReport is_slim(const SetSystem& system) {
    if (system.empty()) throw InputError("slimness is defined for non-empty set systems");
    const auto min = gamma_star(system);
    CheckReport rep;
    rep.method = Method::mincut;
    rep.value = min.value;
    rep.verdict = min.value >= 2;
    if (!rep.verdict) rep.certificate = min.witness;
    rep.stats["flows_solved"] = min.flows_solved;
    return rep;
}

// ---------------------------------------------------------------------------
// Systems of distinct representatives

struct SdrResult {
    bool success = false;
    std::vector<TaxonSet> derived;            // member minus B, per member
    std::vector<TaxonId> representatives;     // per member (success only)
    SubsetSelection hall_violator;            // union smaller than count (failure only)
};

namespace detail {

// Kuhn's augmenting paths over left vertices in order. Returns the matched
// right vertex per left vertex, or the visited left set of the first failure.
struct MatchOutcome {
    std::vector<int> left_match;
    std::optional<std::vector<std::size_t>> stuck_tree;
};

inline MatchOutcome bipartite_match(const std::vector<std::vector<std::size_t>>& adj, std::size_t right_count) {
    MatchOutcome out;
    out.left_match.assign(adj.size(), -1);
    std::vector<int> right_match(right_count, -1);
    std::vector<char> used(right_count);
    std::vector<char> seen_left(adj.size());
    const auto augment = [&](auto&& self, std::size_t u) -> bool {
        seen_left[u] = 1;
        for (auto v : adj[u]) {
            if (used[v]) continue;
            used[v] = 1;
            if (right_match[v] < 0 || self(self, static_cast<std::size_t>(right_match[v]))) {
                right_match[v] = static_cast<int>(u);
                out.left_match[u] = static_cast<int>(v);
                return true;
            }
        }
        return false;
    };
    for (std::size_t u = 0; u < adj.size(); ++u) {
        std::fill(used.begin(), used.end(), 0);
        std::fill(seen_left.begin(), seen_left.end(), 0);
        if (!augment(augment, u) && !out.stuck_tree) {
            std::vector<std::size_t> tree;
            for (std::size_t w = 0; w < adj.size(); ++w)
                if (seen_left[w]) tree.push_back(w);
            out.stuck_tree = std::move(tree);
        }
    }
    return out;
}

}  // namespace detail

/// Distinct representatives for {s - B : s in tau}; a Hall violator on failure.
inline SdrResult sdr(const SetSystem& system, const TaxonSet& b_set) {
    if (system.empty()) throw InputError("SDR needs a non-empty set system");
    const auto r = system.uniform_size();
    if (!r) throw SizeError("SDR needs a uniform-size set system");
    TaxonSet b = b_set;
    normalize(b);
    if (b.size() != *r - 1)
        throw InputError("B must have exactly r-1 = " + std::to_string(*r - 1) + " taxa");
    for (auto x : b)
        if (!system.universe().has(x)) throw InputError("B contains a taxon outside the universe");

    SdrResult res;
    const TaxonSet pool = system.universe().all();
    std::vector<std::vector<std::size_t>> adj;
    for (const auto& m : system.members()) {
        res.derived.push_back(set_difference(m, b));
        std::vector<std::size_t> row(res.derived.back().begin(), res.derived.back().end());
        adj.push_back(std::move(row));
    }
    const auto outcome = detail::bipartite_match(adj, pool.size());
    if (outcome.stuck_tree) {
        res.hall_violator = SubsetSelection(*outcome.stuck_tree);
        return res;
    }
    res.success = true;
    for (auto v : outcome.left_match) res.representatives.push_back(static_cast<TaxonId>(v));
    return res;
}

// ---------------------------------------------------------------------------
// Forest and surplus-forest characterisations

struct ForestCheck {
    bool forest = true;
    std::vector<IncidenceVertex> cycle;  // alternating member / taxon vertices
};

namespace detail {

struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

// Path between two vertices of a forest given as adjacency lists.
inline std::vector<std::size_t> forest_path(const std::vector<std::vector<std::size_t>>& adj,
                                            std::size_t from, std::size_t to) {
    std::vector<std::size_t> prev(adj.size(), adj.size());
    std::queue<std::size_t> q;
    prev[from] = from;
    q.push(from);
    while (!q.empty()) {
        const auto v = q.front();
        q.pop();
        if (v == to) break;
        for (auto w : adj[v])
            if (prev[w] == adj.size()) {
                prev[w] = v;
                q.push(w);
            }
    }
    std::vector<std::size_t> path;
    if (prev[to] == adj.size()) return path;
    for (auto v = to; v != from; v = prev[v]) path.push_back(v);
    path.push_back(from);
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace detail

inline ForestCheck is_forest(const BipartiteIncidenceGraph& g) {
    const std::size_t n = g.node_count();
    detail::DisjointSets ds(n);
    std::vector<std::vector<std::size_t>> adj(n);
    const auto to_vertex = [&](std::size_t node) {
        return node < g.left_count ? IncidenceVertex{true, static_cast<int>(node)}
                                   : IncidenceVertex{false, g.right[node - g.left_count]};
    };
    for (std::size_t s = 0; s < g.left_count; ++s) {
        for (auto x : g.adjacency[s]) {
            const std::size_t t = g.left_count + x;
            if (ds.unite(s, t)) {
                adj[s].push_back(t);
                adj[t].push_back(s);
                continue;
            }
            ForestCheck c;
            c.forest = false;
            for (auto v : detail::forest_path(adj, s, t)) c.cycle.push_back(to_vertex(v));
            return c;
        }
    }
    return {};
}

/// Edges (member position, taxon id) of a forest in which every member has degree 2.
using SurplusForest = std::vector<std::pair<std::size_t, TaxonId>>;

inline bool verify_surplus_forest(const BipartiteIncidenceGraph& g, const SurplusForest& f) {
    std::vector<int> degree(g.left_count, 0);
    detail::DisjointSets ds(g.node_count());
    auto edges = f;
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) return false;
    for (const auto& [s, x] : edges) {
        if (s >= g.left_count) return false;
        const auto it = std::lower_bound(g.right.begin(), g.right.end(), x);
        if (it == g.right.end() || *it != x) return false;
        const auto xi = static_cast<std::size_t>(it - g.right.begin());
        if (std::find(g.adjacency[s].begin(), g.adjacency[s].end(), xi) == g.adjacency[s].end()) return false;
        ++degree[s];
        if (!ds.unite(s, g.left_count + xi)) return false;
    }
    return std::all_of(degree.begin(), degree.end(), [](int d) { return d == 2; });
}

/// A forest F inside G with deg_F(u) = 2 for every member u, or nullopt when
/// the graph has no positive surplus.
///
/// Choosing two neighbours {x, y} for each member is choosing one edge per
/// member of a graph on the taxa; F is acyclic iff those edges form a forest.
/// So F is a common independent set of a partition matroid (one edge per
/// member) and a graphic matroid, found by augmenting along shortest paths
/// of the exchange graph.
inline std::optional<SurplusForest> surplus_forest(const BipartiteIncidenceGraph& g) {
    for (auto w : g.left_weight)
        if (w != 1) throw InputError("surplus forest needs unit weights");
    if (g.left_count == 0) return SurplusForest{};

    struct Element {
        std::size_t member, x, y;  // x < y are positions in g.right
    };
    std::vector<Element> ground;
    for (std::size_t s = 0; s < g.left_count; ++s) {
        auto nb = g.adjacency[s];
        std::sort(nb.begin(), nb.end());
        for (std::size_t i = 0; i < nb.size(); ++i)
            for (std::size_t j = i + 1; j < nb.size(); ++j) ground.push_back({s, nb[i], nb[j]});
    }
    const std::size_t m = ground.size();
    const std::size_t taxa = g.right.size();
    std::vector<char> in(m, 0);

    while (true) {
        std::vector<std::size_t> chosen;
        std::vector<int> member_owner(g.left_count, -1);
        for (std::size_t e = 0; e < m; ++e)
            if (in[e]) {
                chosen.push_back(e);
                member_owner[ground[e].member] = static_cast<int>(e);
            }
        if (chosen.size() == g.left_count) break;

        // forest on taxa formed by the current selection
        std::vector<std::vector<std::size_t>> fadj(taxa);
        detail::DisjointSets comp(taxa);
        for (auto e : chosen) {
            fadj[ground[e].x].push_back(ground[e].y);
            fadj[ground[e].y].push_back(ground[e].x);
            comp.unite(ground[e].x, ground[e].y);
        }
        const auto element_between = [&](std::size_t a, std::size_t b) -> std::size_t {
            for (auto e : chosen)
                if ((ground[e].x == a && ground[e].y == b) || (ground[e].x == b && ground[e].y == a)) return e;
            return m;
        };

        // exchange graph over ground elements
        std::vector<std::vector<std::size_t>> ex(m);
        std::vector<char> is_source(m, 0), is_sink(m, 0);
        for (std::size_t y = 0; y < m; ++y) {
            if (in[y]) continue;
            const auto& ey = ground[y];
            is_source[y] = member_owner[ey.member] < 0;
            const bool acyclic = comp.find(ey.x) != comp.find(ey.y);
            is_sink[y] = acyclic;
            // x -> y when I - x + y keeps one element per member
            for (auto x : chosen)
                if (ground[x].member == ey.member) ex[x].push_back(y);
            // y -> x when I - x + y is a forest
            if (!acyclic) {
                const auto path = detail::forest_path(fadj, ey.x, ey.y);
                for (std::size_t k = 0; k + 1 < path.size(); ++k) ex[y].push_back(element_between(path[k], path[k + 1]));
            }
        }

        std::vector<std::size_t> prev(m, m + 1);
        std::queue<std::size_t> q;
        for (std::size_t y = 0; y < m; ++y)
            if (is_source[y]) {
                prev[y] = m;
                q.push(y);
            }
        std::size_t end = m;
        while (!q.empty() && end == m) {
            const auto v = q.front();
            q.pop();
            if (is_sink[v]) {
                end = v;
                break;
            }
            for (auto w : ex[v])
                if (prev[w] == m + 1) {
                    prev[w] = v;
                    q.push(w);
                }
        }
        if (end == m) {
            if (minimize_surplus(g).value >= 1)
                throw InternalError("no surplus forest although the surplus is positive");
            return std::nullopt;
        }
        for (auto v = end; v != m; v = prev[v]) in[v] ^= 1;
    }

    if (minimize_surplus(g).value < 1) throw InternalError("surplus forest found for a graph without positive surplus");
    SurplusForest f;
    for (std::size_t e = 0; e < m; ++e)
        if (in[e]) {
            f.emplace_back(ground[e].member, g.right[ground[e].x]);
            f.emplace_back(ground[e].member, g.right[ground[e].y]);
        }
    std::sort(f.begin(), f.end());
    if (!verify_surplus_forest(g, f)) throw InternalError("surplus forest failed verification");
    return f;
}

}  // namespace setflex
