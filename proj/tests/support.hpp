#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "setflex/setflex.hpp"

namespace testkit {

using namespace setflex;

/// Taxa named a, b, c, ... (then t26, t27, ... which still sort after the letters).
inline std::string letter(int i) { return i < 26 ? std::string(1, static_cast<char>('a' + i)) : "t" + std::to_string(i); }

inline TaxonTable letters(int n) {
    TaxonTable t;
    for (int i = 0; i < n; ++i) t.intern(letter(i));
    return t;
}

/// Members written as strings of single-character labels: sys({"abc", "abd"}).
inline SetSystem sys(const std::vector<std::string>& members, const std::vector<std::string>& extra = {}) {
    std::vector<std::vector<std::string>> sets;
    for (const auto& m : members) {
        std::vector<std::string> s;
        for (char c : m) s.emplace_back(1, c);
        sets.push_back(std::move(s));
    }
    return SetSystem::from_labels(sets, extra);
}

inline TaxonSet taxa_of(const SetSystem& s, const std::string& labels) {
    TaxonSet out;
    for (char c : labels) out.push_back(s.universe().id(std::string(1, c)));
    normalize(out);
    return out;
}

inline SubsetSelection select(const SetSystem& s, const std::vector<std::string>& members) {
    std::vector<std::size_t> idx;
    for (const auto& m : members) idx.push_back(*s.find(taxa_of(s, m)));
    std::sort(idx.begin(), idx.end());
    return SubsetSelection(idx);
}

inline std::vector<TaxonSet> k_subsets(int n, int k) {
    std::vector<TaxonSet> out;
    std::vector<int> pick(static_cast<std::size_t>(n), 0);
    std::fill(pick.end() - k, pick.end(), 1);
    do {
        TaxonSet s;
        for (int i = 0; i < n; ++i)
            if (pick[static_cast<std::size_t>(i)]) s.push_back(i);
        out.push_back(s);
    } while (std::next_permutation(pick.begin(), pick.end()));
    std::sort(out.begin(), out.end());
    return out;
}

inline TaxonSet random_subset(std::mt19937_64& rng, int n, int k) {
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    std::shuffle(all.begin(), all.end(), rng);
    TaxonSet s(all.begin(), all.begin() + k);
    normalize(s);
    return s;
}

/// `count` distinct random members of size in [lo, hi] over n taxa.
inline SetSystem random_system(std::mt19937_64& rng, int n, int lo, int hi, int count) {
    std::set<TaxonSet> members;
    std::uniform_int_distribution<int> size(lo, hi);
    int guard = 0;
    while (static_cast<int>(members.size()) < count && guard++ < 100000) members.insert(random_subset(rng, n, size(rng)));
    return SetSystem(letters(n), std::vector<TaxonSet>(members.begin(), members.end()));
}

inline SubsetSelection random_selection(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
        if (rng() & 1u) idx.push_back(i);
    return SubsetSelection(idx);
}

// ---------------------------------------------------------------------------
// Independent oracles

/// Minimum over non-empty sub-collections, each evaluated from scratch with std::set.
inline long long naive_minimum(Measure m, const SetSystem& s) {
    long long best = 0;
    bool first = true;
    const std::size_t n = s.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        std::set<TaxonId> leaves;
        long long weight = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1u) {
                leaves.insert(s[i].begin(), s[i].end());
                weight += m == Measure::sigma ? 1 : static_cast<long long>(s[i].size()) - 2;
            }
        const long long v = static_cast<long long>(leaves.size()) - weight;
        if (first || v < best) best = v;
        first = false;
    }
    return best;
}

/// ab|c is displayed iff some cluster contains a and b but not c.
inline bool displays_by_clusters(const RootedPhyloTree& t, const RootedTriple& tr) {
    for (auto v : t.interior_vertices()) {
        const auto c = t.cluster(v);
        if (contains(c, tr.a) && contains(c, tr.b) && !contains(c, tr.c)) return true;
    }
    return false;
}

/// Vertex set of the path between two vertices via BFS parent links.
inline std::set<int> path_vertices(const UnrootedPhyloTree& t, int from, int to) {
    std::vector<int> parent(t.size(), -2);
    std::vector<int> queue{from};
    parent[static_cast<std::size_t>(from)] = -1;
    for (std::size_t i = 0; i < queue.size(); ++i)
        for (auto w : t.neighbours(queue[i]))
            if (parent[static_cast<std::size_t>(w)] == -2) {
                parent[static_cast<std::size_t>(w)] = queue[i];
                queue.push_back(w);
            }
    std::set<int> out;
    for (int v = to; v != -1; v = parent[static_cast<std::size_t>(v)]) out.insert(v);
    return out;
}

/// The median as the intersection of the three pairwise paths.
inline int median_by_paths(const UnrootedPhyloTree& t, const TaxonSet& s) {
    const int x = t.leaf_vertex(s[0]), y = t.leaf_vertex(s[1]), z = t.leaf_vertex(s[2]);
    const auto p = path_vertices(t, x, y), q = path_vertices(t, y, z), r = path_vertices(t, x, z);
    std::vector<int> common;
    for (auto v : p)
        if (q.count(v) && r.count(v)) common.push_back(v);
    return common.size() == 1 ? common.front() : -1;
}

/// Random binary tree by repeatedly joining two random subtrees.
inline RootedPhyloTree random_binary_tree(std::mt19937_64& rng, const TaxonSet& leaves) {
    std::vector<RootedPhyloTree> pool;
    for (auto x : leaves) pool.push_back(RootedPhyloTree::leaf(x));
    while (pool.size() > 1) {
        std::shuffle(pool.begin(), pool.end(), rng);
        auto a = pool.back();
        pool.pop_back();
        auto b = pool.back();
        pool.pop_back();
        pool.push_back(RootedPhyloTree::join({a, b}));
    }
    return pool.front();
}

/// (2m-3)!! computed directly.
inline long long double_factorial_count(int m) {
    long long v = 1;
    for (int k = 3; k <= 2 * m - 3; k += 2) v *= k;
    return v;
}

}  // namespace testkit
