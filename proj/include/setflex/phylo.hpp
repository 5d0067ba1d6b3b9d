#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "setflex/taxa.hpp"

namespace setflex {

// ---------------------------------------------------------------------------
// Rooted triples

/// The rooted triple ab|c: cherry {a, b} (stored a < b) and outgroup c.
struct RootedTriple {
    TaxonId a = 0, b = 0, c = 0;

    static RootedTriple make(TaxonId x, TaxonId y, TaxonId outgroup) {
        if (x == y || x == outgroup || y == outgroup) throw InputError("rooted triple needs three distinct taxa");
        return {std::min(x, y), std::max(x, y), outgroup};
    }

    TaxonSet leaves() const {
        TaxonSet s{a, b, c};
        normalize(s);
        return s;
    }

    auto operator<=>(const RootedTriple&) const = default;
};

/// Sorted, duplicate-free set of rooted triples.
using TripleSet = std::vector<RootedTriple>;

inline TripleSet make_triple_set(std::vector<RootedTriple> triples) {
    std::sort(triples.begin(), triples.end());
    triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
    return triples;
}

inline TaxonSet leaf_union(std::span<const RootedTriple> triples) {
    TaxonSet out;
    for (const auto& t : triples) out.insert(out.end(), {t.a, t.b, t.c});
    normalize(out);
    return out;
}

/// ||R||: the leaf 3-sets of the triples.
inline std::vector<TaxonSet> leaf_sets(std::span<const RootedTriple> triples) {
    std::vector<TaxonSet> out;
    for (const auto& t : triples) out.push_back(t.leaves());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline std::string format_triple(const RootedTriple& t, const TaxonTable& taxa) {
    return taxa.label(t.a) + "," + taxa.label(t.b) + "|" + taxa.label(t.c);
}

/// Parses `a,b|c` (labels may be multi-character). Labels are interned.
inline RootedTriple parse_triple(std::string_view text, TaxonTable& taxa) {
    const auto bar = text.find('|');
    const auto comma = text.find(',');
    if (bar == std::string_view::npos || comma == std::string_view::npos || comma > bar ||
        text.find('|', bar + 1) != std::string_view::npos || text.find(',', comma + 1) < bar)
        throw InputError("malformed triple '" + std::string(text) + "', expected a,b|c");
    const auto strip = [](std::string_view s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string_view::npos) return std::string_view{};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    const auto x = strip(text.substr(0, comma));
    const auto y = strip(text.substr(comma + 1, bar - comma - 1));
    const auto z = strip(text.substr(bar + 1));
    return RootedTriple::make(taxa.intern(x), taxa.intern(y), taxa.intern(z));
}

// ---------------------------------------------------------------------------
// Rooted phylogenetic trees

/// A rooted tree whose leaves carry distinct taxa and whose interior
/// vertices are unlabelled with out-degree at least 2. Immutable once built.
class RootedPhyloTree {
public:
    struct Vertex {
        int parent = -1;
        std::vector<int> children;
        TaxonId taxon = -1;  // leaves only
    };

    RootedPhyloTree() = default;

    RootedPhyloTree(std::vector<Vertex> vertices, int root) : vertices_(std::move(vertices)), root_(root) {
        validate();
    }

    static RootedPhyloTree leaf(TaxonId taxon) {
        if (taxon < 0) throw InputError("negative taxon id");
        return RootedPhyloTree({Vertex{-1, {}, taxon}}, 0);
    }

    /// A new root whose children are the given trees.
    static RootedPhyloTree join(std::span<const RootedPhyloTree> children) {
        if (children.size() < 2) throw InputError("an interior vertex needs at least two children");
        std::vector<Vertex> vs(1);
        for (const auto& child : children) {
            if (child.empty()) throw InputError("cannot join an empty tree");
            const int offset = static_cast<int>(vs.size());
            for (const auto& v : child.vertices_) {
                Vertex copy = v;
                copy.parent = v.parent < 0 ? 0 : v.parent + offset;
                for (auto& c : copy.children) c += offset;
                vs.push_back(std::move(copy));
            }
            vs[0].children.push_back(child.root_ + offset);
        }
        return RootedPhyloTree(std::move(vs), 0);
    }

    static RootedPhyloTree join(std::initializer_list<RootedPhyloTree> children) {
        return join(std::span<const RootedPhyloTree>(children.begin(), children.size()));
    }

    bool empty() const { return vertices_.empty(); }
    std::size_t size() const { return vertices_.size(); }
    int root() const { return root_; }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const Vertex& vertex(int v) const { return vertices_.at(static_cast<std::size_t>(v)); }
    bool is_leaf(int v) const { return vertex(v).children.empty(); }
    int depth(int v) const { return depth_.at(static_cast<std::size_t>(v)); }

    const TaxonSet& leaves() const { return leaves_; }
    std::size_t leaf_count() const { return leaves_.size(); }
    bool has_leaf(TaxonId x) const { return leaf_vertex_or_none(x) >= 0; }

    int leaf_vertex(TaxonId x) const {
        const int v = leaf_vertex_or_none(x);
        if (v < 0) throw InputError("taxon " + std::to_string(x) + " is not a leaf of the tree");
        return v;
    }

    bool is_binary() const {
        return std::all_of(vertices_.begin(), vertices_.end(),
                           [](const Vertex& v) { return v.children.empty() || v.children.size() == 2; });
    }

    std::vector<int> interior_vertices() const {
        std::vector<int> out;
        for (std::size_t v = 0; v < vertices_.size(); ++v)
            if (!vertices_[v].children.empty()) out.push_back(static_cast<int>(v));
        return out;
    }

    /// Leaves below (or equal to) v.
    TaxonSet cluster(int v) const {
        TaxonSet out;
        std::vector<int> stack{v};
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            const auto& vx = vertex(u);
            if (vx.children.empty()) out.push_back(vx.taxon);
            for (auto c : vx.children) stack.push_back(c);
        }
        normalize(out);
        return out;
    }

    /// Smallest leaf id below each vertex.
    std::vector<TaxonId> min_leaf() const {
        std::vector<TaxonId> out(vertices_.size(), std::numeric_limits<TaxonId>::max());
        for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
            const auto& vx = vertices_[static_cast<std::size_t>(*it)];
            auto& m = out[static_cast<std::size_t>(*it)];
            if (vx.children.empty()) m = vx.taxon;
            for (auto c : vx.children) m = std::min(m, out[static_cast<std::size_t>(c)]);
        }
        return out;
    }

    /// Vertices in pre-order (parents before children).
    const std::vector<int>& preorder() const { return order_; }

private:
    int leaf_vertex_or_none(TaxonId x) const {
        if (x < 0 || static_cast<std::size_t>(x) >= leaf_index_.size()) return -1;
        return leaf_index_[static_cast<std::size_t>(x)];
    }

    void validate() {
        if (vertices_.empty()) {
            root_ = -1;
            return;
        }
        const auto n = vertices_.size();
        if (root_ < 0 || static_cast<std::size_t>(root_) >= n) throw InputError("root out of range");
        if (vertices_[static_cast<std::size_t>(root_)].parent != -1) throw InputError("root has a parent");
        depth_.assign(n, -1);
        order_.clear();
        std::vector<int> stack{root_};
        depth_[static_cast<std::size_t>(root_)] = 0;
        TaxonId max_taxon = -1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            order_.push_back(v);
            const auto& vx = vertices_[static_cast<std::size_t>(v)];
            if (vx.children.empty()) {
                if (vx.taxon < 0) throw InputError("leaf without a taxon");
                max_taxon = std::max(max_taxon, vx.taxon);
            } else {
                if (vx.taxon >= 0) throw InputError("interior vertices must be unlabelled");
                if (vx.children.size() < 2) throw InputError("interior vertex with out-degree below 2");
            }
            for (auto it = vx.children.rbegin(); it != vx.children.rend(); ++it) {
                const int c = *it;
                if (c < 0 || static_cast<std::size_t>(c) >= n) throw InputError("child out of range");
                if (depth_[static_cast<std::size_t>(c)] >= 0) throw InputError("tree contains a cycle or shared child");
                if (vertices_[static_cast<std::size_t>(c)].parent != v) throw InputError("inconsistent parent link");
                depth_[static_cast<std::size_t>(c)] = depth_[static_cast<std::size_t>(v)] + 1;
                stack.push_back(c);
            }
        }
        if (order_.size() != n) throw InputError("tree has unreachable vertices");
        leaf_index_.assign(static_cast<std::size_t>(max_taxon + 1), -1);
        leaves_.clear();
        for (std::size_t v = 0; v < n; ++v) {
            const auto& vx = vertices_[v];
            if (!vx.children.empty()) continue;
            auto& slot = leaf_index_[static_cast<std::size_t>(vx.taxon)];
            if (slot >= 0) throw InputError("taxon " + std::to_string(vx.taxon) + " labels two leaves");
            slot = static_cast<int>(v);
            leaves_.push_back(vx.taxon);
        }
        normalize(leaves_);
    }

    std::vector<Vertex> vertices_;
    int root_ = -1;
    std::vector<int> depth_;
    std::vector<int> order_;
    std::vector<int> leaf_index_;
    TaxonSet leaves_;
};

/// Least common ancestor of a non-empty set of leaves.
inline int lca(const RootedPhyloTree& tree, const TaxonSet& taxa) {
    if (taxa.empty()) throw InputError("lca of an empty taxon set");
    int cur = tree.leaf_vertex(taxa.front());
    for (std::size_t i = 1; i < taxa.size(); ++i) {
        int other = tree.leaf_vertex(taxa[i]);
        int a = cur;
        while (tree.depth(a) > tree.depth(other)) a = tree.vertex(a).parent;
        while (tree.depth(other) > tree.depth(a)) other = tree.vertex(other).parent;
        while (a != other) {
            a = tree.vertex(a).parent;
            other = tree.vertex(other).parent;
        }
        cur = a;
    }
    return cur;
}

inline int lca(const RootedPhyloTree& tree, TaxonId x, TaxonId y) { return lca(tree, TaxonSet{x, y}); }

inline bool displays_triple(const RootedPhyloTree& tree, const RootedTriple& t) {
    const int ab = lca(tree, t.a, t.b);
    const int abc = lca(tree, TaxonSet{t.a, t.b, t.c});
    return ab != abc;
}

/// Every rooted triple displayed by the tree, sorted.
inline TripleSet triples_of(const RootedPhyloTree& tree) {
    TripleSet out;
    if (tree.empty()) return out;
    const auto all = tree.leaves();
    for (auto v : tree.interior_vertices()) {
        const auto below = tree.cluster(v);
        const auto outside = set_difference(all, below);
        if (outside.empty()) continue;
        const auto& kids = tree.vertex(v).children;
        std::vector<TaxonSet> parts;
        for (auto c : kids) parts.push_back(tree.cluster(c));
        for (std::size_t i = 0; i < parts.size(); ++i)
            for (std::size_t j = i + 1; j < parts.size(); ++j)
                for (auto a : parts[i])
                    for (auto b : parts[j])
                        for (auto c : outside) out.push_back(RootedTriple::make(a, b, c));
    }
    return make_triple_set(std::move(out));
}

/// v = lca(x, y) when the binary tree displays xy|z; the vertex the triple supports.
inline std::optional<int> supported_vertex(const RootedPhyloTree& tree, const RootedTriple& t) {
    if (!tree.is_binary()) throw PreconditionError("the supports relation is defined for binary trees only");
    if (!displays_triple(tree, t)) return std::nullopt;
    return lca(tree, t.a, t.b);
}

/// Canonical string over taxon ids: children ordered by their smallest leaf id.
inline std::string canonical_form(const RootedPhyloTree& tree) {
    if (tree.empty()) return "";
    const auto mins = tree.min_leaf();
    const auto rec = [&](auto&& self, int v) -> std::string {
        const auto& vx = tree.vertex(v);
        if (vx.children.empty()) return std::to_string(vx.taxon);
        auto kids = vx.children;
        std::sort(kids.begin(), kids.end(), [&](int x, int y) {
            return mins[static_cast<std::size_t>(x)] < mins[static_cast<std::size_t>(y)];
        });
        std::string s = "(";
        for (std::size_t i = 0; i < kids.size(); ++i) {
            if (i) s += ",";
            s += self(self, kids[i]);
        }
        return s + ")";
    };
    return rec(rec, tree.root());
}

inline bool isomorphic(const RootedPhyloTree& x, const RootedPhyloTree& y) {
    return canonical_form(x) == canonical_form(y);
}

/// Minimal subtree spanning Y with degree-2 vertices suppressed.
inline RootedPhyloTree restrict(const RootedPhyloTree& tree, const TaxonSet& y_set) {
    TaxonSet y = y_set;
    normalize(y);
    if (y.empty()) throw InputError("restriction needs at least one taxon");
    for (auto x : y)
        if (!tree.has_leaf(x)) throw InputError("restriction taxon " + std::to_string(x) + " is not a leaf");

    std::vector<RootedPhyloTree::Vertex> out;
    const auto rec = [&](auto&& self, int v) -> int {
        const auto& vx = tree.vertex(v);
        if (vx.children.empty()) {
            if (!contains(y, vx.taxon)) return -1;
            out.push_back({-1, {}, vx.taxon});
            return static_cast<int>(out.size()) - 1;
        }
        std::vector<int> kept;
        for (auto c : vx.children)
            if (int k = self(self, c); k >= 0) kept.push_back(k);
        if (kept.empty()) return -1;
        if (kept.size() == 1) return kept.front();
        out.push_back({-1, kept, -1});
        const int id = static_cast<int>(out.size()) - 1;
        for (auto k : kept) out[static_cast<std::size_t>(k)].parent = id;
        return id;
    };
    const int root = rec(rec, tree.root());
    return RootedPhyloTree(std::move(out), root);
}

/// True iff every triple of the binary guest is displayed by the host.
inline bool displays_tree(const RootedPhyloTree& host, const RootedPhyloTree& guest) {
    if (!guest.is_binary()) throw PreconditionError("displayed tree must be binary");
    if (!is_subset(guest.leaves(), host.leaves()))
        throw InputError("displayed tree has leaves missing from the host");
    for (const auto& t : triples_of(guest))
        if (!displays_triple(host, t)) return false;
    return true;
}

/// Resolves each vertex with more than two children left-leaning in
/// canonical child order (smallest leaf id first).
inline RootedPhyloTree make_binary(const RootedPhyloTree& tree) {
    if (tree.empty()) return tree;
    const auto mins = tree.min_leaf();
    const auto rec = [&](auto&& self, int v) -> RootedPhyloTree {
        const auto& vx = tree.vertex(v);
        if (vx.children.empty()) return RootedPhyloTree::leaf(vx.taxon);
        auto kids = vx.children;
        std::sort(kids.begin(), kids.end(), [&](int x, int y) {
            return mins[static_cast<std::size_t>(x)] < mins[static_cast<std::size_t>(y)];
        });
        RootedPhyloTree acc = self(self, kids[0]);
        for (std::size_t i = 1; i < kids.size(); ++i) acc = RootedPhyloTree::join({acc, self(self, kids[i])});
        return acc;
    };
    return rec(rec, tree.root());
}

// ---------------------------------------------------------------------------
// Cluster graph [R, S] and BUILD

struct ClusterGraph {
    TaxonSet vertices;
    std::vector<std::pair<TaxonId, TaxonId>> edges;  // sorted, a < b

    /// Connected components, each sorted, ordered by smallest member.
    std::vector<TaxonSet> components() const {
        std::vector<std::size_t> parent(vertices.size());
        std::iota(parent.begin(), parent.end(), 0);
        const auto find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        const auto pos = [&](TaxonId t) {
            return static_cast<std::size_t>(std::lower_bound(vertices.begin(), vertices.end(), t) - vertices.begin());
        };
        for (const auto& [a, b] : edges) {
            auto ra = find(pos(a)), rb = find(pos(b));
            if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
        }
        std::vector<TaxonSet> comps;
        std::vector<int> slot(vertices.size(), -1);
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            const auto r = find(i);
            if (slot[r] < 0) {
                slot[r] = static_cast<int>(comps.size());
                comps.emplace_back();
            }
            comps[static_cast<std::size_t>(slot[r])].push_back(vertices[i]);
        }
        return comps;
    }
};

/// [R, S]: vertex set S, edge {a, b} iff ab|c is in R for some c in S.
inline ClusterGraph cluster_graph(std::span<const RootedTriple> triples, const TaxonSet& s_set) {
    ClusterGraph g;
    g.vertices = s_set;
    normalize(g.vertices);
    for (const auto& t : triples)
        if (contains(g.vertices, t.a) && contains(g.vertices, t.b) && contains(g.vertices, t.c))
            g.edges.emplace_back(t.a, t.b);
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    return g;
}

struct BuildResult {
    std::optional<RootedPhyloTree> tree;
    TaxonSet witness;  // leaf set with a connected cluster graph (incompatible only)

    bool compatible() const { return tree.has_value(); }
};

/// The BUILD supertree: recursively split on the components of
/// [R, S]. Returns the minimally resolved tree, or the first leaf set (in
/// recursion order) whose cluster graph is connected.
inline BuildResult build_supertree(std::span<const RootedTriple> triples, const TaxonSet& extra_taxa = {}) {
    const TaxonSet all = set_union(leaf_union(triples), [&] {
        TaxonSet e = extra_taxa;
        normalize(e);
        return e;
    }());
    if (all.empty()) throw InputError("BUILD needs at least one taxon");

    BuildResult result;
    const auto rec = [&](auto&& self, const TaxonSet& s, const std::vector<RootedTriple>& inside)
        -> std::optional<RootedPhyloTree> {
        if (s.size() == 1) return RootedPhyloTree::leaf(s.front());
        const auto comps = cluster_graph(inside, s).components();
        if (comps.size() == 1) {
            result.witness = s;
            return std::nullopt;
        }
        std::vector<RootedPhyloTree> kids;
        for (const auto& c : comps) {
            std::vector<RootedTriple> sub;
            for (const auto& t : inside)
                if (contains(c, t.a) && contains(c, t.b) && contains(c, t.c)) sub.push_back(t);
            auto child = self(self, c, sub);
            if (!child) return std::nullopt;
            kids.push_back(std::move(*child));
        }
        return RootedPhyloTree::join(kids);
    };
    result.tree = rec(rec, all, std::vector<RootedTriple>(triples.begin(), triples.end()));
    return result;
}

namespace detail {

/// Compatibility of triples over taxa < 64 via bit masks (BUILD without
/// materialising the tree). Triples are given as (cherry mask, full mask).
struct MaskTriple {
    std::uint64_t cherry_a, cherry_b, all;
};

inline bool masks_compatible(std::span<const MaskTriple> triples, std::uint64_t s) {
    if (std::popcount(s) < 3) return true;
    // union-find over bit positions
    int parent[64];
    for (int i = 0; i < 64; ++i) parent[i] = i;
    const auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    int components = std::popcount(s);
    std::vector<MaskTriple> inside;
    for (const auto& t : triples) {
        if ((t.all & ~s) != 0) continue;
        inside.push_back(t);
        const int a = find(std::countr_zero(t.cherry_a)), b = find(std::countr_zero(t.cherry_b));
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
            --components;
        }
    }
    if (components == 1) return false;
    std::uint64_t comp_mask[64] = {};
    for (std::uint64_t rest = s; rest; rest &= rest - 1) {
        const int bit = std::countr_zero(rest);
        comp_mask[find(bit)] |= std::uint64_t{1} << bit;
    }
    for (int i = 0; i < 64; ++i)
        if (comp_mask[i] && std::popcount(comp_mask[i]) >= 3 && !masks_compatible(inside, comp_mask[i]))
            return false;
    return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Newick I/O (no branch lengths, no quoting, no internal labels)

namespace detail {

class NewickReader {
public:
    NewickReader(std::string_view text, TaxonTable& taxa) : text_(text), taxa_(taxa) {}

    RootedPhyloTree parse() {
        skip_space();
        if (pos_ >= text_.size()) fail("empty input");
        const int root = subtree(-1);
        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != ';') fail("expected ';'");
        ++pos_;
        skip_space();
        if (pos_ != text_.size()) fail("trailing characters after ';'");
        return RootedPhyloTree(std::move(vertices_), root);
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw InputError("newick: " + what + " at position " + std::to_string(pos_));
    }

    void skip_space() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                       text_[pos_] == '\r'))
            ++pos_;
    }

    std::string_view label() {
        const auto start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '(' || c == ')' || c == ',' || c == ';' || c == ':' || c == ' ' || c == '\t' || c == '\n' ||
                c == '\r')
                break;
            if (c == '\'' || c == '"') fail("quoted labels are not supported");
            if (c == '[') fail("comments are not supported");
            ++pos_;
        }
        return text_.substr(start, pos_ - start);
    }

    int subtree(int parent) {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const int id = static_cast<int>(vertices_.size());
        vertices_.push_back({parent, {}, -1});
        if (text_[pos_] == '(') {
            ++pos_;
            while (true) {
                const int child = subtree(id);
                vertices_[static_cast<std::size_t>(id)].children.push_back(child);
                skip_space();
                if (pos_ >= text_.size()) fail("unbalanced parentheses");
                if (text_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                if (text_[pos_] == ')') {
                    ++pos_;
                    break;
                }
                fail("expected ',' or ')'");
            }
            if (vertices_[static_cast<std::size_t>(id)].children.size() < 2)
                fail("interior vertex with out-degree below 2");
            skip_space();
            if (pos_ < text_.size() && text_[pos_] == ':') fail("branch lengths are not supported");
            if (pos_ < text_.size() && !label().empty()) fail("internal labels are not supported");
        } else {
            const auto l = label();
            if (l.empty()) fail("expected a leaf label");
            skip_space();
            if (pos_ < text_.size() && text_[pos_] == ':') fail("branch lengths are not supported");
            const auto t = taxa_.intern(l);
            if (std::find(seen_.begin(), seen_.end(), t) != seen_.end())
                fail("duplicate leaf label '" + std::string(l) + "'");
            seen_.push_back(t);
            vertices_[static_cast<std::size_t>(id)].taxon = t;
        }
        return id;
    }

    std::string_view text_;
    TaxonTable& taxa_;
    std::size_t pos_ = 0;
    std::vector<RootedPhyloTree::Vertex> vertices_;
    std::vector<TaxonId> seen_;
};

}  // namespace detail

/// Parses one Newick tree terminated by ';', interning leaf labels into `taxa`.
inline RootedPhyloTree parse_newick(std::string_view text, TaxonTable& taxa) {
    return detail::NewickReader(text, taxa).parse();
}

/// Leaf labels occurring in Newick text, in order of appearance.
inline std::vector<std::string> newick_labels(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == '(' || c == ')' || c == ',' || c == ';' || c == ':' || c == ' ' || c == '\t' || c == '\n' ||
            c == '\r') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

/// Canonical Newick: children ordered by their smallest label.
inline std::string write_newick(const RootedPhyloTree& tree, const TaxonTable& taxa) {
    if (tree.empty()) throw InputError("cannot write an empty tree");
    std::vector<std::string> min_label(tree.size());
    const auto rec = [&](auto&& self, int v) -> std::string {
        const auto& vx = tree.vertex(v);
        if (vx.children.empty()) {
            min_label[static_cast<std::size_t>(v)] = taxa.label(vx.taxon);
            return taxa.label(vx.taxon);
        }
        std::vector<std::pair<std::string, std::string>> parts;  // (min label, text)
        for (auto c : vx.children) {
            auto text = self(self, c);
            parts.emplace_back(min_label[static_cast<std::size_t>(c)], std::move(text));
        }
        std::sort(parts.begin(), parts.end());
        min_label[static_cast<std::size_t>(v)] = parts.front().first;
        std::string s = "(";
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) s += ",";
            s += parts[i].second;
        }
        return s + ")";
    };
    return rec(rec, tree.root()) + ";";
}

// ---------------------------------------------------------------------------
// Unrooted phylogenetic trees

/// An unrooted tree: leaves (degree 1) carry distinct taxa, interior
/// vertices are unlabelled with degree at least 3.
class UnrootedPhyloTree {
public:
    UnrootedPhyloTree() = default;

    /// `taxa[v]` is the leaf taxon of vertex v or -1 for interior vertices.
    UnrootedPhyloTree(std::vector<std::vector<int>> adjacency, std::vector<TaxonId> taxa)
        : adj_(std::move(adjacency)), taxon_(std::move(taxa)) {
        validate();
    }

    /// Forgets the root, suppressing it when it has exactly two children.
    static UnrootedPhyloTree from_rooted(const RootedPhyloTree& tree) {
        const auto n = tree.size();
        std::vector<std::vector<int>> adj(n);
        std::vector<TaxonId> taxa(n, -1);
        for (std::size_t v = 0; v < n; ++v) {
            const auto& vx = tree.vertex(static_cast<int>(v));
            taxa[v] = vx.children.empty() ? vx.taxon : -1;
            for (auto c : vx.children) {
                adj[v].push_back(c);
                adj[static_cast<std::size_t>(c)].push_back(static_cast<int>(v));
            }
        }
        const auto root = static_cast<std::size_t>(tree.root());
        if (adj[root].size() == 2) {
            const int x = adj[root][0], y = adj[root][1];
            std::replace(adj[static_cast<std::size_t>(x)].begin(), adj[static_cast<std::size_t>(x)].end(),
                         static_cast<int>(root), y);
            std::replace(adj[static_cast<std::size_t>(y)].begin(), adj[static_cast<std::size_t>(y)].end(),
                         static_cast<int>(root), x);
            // drop the root vertex by moving the last vertex into its slot
            const auto last = n - 1;
            adj[root].clear();
            if (root != last) {
                adj[root] = adj[last];
                taxa[root] = taxa[last];
                for (auto w : adj[root])
                    std::replace(adj[static_cast<std::size_t>(w)].begin(), adj[static_cast<std::size_t>(w)].end(),
                                 static_cast<int>(last), static_cast<int>(root));
            }
            adj.pop_back();
            taxa.pop_back();
        }
        return UnrootedPhyloTree(std::move(adj), std::move(taxa));
    }

    std::size_t size() const { return adj_.size(); }
    const std::vector<int>& neighbours(int v) const { return adj_.at(static_cast<std::size_t>(v)); }
    TaxonId taxon(int v) const { return taxon_.at(static_cast<std::size_t>(v)); }
    bool is_leaf(int v) const { return taxon(v) >= 0; }
    const TaxonSet& leaves() const { return leaves_; }

    bool has_leaf(TaxonId x) const {
        return x >= 0 && static_cast<std::size_t>(x) < leaf_index_.size() && leaf_index_[static_cast<std::size_t>(x)] >= 0;
    }

    int leaf_vertex(TaxonId x) const {
        if (!has_leaf(x)) throw InputError("taxon " + std::to_string(x) + " is not a leaf of the tree");
        return leaf_index_[static_cast<std::size_t>(x)];
    }

    std::vector<int> interior_vertices() const {
        std::vector<int> out;
        for (std::size_t v = 0; v < adj_.size(); ++v)
            if (taxon_[v] < 0) out.push_back(static_cast<int>(v));
        return out;
    }

    bool is_binary() const {
        for (std::size_t v = 0; v < adj_.size(); ++v)
            if (taxon_[v] < 0 && adj_[v].size() != 3) return false;
        return true;
    }

    std::vector<int> distances_from(int source) const {
        std::vector<int> d(adj_.size(), -1);
        std::queue<int> q;
        d[static_cast<std::size_t>(source)] = 0;
        q.push(source);
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (auto w : adj_[static_cast<std::size_t>(v)])
                if (d[static_cast<std::size_t>(w)] < 0) {
                    d[static_cast<std::size_t>(w)] = d[static_cast<std::size_t>(v)] + 1;
                    q.push(w);
                }
        }
        return d;
    }

    /// Number of cherries: pairs of leaves adjacent to the same vertex.
    std::size_t cherry_count() const {
        std::size_t count = 0;
        for (std::size_t v = 0; v < adj_.size(); ++v) {
            if (taxon_[v] >= 0) continue;
            std::size_t leaves = 0;
            for (auto w : adj_[v]) leaves += taxon_[static_cast<std::size_t>(w)] >= 0 ? 1 : 0;
            count += leaves * (leaves - 1) / 2;
        }
        return count;
    }

private:
    void validate() {
        if (adj_.size() != taxon_.size()) throw InputError("adjacency and taxa sizes differ");
        const auto n = adj_.size();
        std::size_t edges = 0;
        TaxonId max_taxon = -1;
        for (std::size_t v = 0; v < n; ++v) {
            for (auto w : adj_[v]) {
                if (w < 0 || static_cast<std::size_t>(w) >= n || static_cast<std::size_t>(w) == v)
                    throw InputError("bad adjacency");
                const auto& back = adj_[static_cast<std::size_t>(w)];
                if (std::find(back.begin(), back.end(), static_cast<int>(v)) == back.end())
                    throw InputError("adjacency is not symmetric");
            }
            edges += adj_[v].size();
            if (taxon_[v] >= 0) {
                if (n > 1 && adj_[v].size() != 1) throw InputError("labelled vertex must be a leaf");
                max_taxon = std::max(max_taxon, taxon_[v]);
            } else if (adj_[v].size() < 3) {
                throw InputError("interior vertex with degree below 3");
            }
        }
        if (n && edges / 2 != n - 1) throw InputError("unrooted tree must have n-1 edges");
        if (n) {
            const auto d = distances_from(0);
            if (std::count(d.begin(), d.end(), -1)) throw InputError("unrooted tree is disconnected");
        }
        leaf_index_.assign(static_cast<std::size_t>(max_taxon + 1), -1);
        leaves_.clear();
        for (std::size_t v = 0; v < n; ++v) {
            if (taxon_[v] < 0) continue;
            auto& slot = leaf_index_[static_cast<std::size_t>(taxon_[v])];
            if (slot >= 0) throw InputError("taxon labels two leaves");
            slot = static_cast<int>(v);
            leaves_.push_back(taxon_[v]);
        }
        normalize(leaves_);
    }

    std::vector<std::vector<int>> adj_;
    std::vector<TaxonId> taxon_;
    std::vector<int> leaf_index_;
    TaxonSet leaves_;
};

/// The unique vertex shared by the three pairwise paths between the leaves of s.
inline int median(const UnrootedPhyloTree& tree, const TaxonSet& s_set) {
    TaxonSet s = s_set;
    normalize(s);
    if (s.size() != 3) throw InputError("median needs exactly three taxa");
    const auto d0 = tree.distances_from(tree.leaf_vertex(s[0]));
    const auto d1 = tree.distances_from(tree.leaf_vertex(s[1]));
    const auto d2 = tree.distances_from(tree.leaf_vertex(s[2]));
    // On a tree, v lies on all three paths iff d(x,v) + d(v,y) = d(x,y) for each pair.
    const auto l1 = static_cast<std::size_t>(tree.leaf_vertex(s[1]));
    const auto l2 = static_cast<std::size_t>(tree.leaf_vertex(s[2]));
    for (std::size_t v = 0; v < tree.size(); ++v)
        if (d0[v] + d1[v] == d0[l1] && d0[v] + d2[v] == d0[l2] && d1[v] + d2[v] == d1[l2])
            return static_cast<int>(v);
    throw InternalError("median vertex not found");
}

/// Newick for an unrooted tree, rooted at the interior vertex adjacent to the
/// leaf with the smallest label (that vertex becomes a multifurcating root).
inline std::string write_newick(const UnrootedPhyloTree& tree, const TaxonTable& taxa) {
    if (tree.size() == 0) throw InputError("cannot write an empty tree");
    if (tree.size() == 1) return taxa.label(tree.taxon(0)) + ";";
    if (tree.size() == 2) {
        const auto a = taxa.label(tree.taxon(0)), b = taxa.label(tree.taxon(1));
        return "(" + std::min(a, b) + "," + std::max(a, b) + ");";
    }
    int start = -1;
    std::string best;
    for (auto x : tree.leaves())
        if (start < 0 || taxa.label(x) < best) {
            best = taxa.label(x);
            start = tree.leaf_vertex(x);
        }
    const int root = tree.neighbours(start).front();
    std::vector<RootedPhyloTree::Vertex> vs(tree.size());
    std::vector<char> seen(tree.size(), 0);
    std::vector<int> stack{root};
    seen[static_cast<std::size_t>(root)] = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        vs[static_cast<std::size_t>(v)].taxon = tree.taxon(v);
        for (auto w : tree.neighbours(v))
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                vs[static_cast<std::size_t>(w)].parent = v;
                vs[static_cast<std::size_t>(v)].children.push_back(w);
                stack.push_back(w);
            }
    }
    return write_newick(RootedPhyloTree(std::move(vs), root), taxa);
}

}  // namespace setflex
