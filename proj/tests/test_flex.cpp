#include <gtest/gtest.h>

#include "support.hpp"

using namespace setflex;
using testkit::sys;

namespace {

TaxonSet first_n(int n) {
    TaxonSet s;
    for (int i = 0; i < n; ++i) s.push_back(i);
    return s;
}

RootedPhyloTree newick(const std::string& text, TaxonTable& taxa) { return parse_newick(text, taxa); }

}  // namespace

TEST(Enumerate, Counts) {
    EXPECT_EQ(enumerate_binary_trees({0}).size(), 1u);
    EXPECT_EQ(enumerate_binary_trees({0, 1}).size(), 1u);
    EXPECT_EQ(enumerate_binary_trees(first_n(3)).size(), 3u);
    EXPECT_EQ(enumerate_binary_trees(first_n(4)).size(), 15u);
    EXPECT_EQ(enumerate_binary_trees(first_n(6)).size(), 945u);
    EXPECT_THROW(enumerate_binary_trees(first_n(9)), CapExceeded);
    EXPECT_THROW(enumerate_binary_trees({}), InputError);
    EXPECT_EQ(binary_tree_count(8), std::optional<std::uint64_t>(135135));
}

TEST(Enumerate, DistinctBinaryAndOnTheRightLeaves) {
    for (int m = 1; m <= 7; ++m) {
        const auto trees = enumerate_binary_trees(first_n(m));
        EXPECT_EQ(static_cast<long long>(trees.size()), testkit::double_factorial_count(m));
        std::set<std::string> forms;
        for (const auto& t : trees) {
            EXPECT_TRUE(t.is_binary());
            EXPECT_EQ(t.leaves(), first_n(m));
            forms.insert(canonical_form(t));
        }
        EXPECT_EQ(forms.size(), trees.size());
    }
}

TEST(Flexible, SixTaxa) {
    const auto t = sys({"abc", "abd", "bce", "def"});
    const auto rep = is_flexible_bruteforce(t);
    EXPECT_TRUE(rep.verdict);
    EXPECT_EQ(rep.assignments_checked, 81);

    const auto p = sys({"abc", "abd", "bce", "def", "bde"});
    const auto bad = is_flexible_bruteforce(p);
    EXPECT_FALSE(bad.verdict);
    ASSERT_TRUE(bad.counterexample.has_value());
    ASSERT_EQ(bad.counterexample->size(), p.size());
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ((*bad.counterexample)[i].leaves(), p[i]);
    EXPECT_FALSE(build_supertree(pooled_triples(*bad.counterexample)).compatible());
}

TEST(Flexible, SixTaxaAssignmentIsIncompatible) {
    auto taxa = TaxonTable::sorted({"a", "b", "c", "d", "e", "f"});
    std::vector<RootedPhyloTree> trees;
    for (const auto* nw : {"((a,b),c);", "((b,d),a);", "((b,c),e);", "((d,f),e);", "((b,e),d);"})
        trees.push_back(newick(nw, taxa));
    EXPECT_FALSE(build_supertree(pooled_triples(trees)).compatible());
}

TEST(Flexible, SingleMemberAndErrors) {
    EXPECT_TRUE(is_flexible_bruteforce(sys({"abcde"})).verdict);
    EXPECT_THROW(is_flexible_bruteforce(sys({"ab", "abc"})), SizeError);
    EXPECT_THROW(is_flexible_bruteforce(sys({"abc", "abd", "bce", "def"}), 80), CapExceeded);
    EXPECT_EQ(assignment_count(sys({"abcd", "abc"})), std::optional<long long>(45));
}

TEST(Count, Examples) {
    auto taxa = TaxonTable::sorted({"a", "b", "c", "d", "e", "f"});
    const auto abc = parse_triple("a,b|c", taxa);
    EXPECT_EQ(count_displaying(TripleSet{abc}, first_n(3)), 1);
    const auto two = make_triple_set({abc, parse_triple("d,e|f", taxa)});
    EXPECT_EQ(count_displaying(two, first_n(6)), 105);
    EXPECT_EQ(count_displaying(TripleSet{}, first_n(4)), 15);
    EXPECT_THROW(count_displaying(TripleSet{}, first_n(9)), CapExceeded);
    EXPECT_THROW(count_displaying(TripleSet{abc}, first_n(2)), InputError);

    std::vector<RootedPhyloTree> trees{newick("((a,b),c);", taxa)};
    EXPECT_EQ(count_displaying(std::span<const RootedPhyloTree>(trees), first_n(4)), 5);
}

TEST(Count, Formula) {
    EXPECT_EQ(disjoint_count_formula(3), 1u);
    EXPECT_EQ(disjoint_count_formula(6), 105u);
    EXPECT_EQ(disjoint_count_formula(9), 75075u);
    EXPECT_THROW(disjoint_count_formula(7), InputError);
    EXPECT_THROW(disjoint_count_formula(0), InputError);
}

TEST(Defining, Examples) {
    auto taxa = TaxonTable::sorted({"a", "b", "c", "d"});
    const auto t3 = newick("((a,b),c);", taxa);
    const auto d3 = defining_triples(t3);
    ASSERT_EQ(d3.size(), 1u);
    EXPECT_EQ(format_triple(d3[0], taxa), "a,b|c");
    EXPECT_TRUE(is_unique_display(d3));

    const auto t4 = newick("(((a,b),c),d);", taxa);
    const auto d4 = defining_triples(t4);
    ASSERT_EQ(d4.size(), 2u);
    EXPECT_EQ(format_triple(d4[0], taxa), "b,c|d");
    EXPECT_EQ(format_triple(d4[1], taxa), "a,b|c");
    EXPECT_EQ(count_displaying(d4, taxa.all()), 1);

    EXPECT_THROW(defining_triples(newick("(a,b,c);", taxa)), PreconditionError);
}

TEST(Defining, FanIsNotUnique) {
    auto taxa = TaxonTable::sorted({"1", "2", "3", "4", "5", "6"});
    std::vector<RootedTriple> r;
    for (const auto* j : {"3", "4", "5", "6"}) r.push_back(RootedTriple::make(taxa.id("1"), taxa.id("2"), taxa.id(j)));
    EXPECT_FALSE(is_unique_display(r));
    EXPECT_FALSE(is_unique_display(TripleSet{}, first_n(4)));
}

// ---------------------------------------------------------------------------
// properties

TEST(FlexProperty, DefiningTriplesDetermineTheTree) {
    std::mt19937_64 rng(41);
    for (int m = 3; m <= 5; ++m)
        for (const auto& t : enumerate_binary_trees(first_n(m))) {
            const auto d = defining_triples(t);
            EXPECT_EQ(d.size(), static_cast<std::size_t>(m - 2));
            EXPECT_TRUE(is_thin(SetSystem(testkit::letters(m), leaf_sets(d)), 3).verdict);
            EXPECT_TRUE(is_unique_display(d));
            const auto b = build_supertree(d);
            ASSERT_TRUE(b.compatible());
            EXPECT_TRUE(isomorphic(*b.tree, t));
        }
    for (int it = 0; it < 30; ++it) {
        const auto t = testkit::random_binary_tree(rng, first_n(6 + it % 2));
        const auto d = defining_triples(t);
        EXPECT_TRUE(is_unique_display(d));
    }
}

TEST(FlexProperty, BruteForceMatchesThinAndSlim) {
    std::mt19937_64 rng(42);
    int flexible = 0, rigid = 0;
    for (int it = 0; it < 150; ++it) {
        const auto s = testkit::random_system(rng, 6, 3, 3, 1 + static_cast<int>(rng() % 6));
        const auto rep = is_flexible_bruteforce(s);
        EXPECT_EQ(rep.verdict, is_thin(s, 3).verdict);
        (rep.verdict ? flexible : rigid) += 1;
        if (rep.verdict) {
            EXPECT_LE(static_cast<long long>(s.size()), static_cast<long long>(s.leaf_set().size()) - 2);
            const auto sub = testkit::random_selection(rng, s.size());
            if (!sub.empty()) { EXPECT_TRUE(is_flexible_bruteforce(s.subsystem(sub)).verdict); }
        }
    }
    EXPECT_GT(flexible, 20);
    EXPECT_GT(rigid, 20);
    for (int it = 0; it < 40; ++it) {
        const auto s = testkit::random_system(rng, 7, 3, 4, 1 + static_cast<int>(rng() % 4));
        const auto total = assignment_count(s);
        if (!total || *total > 200000) continue;
        EXPECT_EQ(is_flexible_bruteforce(s).verdict, is_slim(s).verdict);
    }
}

TEST(FlexProperty, FormulaMatchesEnumeration) {
    for (int n : {3, 6}) {
        std::vector<RootedTriple> r;
        for (int k = 0; k < n / 3; ++k) r.push_back(RootedTriple::make(3 * k, 3 * k + 1, 3 * k + 2));
        EXPECT_EQ(static_cast<std::uint64_t>(count_displaying(r, first_n(n))), disjoint_count_formula(n));
    }
}
