#include <gtest/gtest.h>

#include "support.hpp"

using namespace setflex;
using testkit::select;
using testkit::sys;

namespace {

const std::vector<std::string> six_taxa = {"abc", "abd", "bce", "def"};
const std::vector<std::string> six_taxa_plus = {"abc", "abd", "bce", "def", "bde"};

}  // namespace

TEST(SetSystem, CanonicalOrderAndUniverse) {
    const auto s = sys({"def", "abc", "bce", "abd"});
    ASSERT_EQ(s.size(), 4u);
    EXPECT_EQ(s.member_label(0), "a,b,c");
    EXPECT_EQ(s.member_label(1), "a,b,d");
    EXPECT_EQ(s.member_label(2), "b,c,e");
    EXPECT_EQ(s.member_label(3), "d,e,f");
    EXPECT_EQ(s.universe().size(), 6u);
    EXPECT_EQ(s.leaf_set().size(), 6u);
    EXPECT_EQ(s.uniform_size(), std::optional<std::size_t>(3));
}

TEST(SetSystem, RejectsMalformedMembers) {
    EXPECT_THROW(sys({"abc", "cba"}), InputError);
    EXPECT_THROW(sys({"aab"}), InputError);
    EXPECT_THROW(SetSystem(testkit::letters(3), {TaxonSet{}}), InputError);
    EXPECT_THROW(SetSystem(testkit::letters(3), {TaxonSet{0, 7}}), InputError);
}

TEST(SetSystem, IsolatedTaxaStayInTheUniverse) {
    const auto s = sys({"abc"}, {"d"});
    EXPECT_EQ(s.universe().size(), 4u);
    EXPECT_EQ(s.leaf_set().size(), 3u);
    EXPECT_EQ(occurrence_count(s, s.universe().id("d")), 0);
}

TEST(Excess, UniformSixTaxa) {
    const auto t = sys(six_taxa);
    EXPECT_EQ(excess_uniform(t, SubsetSelection::all(4), 3), 0);
    const auto tp = sys(six_taxa_plus);
    EXPECT_EQ(excess_uniform(tp, SubsetSelection::all(5), 3), -1);
    EXPECT_EQ(excess_uniform(t, SubsetSelection({0}), 3), 0);
}

TEST(Excess, UniformRejectsBadInput) {
    const auto t = sys({"abc", "abcd"});
    EXPECT_THROW(excess_uniform(t, SubsetSelection::all(2), 3), SizeError);
    EXPECT_THROW(excess_uniform(sys(six_taxa), SubsetSelection{}, 3), InputError);
}

TEST(Excess, General) {
    EXPECT_EQ(excess_general(sys({"abcd"}), SubsetSelection::all(1)), 0);
    EXPECT_EQ(excess_general(sys({"abcd", "cdef"}), SubsetSelection::all(2)), 0);
    EXPECT_EQ(excess_general(sys(six_taxa), SubsetSelection::all(4)), 0);
    EXPECT_THROW(excess_general(sys({"ab", "abc"}), SubsetSelection::all(2)), SizeError);
}

TEST(Surplus, SigmaGamma) {
    const auto t = sys(six_taxa);
    EXPECT_EQ(sigma(t, SubsetSelection::all(4)), 2);
    EXPECT_EQ(gamma(t, SubsetSelection::all(4)), 2);
    EXPECT_EQ(sigma(t, SubsetSelection{}), 0);
    EXPECT_EQ(gamma(t, SubsetSelection{}), 0);
    EXPECT_EQ(sigma(sys(six_taxa_plus), SubsetSelection::all(5)), 1);
    EXPECT_THROW(gamma(sys({"a", "abc"}), SubsetSelection::all(2)), SizeError);
}

TEST(Thin, Exhaustive) {
    EXPECT_TRUE(is_thin_exhaustive(sys(six_taxa), 3).verdict);
    const auto tp = sys(six_taxa_plus);
    const auto rep = is_thin_exhaustive(tp, 3);
    EXPECT_FALSE(rep.verdict);
    EXPECT_EQ(rep.value, -1);
    ASSERT_NE(rep.witness(), nullptr);
    // ties on excess go to the smaller subset; tau' itself also reaches -1
    EXPECT_EQ(*rep.witness(), select(tp, {"abc", "abd", "bce", "bde"}));
    EXPECT_EQ(sigma(tp, SubsetSelection::all(5)) - 2, -1);
    EXPECT_TRUE(is_thin_exhaustive(sys({"abc", "cde", "bef", "adf"}), 3).verdict);
}

TEST(Thin, ExhaustiveCap) {
    std::vector<std::string> many;
    for (char c = 'd'; c <= 'u'; ++c) many.push_back(std::string("ab") + c);
    const auto s = sys(many);
    ASSERT_GT(s.size(), default_exhaustive_cap);
    try {
        is_thin_exhaustive(s, 3);
        FAIL() << "expected CapExceeded";
    } catch (const CapExceeded& e) {
        EXPECT_NE(std::string(e.what()).find("is_thin"), std::string::npos);
    }
    EXPECT_TRUE(is_thin_exhaustive(s, 3, 20).verdict);
}

TEST(Slim, Exhaustive) {
    EXPECT_TRUE(is_slim_exhaustive(sys({"abcd", "cdef"})).verdict);
    const auto rep = is_slim_exhaustive(sys({"abcd", "abce"}));
    EXPECT_FALSE(rep.verdict);
    EXPECT_EQ(rep.value, -1);
    EXPECT_TRUE(is_slim_exhaustive(sys({"abcdefg"})).verdict);
    EXPECT_THROW(is_slim_exhaustive(sys({"ab", "abc"})), SizeError);
}

TEST(Thin, WitnessTieBreak) {
    // two disjoint violating pairs; the canonically first one is reported
    const auto s = sys({"abcd", "abce", "fghi", "fghj"});
    const auto rep = is_slim_exhaustive(s);
    ASSERT_FALSE(rep.verdict);
    EXPECT_EQ(rep.value, -1);
    EXPECT_EQ(*rep.witness(), SubsetSelection({0, 1}));
}

TEST(Occurrence, Counts) {
    const auto t = sys(six_taxa);
    EXPECT_EQ(occurrence_count(t, t.universe().id("b")), 3);
    EXPECT_EQ(occurrence_count(t, t.universe().id("f")), 1);
    EXPECT_THROW(occurrence_count(t, 99), InputError);
}

TEST(Submodular, Examples) {
    const auto t = sys(six_taxa);
    const auto a = select(t, {"abc", "abd"});
    const auto b = select(t, {"abd", "bce"});
    const auto c = check_submodular_pair(Measure::sigma, t, a, b);
    EXPECT_TRUE(c.holds);
    EXPECT_EQ(c.f_first, 2);
    EXPECT_EQ(c.f_second, 3);
    EXPECT_EQ(c.f_union, 2);
    EXPECT_EQ(c.f_intersection, 2);
    const auto same = check_submodular_pair(Measure::gamma, t, a, a);
    EXPECT_TRUE(same.holds);
    EXPECT_EQ(same.f_first + same.f_second, same.f_union + same.f_intersection);
}

TEST(Patchwork, Examples) {
    const auto two = patchwork_check(sys({"abcd", "cdef"}));
    EXPECT_TRUE(two.verdict);
    EXPECT_EQ(two.family.size(), 3u);
    const auto one = patchwork_check(sys({"abc"}));
    EXPECT_TRUE(one.verdict);
    EXPECT_EQ(one.family.size(), 1u);
    EXPECT_TRUE(patchwork_check(sys(six_taxa)).verdict);
    EXPECT_THROW(patchwork_check(sys({"abcd", "abce"})), PreconditionError);
}

// ---------------------------------------------------------------------------
// properties

TEST(SetsysProperty, ExhaustiveMinimumMatchesNaive) {
    std::mt19937_64 rng(11);
    for (int it = 0; it < 300; ++it) {
        const auto s = testkit::random_system(rng, 7, 3, 5, 1 + static_cast<int>(rng() % 9));
        for (auto m : {Measure::sigma, Measure::gamma}) {
            const auto rep = exhaustive_minimum(m, s);
            EXPECT_EQ(rep.value, testkit::naive_minimum(m, s));
            EXPECT_EQ(evaluate(m, s, rep.witness), rep.value);
            EXPECT_FALSE(rep.witness.empty());
        }
    }
}

TEST(SetsysProperty, ExcessIdentities) {
    std::mt19937_64 rng(12);
    for (int it = 0; it < 300; ++it) {
        const int r = 2 + static_cast<int>(rng() % 3);
        const auto s = testkit::random_system(rng, 7, r, r, 1 + static_cast<int>(rng() % 8));
        auto sel = testkit::random_selection(rng, s.size());
        if (sel.empty()) sel = SubsetSelection({0});
        EXPECT_EQ(excess_uniform(s, sel, r), sigma(s, sel) - (r - 1));
        if (r == 3) { EXPECT_EQ(excess_general(s, sel), excess_uniform(s, sel, 3)); }
    }
}

TEST(SetsysProperty, SlimImpliesThin) {
    std::mt19937_64 rng(13);
    int slim_seen = 0;
    for (int it = 0; it < 400; ++it) {
        const int r = 3 + static_cast<int>(rng() % 2);
        const auto s = testkit::random_system(rng, 8, r, r, 1 + static_cast<int>(rng() % 6));
        if (!is_slim_exhaustive(s).verdict) continue;
        ++slim_seen;
        EXPECT_TRUE(is_thin_exhaustive(s, r).verdict);
    }
    EXPECT_GT(slim_seen, 50);
}

TEST(SetsysProperty, Submodularity) {
    std::mt19937_64 rng(14);
    for (int it = 0; it < 1000; ++it) {
        const auto s = testkit::random_system(rng, 8, 2, 5, 1 + static_cast<int>(rng() % 10));
        const auto a = testkit::random_selection(rng, s.size());
        const auto b = testkit::random_selection(rng, s.size());
        EXPECT_TRUE(check_submodular_pair(Measure::sigma, s, a, b).holds);
        EXPECT_TRUE(check_submodular_pair(Measure::gamma, s, a, b).holds);
    }
}

TEST(SetsysProperty, ThinHeredityAndCountingBounds) {
    std::mt19937_64 rng(15);
    int thin_seen = 0;
    for (int it = 0; it < 400; ++it) {
        const int r = 2 + static_cast<int>(rng() % 3);
        const auto s = testkit::random_system(rng, 7, r, r, 1 + static_cast<int>(rng() % 7));
        if (!is_thin_exhaustive(s, r).verdict) continue;
        ++thin_seen;
        const auto n = static_cast<long long>(s.leaf_set().size());
        EXPECT_LE(static_cast<long long>(s.size()), n - r + 1);
        bool low = false;
        for (auto x : s.leaf_set()) low = low || occurrence_count(s, x) <= r - 1;
        EXPECT_TRUE(low);
        const auto sub = testkit::random_selection(rng, s.size());
        if (!sub.empty()) { EXPECT_TRUE(is_thin_exhaustive(s.subsystem(sub), r).verdict); }
    }
    EXPECT_GT(thin_seen, 50);
}

TEST(SetsysProperty, PatchworkOnSlimSystems) {
    std::mt19937_64 rng(16);
    int seen = 0;
    for (int it = 0; it < 300 && seen < 60; ++it) {
        const auto s = testkit::random_system(rng, 8, 3, 4, 2 + static_cast<int>(rng() % 6));
        if (!is_slim_exhaustive(s).verdict) continue;
        ++seen;
        EXPECT_TRUE(patchwork_check(s).verdict);
    }
    EXPECT_GT(seen, 20);
}
