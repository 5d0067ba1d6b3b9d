#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

using namespace setflex;
using testkit::sys;

namespace {

void expect_valid_caterpillar(const SetSystem& s, const MedianRepresentation& rep) {
    EXPECT_TRUE(rep.verified);
    EXPECT_TRUE(rep.tree.is_binary());
    EXPECT_EQ(rep.tree.leaves(), s.universe().all());
    EXPECT_EQ(rep.tree.cherry_count(), 2u);
    EXPECT_EQ(rep.tree.interior_vertices().size(), s.universe().size() - 2);
    std::set<int> images;
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_EQ(rep.vertex_map[i], testkit::median_by_paths(rep.tree, s[i]));
        EXPECT_FALSE(rep.tree.is_leaf(rep.vertex_map[i]));
        images.insert(rep.vertex_map[i]);
    }
    EXPECT_EQ(images.size(), s.size());
}

}  // namespace

TEST(Caterpillar, FromOrder) {
    const auto t = caterpillar_from_order({0, 1, 2, 3, 4});
    EXPECT_TRUE(t.is_binary());
    EXPECT_EQ(t.cherry_count(), 2u);
    EXPECT_EQ(t.interior_vertices().size(), 3u);
    EXPECT_EQ(median(t, {0, 1, 2}), 0);
    EXPECT_EQ(median(t, {0, 2, 4}), 1);
    EXPECT_EQ(median(t, {2, 3, 4}), 2);
    EXPECT_THROW(caterpillar_from_order({0, 1}), InputError);
}

TEST(MedianRepresentation, FiveTriples) {
    const auto s = sys({"abc", "cde", "aef", "beg", "adg"});
    const auto rep = caterpillar_median_representation(s);
    expect_valid_caterpillar(s, rep);
    EXPECT_EQ(rep.fallback_searches, 0);
}

TEST(MedianRepresentation, SingleTripleWithExtraTaxon) {
    const auto s = sys({"abc"}, {"d"});
    const auto rep = caterpillar_median_representation(s);
    expect_valid_caterpillar(s, rep);
    EXPECT_EQ(rep.appended_taxa, TaxonSet{s.universe().id("d")});
}

TEST(MedianRepresentation, SixTaxa) {
    const auto s = sys({"abc", "abd", "bce", "def"});
    expect_valid_caterpillar(s, caterpillar_median_representation(s));
}

TEST(MedianRepresentation, Preconditions) {
    EXPECT_THROW(caterpillar_median_representation(sys({"abc", "abd", "bce", "def", "bde"})), PreconditionError);
    EXPECT_THROW(caterpillar_median_representation(sys({"abc"})), PreconditionError);
    EXPECT_THROW(caterpillar_median_representation(sys({"abcd"})), SizeError);
}

TEST(MedianCheck, Examples) {
    const auto s = sys({"abc", "cde", "aef", "beg", "adg"});
    const auto rep = caterpillar_median_representation(s);
    EXPECT_TRUE(verify_median_injective(rep.tree, s).injective);

    auto taxa = TaxonTable::sorted({"a", "b", "c", "d"});
    const auto quartet = UnrootedPhyloTree::from_rooted(parse_newick("((a,b),(c,d));", taxa));
    const auto clash = sys({"abc", "abd"});
    const auto c = verify_median_injective(quartet, clash);
    EXPECT_FALSE(c.injective);
    ASSERT_TRUE(c.collision.has_value());
    EXPECT_EQ(*c.collision, (std::pair<std::size_t, std::size_t>{0, 1}));
    EXPECT_TRUE(verify_median_injective(quartet, sys({"abc"})).injective);
    EXPECT_THROW(verify_median_injective(quartet, sys({"abe"}, {"c", "d"})), InputError);
}

TEST(LcaRepresentation, Examples) {
    const auto path = sys({"ab", "bc"});
    const auto r = lca_caterpillar_representation(path);
    EXPECT_TRUE(r.verified);
    EXPECT_NE(r.vertex_map[0], r.vertex_map[1]);
    EXPECT_EQ(r.tree.leaf_count(), 3u);

    const auto single = lca_caterpillar_representation(sys({"ab"}));
    EXPECT_TRUE(single.verified);
    EXPECT_EQ(single.tree.leaf_count(), 2u);

    const auto chain = sys({"ab", "bc", "cd"});
    const auto c = lca_caterpillar_representation(chain);
    EXPECT_TRUE(c.verified);
    EXPECT_EQ(std::set<int>(c.vertex_map.begin(), c.vertex_map.end()).size(), 3u);

    const auto extra = lca_caterpillar_representation(sys({"ab"}, {"c"}));
    EXPECT_EQ(extra.tree.leaf_count(), 3u);
    EXPECT_EQ(extra.appended_taxa.size(), 1u);

    EXPECT_THROW(lca_caterpillar_representation(sys({"ab", "bc", "ac"})), PreconditionError);
    EXPECT_THROW(lca_caterpillar_representation(sys({"abc"})), SizeError);
}

TEST(TotalOrder, Examples) {
    const TaxonSet abc{0, 1, 2};
    const auto ok = extend_to_total_order(abc, {{0, 1}, {1, 2}});
    ASSERT_TRUE(ok.order.has_value());
    EXPECT_EQ(*ok.order, (std::vector<TaxonId>{0, 1, 2}));
    const auto cyc = extend_to_total_order(abc, {{0, 1}, {1, 2}, {2, 0}});
    EXPECT_FALSE(cyc.order.has_value());
    EXPECT_EQ(cyc.cycle, (std::vector<TaxonId>{0, 1, 2}));
    const auto empty = extend_to_total_order({2, 0, 1}, {});
    EXPECT_EQ(*empty.order, (std::vector<TaxonId>{0, 1, 2}));
    EXPECT_EQ(*extend_to_total_order(abc, {{2, 0}}).order, (std::vector<TaxonId>{1, 2, 0}));
    EXPECT_THROW(extend_to_total_order(abc, {{0, 5}}), InputError);
}

TEST(TotalOrderFlexible, Examples) {
    for (auto mode : {OrderMode::bruteforce, OrderMode::forest}) {
        EXPECT_TRUE(is_total_order_flexible(sys({"ab", "bc"}), mode).verdict);
        EXPECT_TRUE(is_total_order_flexible(sys({"ab"}), mode).verdict);
        EXPECT_FALSE(is_total_order_flexible(sys({"ab", "bc", "ac"}), mode).verdict);
    }
    const auto rep = is_total_order_flexible(sys({"ab", "bc", "ac"}), OrderMode::bruteforce);
    const auto* w = std::get_if<OrderWitness>(&rep.certificate);
    ASSERT_NE(w, nullptr);
    // members in canonical order ab, ac, bc: a<b, c<a, b<c
    EXPECT_EQ(w->orientation, (Orientation{{0, 1}, {2, 0}, {1, 2}}));
    EXPECT_EQ(w->cycle, (std::vector<TaxonId>{0, 1, 2}));
    EXPECT_EQ(rep.stats.at("orientations_checked"), 3);
}

// ---------------------------------------------------------------------------
// properties

TEST(RepresentProperty, RandomThinTripleSystems) {
    std::mt19937_64 rng(51);
    int built = 0;
    for (int it = 0; it < 600 && built < 150; ++it) {
        const int n = 4 + static_cast<int>(rng() % 6);
        const auto s = testkit::random_system(rng, n, 3, 3, 1 + static_cast<int>(rng() % (n - 2)));
        if (!is_thin(s, 3).verdict) continue;
        ++built;
        const auto rep = caterpillar_median_representation(s);
        expect_valid_caterpillar(s, rep);
        EXPECT_EQ(rep.fallback_searches, 0);
        EXPECT_LE(s.size(), s.universe().size() - 2);
    }
    EXPECT_GT(built, 100);
}

TEST(RepresentProperty, PairSystemsThreeWayAgreement) {
    std::mt19937_64 rng(52);
    for (int it = 0; it < 300; ++it) {
        const auto s = testkit::random_system(rng, 6, 2, 2, 1 + static_cast<int>(rng() % 9));
        const bool brute = is_total_order_flexible(s, OrderMode::bruteforce).verdict;
        EXPECT_EQ(brute, is_total_order_flexible(s, OrderMode::forest).verdict);
        EXPECT_EQ(brute, sigma_star(s).value >= 1);
        if (brute) {
            const auto rep = lca_caterpillar_representation(s);
            EXPECT_TRUE(rep.verified);
            std::set<int> images;
            for (std::size_t i = 0; i < s.size(); ++i) {
                EXPECT_EQ(rep.vertex_map[i], lca(rep.tree, s[i]));
                images.insert(rep.vertex_map[i]);
            }
            EXPECT_EQ(images.size(), s.size());
        }
    }
}
