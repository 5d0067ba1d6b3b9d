#include <gtest/gtest.h>

#include "support.hpp"

using namespace setflex;

TEST(TextFormat, ParsesCommentsAndBlankLines) {
    const auto s = parse_set_system_text("# example\n a, b ,c\n\nabd_x,b\n  # trailing\nd,e,f # inline\n");
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s.member_label(0), "a,b,c");
    EXPECT_EQ(s.member_label(1), "abd_x,b");
    EXPECT_EQ(s.universe().labels(), (std::vector<std::string>{"a", "abd_x", "b", "c", "d", "e", "f"}));
}

TEST(TextFormat, Errors) {
    try {
        parse_set_system_text("a,b,c\na,,c\n");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_set_system_text("a,b\nb,a\n"), InputError);
    EXPECT_THROW(parse_set_system_text("a b,c\n"), InputError);
}

TEST(TextFormat, RoundTrip) {
    const auto s = testkit::sys({"def", "abc", "bce", "abd"});
    const auto text = write_set_system_text(s);
    EXPECT_EQ(text, "a,b,c\na,b,d\nb,c,e\nd,e,f\n");
    EXPECT_EQ(parse_set_system_text(text), s);
}

TEST(JsonFormat, RoundTripWithIsolatedTaxa) {
    const auto s = testkit::sys({"abc", "cde"}, {"z"});
    const auto j = write_set_system_json(s);
    EXPECT_EQ(j, R"({"sets":[["a","b","c"],["c","d","e"]],"taxa":["a","b","c","d","e","z"]})");
    EXPECT_EQ(parse_set_system_json(j), s);
    EXPECT_EQ(parse_set_system(j), s);
    const auto plain = testkit::sys({"abc"});
    EXPECT_EQ(write_set_system_json(plain), R"({"sets":[["a","b","c"]]})");
}

TEST(JsonFormat, Errors) {
    EXPECT_THROW(parse_set_system_json("{"), InputError);
    EXPECT_THROW(parse_set_system_json(R"({"set":[]})"), InputError);
    EXPECT_THROW(parse_set_system_json(R"({"sets":[["a",1]]})"), InputError);
    EXPECT_THROW(parse_set_system_json(R"({"sets":["abc"]})"), InputError);
    EXPECT_THROW(parse_set_system_json(R"({"sets":[["a","b"]],"taxa":"c"})"), InputError);
}

TEST(Dispatch, ExtraTaxa) {
    const auto s = parse_set_system("a,b,c\n", {"d"});
    EXPECT_EQ(s.universe().size(), 4u);
    const auto j = parse_set_system(R"({"sets":[["a","b","c"]]})", {"d"});
    EXPECT_EQ(j, s);
}

TEST(IoProperty, RandomRoundTrips) {
    std::mt19937_64 rng(61);
    for (int it = 0; it < 200; ++it) {
        const auto s = testkit::random_system(rng, 9, 1, 5, 1 + static_cast<int>(rng() % 10));
        EXPECT_EQ(parse_set_system_json(write_set_system_json(s)), s);
        if (s.leaf_set().size() == s.universe().size())
            EXPECT_EQ(parse_set_system_text(write_set_system_text(s)), s);
        else
            EXPECT_EQ(parse_set_system_text(write_set_system_text(s), s.universe().labels()), s);
    }
}
