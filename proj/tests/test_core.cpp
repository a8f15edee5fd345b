#include <doctest.h>

#include <random>
#include <set>

#include "swtag/core.hpp"

using namespace swtag;

TEST_SUITE_BEGIN("core");

TEST_CASE("EOS is reserved at id 0") {
    TagInventory tags;
    CHECK(tags.size() == 1);
    CHECK(tags.name(kEosTag) == "EOS");
    CHECK_THROWS(tags.add_tag("EOS"));

    AmbiguityInventory inv;
    CHECK(inv.size() == 1);
    CHECK(inv.tags_of(kEosClass) == std::vector<TagId>{kEosTag});
}

TEST_CASE("interning is idempotent and order-insensitive") {
    TagInventory tags;
    TagId n = tags.add_tag("noun");
    TagId v = tags.add_tag("verb");
    AmbiguityInventory inv;

    ClassId a = inv.intern({n}, tags);
    CHECK(inv.intern({n}, tags) == a);

    ClassId nv = inv.intern({n, v}, tags);
    CHECK(inv.intern({v, n}, tags) == nv);
    CHECK(nv != a);

    // three distinct sets -> inventory grows by exactly three (plus {EOS})
    TagId d = tags.add_tag("det");
    inv.intern({d}, tags);
    CHECK(inv.size() == 4);
}

TEST_CASE("intern rejects bad input") {
    TagInventory tags;
    tags.add_tag("noun");
    AmbiguityInventory inv;
    CHECK_THROWS(inv.intern({}, tags));
    CHECK_THROWS(inv.intern({42}, tags));
}

TEST_CASE("tags_of returns ascending sets") {
    TagInventory tags;
    TagId n = tags.add_tag("noun");
    TagId v = tags.add_tag("verb");
    AmbiguityInventory inv;
    ClassId nv = inv.intern({v, n}, tags);
    CHECK(inv.tags_of(nv) == std::vector<TagId>{n, v});
    CHECK(inv.tags_of(inv.intern({n}, tags)) == std::vector<TagId>{n});
    CHECK_THROWS(inv.tags_of(99));
}

TEST_CASE("tag_sequences enumerates the Cartesian product") {
    TagInventory tags;
    TagId d = tags.add_tag("det");
    TagId n = tags.add_tag("noun");
    TagId v = tags.add_tag("verb");
    AmbiguityInventory inv;
    ClassId cd = inv.intern({d}, tags);
    ClassId cnv = inv.intern({n, v}, tags);

    std::vector<ClassId> just_d{cd};
    auto single = tag_sequences(just_d, inv);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == IdSeq{d});

    std::vector<ClassId> window{cd, cnv};
    auto seqs = tag_sequences(window, inv);
    REQUIRE(seqs.size() == 2);
    CHECK(seqs[0] == IdSeq{d, n});
    CHECK(seqs[1] == IdSeq{d, v});

    auto empty = tag_sequences(std::span<const ClassId>{}, inv);
    REQUIRE(empty.size() == 1);
    CHECK(empty[0].empty());
}

TEST_CASE("product law: |T'(C)| is the product of class sizes") {
    std::mt19937_64 rng(2024);
    for (int round = 0; round < 50; ++round) {
        TagInventory tags;
        std::uniform_int_distribution<int> tag_count(1, 5);
        int n = tag_count(rng);
        for (int i = 0; i < n; ++i) tags.add_tag("t" + std::to_string(i));
        AmbiguityInventory inv;
        std::uniform_int_distribution<int> len_dist(0, 4);
        std::uniform_int_distribution<std::uint32_t> pick(1, tags.size() - 1);
        std::vector<ClassId> window;
        std::size_t expected = 1;
        int len = len_dist(rng);
        for (int i = 0; i < len; ++i) {
            std::vector<TagId> set;
            std::uniform_int_distribution<int> size_dist(1, n);
            int size = size_dist(rng);
            for (int j = 0; j < size; ++j) set.push_back(pick(rng));
            ClassId id = inv.intern(std::move(set), tags);
            window.push_back(id);
            expected *= inv.tags_of(id).size();
        }
        CHECK(tag_sequences(window, inv).size() == expected);
        CHECK(tag_sequence_count(window, inv) == expected);

        // singleton-only windows admit exactly one sequence
        std::vector<ClassId> singletons;
        for (int i = 0; i < len; ++i)
            singletons.push_back(inv.intern({pick(rng)}, tags));
        CHECK(tag_sequences(singletons, inv).size() == 1);
    }
}

TEST_CASE("window spec round-trips through the position syntax") {
    CHECK(WindowSpec::parse("-1,+1") == WindowSpec{1, 1});
    CHECK(WindowSpec::parse("-2,-1") == WindowSpec{2, 0});
    CHECK(WindowSpec::parse("+1") == WindowSpec{0, 1});
    CHECK(WindowSpec{1, 1}.to_string() == "-1,+1");
    CHECK(WindowSpec{2, 0}.to_string() == "-2,-1");
    CHECK(WindowSpec{0, 2}.to_string() == "+1,+2");
    CHECK(WindowSpec::parse(WindowSpec{3, 2}.to_string()) == WindowSpec{3, 2});

    CHECK_THROWS(WindowSpec::parse(""));
    CHECK_THROWS(WindowSpec::parse("-2"));       // gap: -1 missing
    CHECK_THROWS(WindowSpec::parse("-1,-1"));    // duplicate
    CHECK_THROWS(WindowSpec::parse("0"));
    CHECK_THROWS(WindowSpec::parse("-4,-3,-2,-1"));  // beyond the ceiling
}

TEST_SUITE_END();
