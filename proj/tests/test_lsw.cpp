#include <doctest.h>

#include <cmath>
#include <random>

#include "generators.hpp"
#include "oracles.hpp"
#include "swtag/lsw_tagger.hpp"

using namespace swtag;

namespace {

struct Small {
    TagInventory tags;
    AmbiguityInventory inv;
    TagId d, n, v;
    ClassId cd, cn, cv, cnv;

    Small() {
        d = tags.add_tag("det");
        n = tags.add_tag("noun");
        v = tags.add_tag("verb");
        cd = inv.intern({d}, tags);
        cn = inv.intern({n}, tags);
        cv = inv.intern({v}, tags);
        cnv = inv.intern({n, v}, tags);
    }
};

}  // namespace

TEST_SUITE_BEGIN("lsw");

TEST_CASE("lsw_init spreads window mass uniformly over tag sequences") {
    Small s;
    WindowCountTable counts;
    counts.spec = {1, 1};
    counts.by_context[IdSeq{s.cd, kEosClass}][s.cnv] = 4;
    counts.total = 4;

    LswModel model = lsw_init(counts, s.inv);
    CHECK_FALSE(model.rules_applied);
    CHECK(model.value(IdSeq{s.d, s.n, kEosTag}) == doctest::Approx(2.0));
    CHECK(model.value(IdSeq{s.d, s.v, kEosTag}) == doctest::Approx(2.0));

    // all-singleton window: one sequence takes everything
    WindowCountTable sing;
    sing.spec = {1, 1};
    sing.by_context[IdSeq{s.cd, s.cv}][s.cn] = 3;
    sing.total = 3;
    LswModel m2 = lsw_init(sing, s.inv);
    CHECK(m2.value(IdSeq{s.d, s.n, s.v}) == doctest::Approx(3.0));
}

TEST_CASE("rule-constrained init zeroes invalid sequences, keeps the mass") {
    Small s;
    WindowCountTable counts;
    counts.spec = {1, 1};
    counts.by_context[IdSeq{s.cd, kEosClass}][s.cnv] = 4;
    counts.total = 4;

    RuleSet rules;
    rules.add_forbid(s.d, s.v);
    LswModel model = lsw_init(counts, s.inv, &rules);
    CHECK(model.rules_applied);
    CHECK(model.value(IdSeq{s.d, s.n, kEosTag}) == doctest::Approx(4.0));
    CHECK(model.value(IdSeq{s.d, s.v, kEosTag}) == 0.0);
    // the zero entry is stored, not merely absent
    CHECK(model.table.count(IdSeq{s.d, s.v, kEosTag}) == 1);
    CHECK(model.total_mass() == doctest::Approx(4.0));
}

TEST_CASE("enforce rules constrain the init like forbid rules") {
    Small s;
    WindowCountTable counts;
    counts.spec = {1, 1};
    counts.by_context[IdSeq{s.cd, kEosClass}][s.cnv] = 4;
    counts.total = 4;
    RuleSet rules;
    rules.add_enforce(s.d, {s.n});  // det may only precede noun
    LswModel model = lsw_init(counts, s.inv, &rules);
    CHECK(model.value(IdSeq{s.d, s.n, kEosTag}) == doctest::Approx(4.0));
    CHECK(model.value(IdSeq{s.d, s.v, kEosTag}) == 0.0);
}

TEST_CASE("a window forbidden entirely falls back to the uniform split") {
    Small s;
    WindowCountTable counts;
    counts.spec = {1, 0};
    counts.by_context[IdSeq{s.cd}][s.cd] = 2;
    counts.total = 2;
    RuleSet rules;
    rules.add_forbid(s.d, s.d);
    LswModel model = lsw_init(counts, s.inv, &rules);
    // mass kept despite every sequence being invalid
    CHECK(model.value(IdSeq{s.d, s.d}) == doctest::Approx(2.0));
    CHECK(model.total_mass() == doctest::Approx(2.0));
}

TEST_CASE("lsw_iterate keeps fixed points and conserves global mass") {
    Small s;
    SUBCASE("all-singleton corpora are fixed points") {
        WindowCountTable counts;
        counts.spec = {1, 1};
        counts.by_context[IdSeq{s.cd, s.cv}][s.cn] = 5;
        counts.by_context[IdSeq{kEosClass, s.cn}][s.cd] = 2;
        counts.total = 7;
        LswModel model = lsw_init(counts, s.inv);
        LswModel next = lsw_iterate(model, counts, s.inv);
        CHECK(lsw_max_relative_change(model, next) == doctest::Approx(0.0));
    }

    SUBCASE("global conservation on random corpora") {
        std::mt19937_64 rng(31);
        for (int round = 0; round < 20; ++round) {
            auto lang = gen::make_language(rng, 5, 7);
            auto text = gen::make_text(rng, lang, 250);
            auto counts = count_windows(text, {1, 1});
            LswModel model = lsw_init(counts, lang.classes);
            double expected = static_cast<double>(counts.total);
            CHECK(std::abs(model.total_mass() - expected) <= 1e-9 * expected);
            for (int k = 0; k < 4; ++k) {
                model = lsw_iterate(model, counts, lang.classes);
                CHECK(std::abs(model.total_mass() - expected) <= 1e-9 * expected);
            }
        }
    }
}

TEST_CASE("entries zeroed by rules stay exactly zero through training") {
    std::mt19937_64 rng(32);
    for (int round = 0; round < 20; ++round) {
        auto lang = gen::make_language(rng, 5, 6);
        auto text = gen::make_text(rng, lang, 120);
        auto counts = count_windows(text, {1, 1});
        RuleSet rules = gen::make_forbid_rules(rng, lang, 4);

        LswModel init = lsw_init(counts, lang.classes, &rules);
        LswModel model = init;
        for (int k = 0; k < 8; ++k) model = lsw_iterate(model, counts, lang.classes);
        for (const auto& [seq, v0] : init.table) {
            if (v0 == 0.0) CHECK(model.value(seq) == 0.0);
            CHECK(model.value(seq) >= 0.0);
        }
    }
}

TEST_CASE("no-rules init equals init with an empty rule set") {
    std::mt19937_64 rng(33);
    auto lang = gen::make_language(rng, 5, 6);
    auto text = gen::make_text(rng, lang, 150);
    auto counts = count_windows(text, {1, 1});
    RuleSet empty;
    LswModel with = lsw_init(counts, lang.classes, &empty);
    LswModel without = lsw_init(counts, lang.classes);
    REQUIRE(with.table.size() == without.table.size());
    for (const auto& [seq, v] : without.table)
        CHECK(with.value(seq) == doctest::Approx(v).epsilon(1e-15));
}

TEST_CASE("lsw_train matches the brute-force reference") {
    std::mt19937_64 rng(34);
    for (int round = 0; round < 12; ++round) {
        auto lang = gen::make_language(rng, 4, 5);
        auto text = gen::make_text(rng, lang, 50, 11);
        WindowSpec spec{1, 1};
        auto counts = count_windows(text, spec);
        auto flat = oracle::flat_window_counts(text, spec);
        bool with_rules = round % 2 == 1;
        RuleSet rules;
        if (with_rules) rules = gen::make_forbid_rules(rng, lang, 3);

        for (int k : {0, 1, 3, 8}) {
            LswModel model = lsw_train(counts, lang.classes,
                                       with_rules ? &rules : nullptr, {k, 0.0});
            auto expected =
                oracle::lsw_reference(flat, lang.classes, lang.tags.size(), spec,
                                      with_rules ? &rules : nullptr, k);
            for (const auto& [seq, v] : model.table) {
                auto it = expected.find(seq);
                long double want = it == expected.end() ? 0.0L : it->second;
                CHECK(std::abs(v - static_cast<double>(want)) <= 1e-12);
            }
            for (const auto& [seq, want] : expected)
                CHECK(std::abs(model.value(seq) - static_cast<double>(want)) <=
                      1e-12);
        }
    }
}

TEST_CASE("realized table size respects the parameter-space bound") {
    std::mt19937_64 rng(35);
    for (int round = 0; round < 15; ++round) {
        auto lang = gen::make_language(rng, 4, 12);  // |Σ| can exceed |Γ|
        auto text = gen::make_text(rng, lang, 400);
        for (WindowSpec spec : {WindowSpec{1, 1}, WindowSpec{1, 0}, WindowSpec{2, 1}}) {
            auto counts = count_windows(text, spec);
            LswModel model = lsw_train(counts, lang.classes, nullptr, {2, 0.0});
            CHECK(static_cast<double>(model.entry_count()) <=
                  LswModel::param_bound(spec, lang.tags.size()));
        }
    }
}

TEST_CASE("lsw_tag sums scores over compatible sequences") {
    Small s;
    AmbiguityInventory& inv = s.inv;
    ClassId cda = inv.intern({s.d, s.n}, s.tags);  // an ambiguous left class

    LswModel model;
    model.spec = {1, 1};
    // scores for center noun: (d,n,EOS)=4 + (n,n,EOS)=2 = 6
    // scores for center verb: (d,v,EOS)=1 + (n,v,EOS)=1 = 2
    model.table[IdSeq{s.d, s.n, kEosTag}] = 4.0;
    model.table[IdSeq{s.n, s.n, kEosTag}] = 2.0;
    model.table[IdSeq{s.d, s.v, kEosTag}] = 1.0;
    model.table[IdSeq{s.n, s.v, kEosTag}] = 1.0;
    lsw_finalize(model, s.tags.size());

    AmbiguousText text;
    text.append_document({Token{"thing", cda, {}}, Token{"saw", s.cnv, {}}});
    auto doc = text.doc(0);
    CHECK(lsw_score(model, doc, 1, s.n, inv) == doctest::Approx(6.0));
    CHECK(lsw_score(model, doc, 1, s.v, inv) == doctest::Approx(2.0));
    auto pred = lsw_tag(model, text, inv);
    CHECK(pred[1] == s.n);
}

TEST_CASE("zeroed entries cannot win the argmax while any mass is positive") {
    Small s;
    WindowCountTable counts;
    counts.spec = {1, 1};
    counts.by_context[IdSeq{s.cd, kEosClass}][s.cnv] = 6;
    counts.by_context[IdSeq{s.cn, kEosClass}][s.cnv] = 2;
    counts.total = 8;
    RuleSet rules;
    rules.add_forbid(s.d, s.v);
    LswModel model = lsw_train(counts, s.inv, &rules, {4, 0.0});

    AmbiguousText text;
    text.append_document({Token{"the", s.cd, {}}, Token{"saw", s.cnv, {}}});
    auto pred = lsw_tag(model, text, s.inv);
    CHECK(pred[1] == s.n);  // verb reading is zeroed after det
}

TEST_SUITE_END();
