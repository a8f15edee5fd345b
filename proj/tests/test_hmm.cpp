#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "generators.hpp"
#include "oracles.hpp"
#include "swtag/hmm_tagger.hpp"

using namespace swtag;

namespace {

struct Small {
    TagInventory tags;
    AmbiguityInventory inv;
    TagId d, n, v;
    ClassId cd, cn, cv, cnv, cdn;

    Small() {
        d = tags.add_tag("det");
        n = tags.add_tag("noun");
        v = tags.add_tag("verb");
        cd = inv.intern({d}, tags);
        cn = inv.intern({n}, tags);
        cv = inv.intern({v}, tags);
        cnv = inv.intern({n, v}, tags);
        cdn = inv.intern({d, n}, tags);
    }

    AmbiguousText doc(std::vector<ClassId> classes) const {
        AmbiguousText text;
        std::vector<Token> toks;
        for (ClassId c : classes) toks.push_back({"w", c, {}});
        text.append_document(std::move(toks));
        return text;
    }
};

}  // namespace

TEST_SUITE_BEGIN("hmm");

TEST_CASE("hmm_init is uniform and honors rule zeros") {
    Small s;
    SUBCASE("no rules: flat rows") {
        HmmModel model = hmm_init(s.tags, s.inv);
        for (TagId i = 0; i < model.n_tags; ++i) {
            double row = 0.0;
            for (TagId j = 0; j < model.n_tags; ++j) {
                CHECK(model.trans[i][j] == doctest::Approx(0.25));
                row += model.trans[i][j];
            }
            CHECK(row == doctest::Approx(1.0));
        }
        // noun sits in {noun}, {noun,verb} and {det,noun}: 1/3 each
        CHECK(model.emission(s.n, s.cn) == doctest::Approx(1.0 / 3));
        CHECK(model.emission(s.n, s.cnv) == doctest::Approx(1.0 / 3));
        CHECK(model.emission(s.n, s.cdn) == doctest::Approx(1.0 / 3));
        CHECK(model.emission(s.n, s.cv) == 0.0);
        CHECK(model.emission(kEosTag, kEosClass) == doctest::Approx(1.0));
    }

    SUBCASE("forbidden successors renormalize the row") {
        RuleSet rules;
        rules.add_forbid(s.d, s.d);
        HmmModel model = hmm_init(s.tags, s.inv, &rules);
        CHECK(model.trans[s.d][s.d] == 0.0);
        CHECK(model.trans[s.d][s.n] == doctest::Approx(1.0 / 3));
        double row = 0.0;
        for (TagId j = 0; j < model.n_tags; ++j) row += model.trans[s.d][j];
        CHECK(row == doctest::Approx(1.0));
    }

    SUBCASE("a tag with no legal successor is a configuration error") {
        RuleSet rules;
        for (TagId j = 0; j < s.tags.size(); ++j) rules.add_forbid(s.d, j);
        CHECK_THROWS_WITH_AS(hmm_init(s.tags, s.inv, &rules),
                             doctest::Contains("det"), std::runtime_error);
    }
}

TEST_CASE("posterior marginals match exhaustive path enumeration") {
    std::mt19937_64 rng(41);
    for (int round = 0; round < 20; ++round) {
        auto lang = gen::make_language(rng, 4, 5);
        auto text = gen::make_text(rng, lang, 12, 12);
        HmmModel model = hmm_init(lang.tags, lang.classes);
        // a couple of EM steps so the matrices are not uniform
        model = hmm_train(model, text, lang.classes, {2, 0.0}).model;

        for (std::size_t d = 0; d < text.doc_count(); ++d) {
            auto doc = text.doc(d);
            auto post = hmm_posteriors(model, doc, lang.classes);
            auto ref = oracle::enumerate_paths(model, doc, lang.classes);
            REQUIRE(ref.total > 0.0L);
            CHECK(post.log_likelihood ==
                  doctest::Approx(static_cast<double>(std::log(ref.total)))
                      .epsilon(1e-10));
            for (std::size_t t = 0; t < doc.size(); ++t)
                for (TagId tag = 0; tag < model.n_tags; ++tag)
                    CHECK(std::abs(post.gamma[t][tag] -
                                   static_cast<double>(ref.marginals[t][tag])) <=
                          1e-10);
        }
    }
}

TEST_CASE("EM log-likelihood is non-decreasing") {
    std::mt19937_64 rng(42);
    for (int round = 0; round < 10; ++round) {
        auto lang = gen::make_language(rng, 4, 6);
        auto text = gen::make_text(rng, lang, 180);
        HmmModel model = hmm_init(lang.tags, lang.classes);
        auto result = hmm_train(std::move(model), text, lang.classes, {6, 0.0});
        REQUIRE(result.log_likelihood.size() >= 2);
        for (std::size_t i = 1; i < result.log_likelihood.size(); ++i)
            CHECK(result.log_likelihood[i] >= result.log_likelihood[i - 1] - 1e-9);
        // rows stay stochastic
        for (TagId i = 0; i < result.model.n_tags; ++i) {
            double row = 0.0;
            for (TagId j = 0; j < result.model.n_tags; ++j) {
                CHECK(result.model.trans[i][j] >= 0.0);
                row += result.model.trans[i][j];
            }
            CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("rule zeros are absorbing under EM") {
    std::mt19937_64 rng(43);
    auto lang = gen::make_language(rng, 5, 6);
    RuleSet rules = gen::make_forbid_rules(rng, lang, 3);
    auto text = gen::make_text_with_rules(rng, lang, rules, 200);
    REQUIRE_FALSE(text.tokens.empty());
    HmmModel model = hmm_init(lang.tags, lang.classes, &rules);
    auto trained = hmm_train(std::move(model), text, lang.classes, {5, 0.0}).model;
    for (TagId a = 0; a < trained.n_tags; ++a)
        for (TagId b = 0; b < trained.n_tags; ++b)
            if (!rules.bigram_valid(a, b)) CHECK(trained.trans[a][b] == 0.0);
}

TEST_CASE("all-singleton corpora keep the likelihood constant") {
    Small s;
    auto text = s.doc({s.cd, s.cn, s.cv, s.cn});
    HmmModel model = hmm_init(s.tags, s.inv);
    auto result = hmm_train(std::move(model), text, s.inv, {4, 0.0});
    // emissions of singleton tokens are deterministic given the path, and
    // the path itself is forced, so EM converges after one update
    for (std::size_t i = 2; i < result.log_likelihood.size(); ++i)
        CHECK(result.log_likelihood[i] ==
              doctest::Approx(result.log_likelihood[1]).epsilon(1e-12));
    auto pred = hmm_tag(result.model, text, s.inv);
    CHECK(pred == std::vector<TagId>{s.d, s.n, s.v, s.n});
}

TEST_CASE("viterbi equals exhaustive search") {
    SUBCASE("hand-set dyadic matrices, every candidate path checked") {
        Small s;
        HmmModel model;
        model.n_tags = s.tags.size();
        model.n_classes = s.inv.size();
        model.trans.assign(model.n_tags, std::vector<double>(model.n_tags, 0.0));
        model.emit.assign(model.n_tags, std::vector<double>(model.n_classes, 0.0));
        // dyadic values: ties and products are exact in binary floating point
        model.trans[kEosTag] = {0.0, 0.5, 0.25, 0.25};
        model.trans[s.d] = {0.25, 0.0, 0.5, 0.25};
        model.trans[s.n] = {0.5, 0.125, 0.125, 0.25};
        model.trans[s.v] = {0.5, 0.25, 0.25, 0.0};
        model.emit[kEosTag][kEosClass] = 1.0;
        model.emit[s.d][s.cd] = 0.5;
        model.emit[s.d][s.cdn] = 0.5;
        model.emit[s.n][s.cn] = 0.25;
        model.emit[s.n][s.cnv] = 0.5;
        model.emit[s.n][s.cdn] = 0.25;
        model.emit[s.v][s.cv] = 0.5;
        model.emit[s.v][s.cnv] = 0.5;

        auto text = s.doc({s.cd, s.cnv, s.cdn, s.cnv});
        auto pred = hmm_tag(model, text, s.inv);
        auto ref = oracle::enumerate_paths(model, text.doc(0), s.inv);
        CHECK(pred == ref.best_path);
    }

    SUBCASE("trained models on random micro corpora") {
        std::mt19937_64 rng(44);
        for (int round = 0; round < 15; ++round) {
            auto lang = gen::make_language(rng, 4, 5);
            auto text = gen::make_text(rng, lang, 10, 10);
            HmmModel model = hmm_init(lang.tags, lang.classes);
            model = hmm_train(model, text, lang.classes, {3, 0.0}).model;
            auto pred = hmm_tag(model, text, lang.classes);
            std::size_t offset = 0;
            for (std::size_t d = 0; d < text.doc_count(); ++d) {
                auto doc = text.doc(d);
                auto ref = oracle::enumerate_paths(model, doc, lang.classes);
                // the decoded path reaches the maximum probability
                long double got = 1.0L;
                TagId prev = kEosTag;
                for (std::size_t t = 0; t < doc.size(); ++t) {
                    TagId tag = pred[offset + t];
                    got *= model.transition(prev, tag) * model.emission(tag, doc[t].cls);
                    prev = tag;
                }
                got *= model.transition(prev, kEosTag);
                CHECK(static_cast<double>(got) >=
                      static_cast<double>(ref.best_prob) * (1.0 - 1e-9));
                offset += doc.size();
            }
        }
    }
}

TEST_CASE("forbidden transitions never appear when a legal path exists") {
    Small s;
    RuleSet rules;
    rules.add_forbid(s.d, s.d);
    HmmModel model = hmm_init(s.tags, s.inv, &rules);
    auto text = s.doc({s.cd, s.cdn, s.cdn, s.cn});
    auto pred = hmm_tag(model, text, s.inv);
    for (std::size_t i = 0; i + 1 < pred.size(); ++i)
        CHECK_FALSE((pred[i] == s.d && pred[i + 1] == s.d));
}

TEST_CASE("zero-probability paths degrade to the emission argmax") {
    Small s;
    HmmModel model = hmm_init(s.tags, s.inv);
    // a class interned after init: every emission for it is zero
    ClassId fresh = s.inv.intern({s.d, s.v}, s.tags);
    REQUIRE(fresh >= model.n_classes);
    AmbiguousText text;
    text.append_document({Token{"w", fresh, {}}});
    auto pred = hmm_tag(model, text, s.inv);
    REQUIRE(pred.size() == 1);
    CHECK(pred[0] == s.d);  // lowest candidate id wins the vacuous argmax
}

TEST_CASE("zero-probability documents are a hard training error") {
    Small s;
    RuleSet rules;
    // det can only be followed by det; a det-noun document has no path
    rules.add_enforce(s.d, {s.d});
    rules.add_forbid(s.d, s.n);
    rules.add_forbid(s.d, s.v);
    HmmModel model = hmm_init(s.tags, s.inv, &rules);
    auto text = s.doc({s.cd, s.cn});
    CHECK_THROWS_AS(hmm_train(std::move(model), text, s.inv, {2, 0.0}),
                    std::runtime_error);
}

TEST_SUITE_END();
