#include "swtag/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "swtag/corpus.hpp"
#include "swtag/core.hpp"
#include "swtag/eval.hpp"
#include "swtag/hmm_tagger.hpp"
#include "swtag/lsw_tagger.hpp"
#include "swtag/model_io.hpp"
#include "swtag/rules.hpp"
#include "swtag/sw_tagger.hpp"
#include "swtag/synthetic.hpp"

namespace swtag {

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_path(const std::string& value, const char* flag) {
    if (value.empty())
        throw ConfigError(std::string("missing required option ") + flag);
}

struct LoadedResources {
    TagInventory tags;
    AmbiguityInventory classes;
    Lexicon lexicon;
    std::optional<RuleSet> rules;
};

LoadedResources load_resources(const RunConfig& cfg) {
    LoadedResources res;
    res.tags = load_tagset(cfg.tagset_path);
    res.lexicon = load_lexicon(cfg.lexicon_path, res.tags, res.classes);
    if (!cfg.rules_path.empty())
        res.rules = parse_rules(cfg.rules_path, res.tags);
    return res;
}

AnalyzeOptions analyze_options(const RunConfig& cfg) {
    AnalyzeOptions opts;
    opts.sentence_delim = cfg.sentence_delim;
    return opts;
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", v * 100.0);
    return buf;
}

TrainOptions train_options(const RunConfig& cfg) {
    if (cfg.iterations < 0) throw ConfigError("--iterations must be >= 0");
    if (cfg.epsilon < 0) throw ConfigError("--epsilon must be >= 0");
    return {cfg.iterations, cfg.epsilon};
}

WindowSpec parse_window_flag(const RunConfig& cfg) {
    if (!cfg.window) throw ConfigError("this tagger requires --window");
    try {
        return WindowSpec::parse(*cfg.window);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

int cmd_train(const RunConfig& cfg) {
    require_path(cfg.tagset_path, "--tagset");
    require_path(cfg.lexicon_path, "--lexicon");
    require_path(cfg.corpus_path, "--corpus");
    require_path(cfg.model_path, "--model");
    TrainOptions opts = train_options(cfg);
    if (cfg.tagger != "sw" && cfg.tagger != "lsw" && cfg.tagger != "hmm")
        throw ConfigError("--tagger must be sw, lsw or hmm");
    if (cfg.tagger == "sw" && !cfg.rules_path.empty())
        throw ConfigError("the sw tagger works on ambiguity classes and cannot "
                          "use rules");
    if (cfg.tagger == "hmm" && cfg.window)
        throw ConfigError("--window applies to the sw and lsw taggers only");

    LoadedResources res = load_resources(cfg);
    AmbiguousText text = load_corpus(cfg.corpus_path, res.lexicon, res.tags,
                                     res.classes, analyze_options(cfg));
    if (text.tokens.empty()) throw std::runtime_error("training corpus is empty");

    if (cfg.tagger == "sw") {
        WindowSpec window = parse_window_flag(cfg);
        SwModel model = sw_train(count_windows(text, window), res.classes, opts);
        save_model(model, res.tags, res.classes, cfg.model_path);
    } else if (cfg.tagger == "lsw") {
        WindowSpec window = parse_window_flag(cfg);
        const RuleSet* rules = res.rules ? &*res.rules : nullptr;
        LswModel model =
            lsw_train(count_windows(text, window), res.classes, rules, opts);
        if (rules) model.rules_hash = rules->hash(res.tags);
        save_model(model, res.tags, cfg.model_path);
    } else {
        const RuleSet* rules = res.rules ? &*res.rules : nullptr;
        HmmModel init = hmm_init(res.tags, res.classes, rules);
        auto trained = hmm_train(std::move(init), text, res.classes, opts);
        save_model(trained.model, res.tags, res.classes, cfg.model_path);
    }
    std::cout << "trained " << cfg.tagger << " model on " << text.tokens.size()
              << " tokens -> " << cfg.model_path << "\n";
    return 0;
}

std::vector<TagId> tag_with(const AnyModel& model, const AmbiguousText& text,
                            const AmbiguityInventory& inv) {
    if (std::holds_alternative<SwModel>(model))
        return sw_tag(std::get<SwModel>(model), text, inv);
    if (std::holds_alternative<LswModel>(model))
        return lsw_tag(std::get<LswModel>(model), text, inv);
    return hmm_tag(std::get<HmmModel>(model), text, inv);
}

int cmd_tag(const RunConfig& cfg) {
    require_path(cfg.tagset_path, "--tagset");
    require_path(cfg.lexicon_path, "--lexicon");
    require_path(cfg.corpus_path, "--corpus");
    require_path(cfg.model_path, "--model");

    LoadedResources res = load_resources(cfg);
    AnyModel model = load_model(cfg.model_path, res.tags, res.classes);
    AmbiguousText text = load_corpus(cfg.corpus_path, res.lexicon, res.tags,
                                     res.classes, analyze_options(cfg));
    std::vector<TagId> pred = tag_with(model, text, res.classes);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!cfg.output_path.empty()) {
        file.open(cfg.output_path);
        if (!file)
            throw std::runtime_error("cannot write '" + cfg.output_path + "'");
        out = &file;
    }
    std::size_t i = 0;
    for (std::size_t d = 0; d < text.doc_count(); ++d) {
        if (d) *out << '\n';
        for (std::size_t t = 0; t < text.doc(d).size(); ++t, ++i)
            *out << res.tags.name(pred[i]) << '\n';
    }
    return 0;
}

int cmd_eval(const RunConfig& cfg) {
    require_path(cfg.tagset_path, "--tagset");
    require_path(cfg.lexicon_path, "--lexicon");
    require_path(cfg.corpus_path, "--corpus");
    require_path(cfg.model_path, "--model");

    LoadedResources res = load_resources(cfg);
    AnyModel model = load_model(cfg.model_path, res.tags, res.classes);
    AmbiguousText gold = load_gold(cfg.corpus_path, res.lexicon, res.tags,
                                   res.classes, analyze_options(cfg));
    std::vector<TagId> pred = tag_with(model, gold, res.classes);
    EvalReport report = accuracy(pred, gold, res.classes);
    std::cout << "Tokens: " << report.total << "\n"
              << "Correct: " << report.correct << "\n"
              << "Accuracy: " << percent(report.accuracy()) << "\n"
              << "Ambiguous tokens: " << report.ambiguous_total << "\n"
              << "Ambiguous correct: " << report.ambiguous_correct << "\n"
              << "Ambiguous accuracy: " << percent(report.ambiguous_accuracy())
              << "\n";
    return 0;
}

int cmd_stats(const RunConfig& cfg) {
    require_path(cfg.tagset_path, "--tagset");
    require_path(cfg.lexicon_path, "--lexicon");
    require_path(cfg.corpus_path, "--corpus");

    LoadedResources res = load_resources(cfg);
    AmbiguousText text = load_corpus(cfg.corpus_path, res.lexicon, res.tags,
                                     res.classes, analyze_options(cfg));
    CorpusStats stats = corpus_stats(text, res.classes);
    std::cout << "Words: " << stats.words << "\n"
              << "Amb. classes: " << stats.ambiguity_classes << "\n"
              << "Amb. rate: " << percent(stats.ambiguity_rate) << "\n";
    return 0;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::size_t b = part.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        std::size_t e = part.find_last_not_of(" \t");
        out.push_back(part.substr(b, e - b + 1));
    }
    return out;
}

int cmd_sweep(const RunConfig& cfg) {
    require_path(cfg.tagset_path, "--tagset");
    require_path(cfg.lexicon_path, "--lexicon");
    require_path(cfg.corpus_path, "--corpus");
    require_path(cfg.test_path, "--test");
    require_path(cfg.output_path, "--output");
    if (cfg.taggers.empty()) throw ConfigError("missing required option --taggers");
    if (cfg.sizes.empty()) throw ConfigError("missing required option --sizes");
    TrainOptions opts = train_options(cfg);
    WindowSpec window = parse_window_flag(cfg);

    std::vector<TaggerConfig> configs;
    for (const std::string& name : split_list(cfg.taggers)) {
        TaggerConfig tc;
        tc.window = window;
        tc.train = opts;
        if (name == "sw") {
            tc.kind = TaggerKind::kSw;
        } else if (name == "lsw") {
            tc.kind = TaggerKind::kLsw;
            tc.use_rules = true;
            if (cfg.rules_path.empty())
                throw ConfigError("tagger 'lsw' uses rules; pass --rules or "
                                  "request 'lsw-norules'");
        } else if (name == "lsw-norules") {
            tc.kind = TaggerKind::kLsw;
        } else if (name == "hmm") {
            tc.kind = TaggerKind::kHmm;
            tc.use_rules = !cfg.rules_path.empty();
        } else {
            throw ConfigError("unknown tagger '" + name +
                              "' (expected sw, lsw, lsw-norules or hmm)");
        }
        configs.push_back(tc);
    }

    std::vector<std::size_t> sizes;
    for (const std::string& s : split_list(cfg.sizes)) {
        try {
            sizes.push_back(std::stoull(s));
        } catch (const std::exception&) {
            throw ConfigError("bad training size '" + s + "'");
        }
    }

    LoadedResources res = load_resources(cfg);
    AmbiguousText train = load_corpus(cfg.corpus_path, res.lexicon, res.tags,
                                      res.classes, analyze_options(cfg));
    AmbiguousText test = load_gold(cfg.test_path, res.lexicon, res.tags,
                                   res.classes, analyze_options(cfg));
    auto curves =
        learning_curve(configs, train, test, sizes, res.tags, res.classes,
                       res.rules ? &*res.rules : nullptr);
    emit_csv(curves, cfg.output_path);

    std::string params_path = cfg.output_path;
    if (params_path.size() > 4 && params_path.ends_with(".csv"))
        params_path.resize(params_path.size() - 4);
    params_path += ".params.csv";
    emit_params_csv(curves, params_path);
    if (!cfg.svg_path.empty()) emit_svg(curves, cfg.svg_path);

    for (const auto& curve : curves) {
        const CurvePoint& last = curve.points.back();
        std::cout << curve.label << ": accuracy " << percent(last.accuracy)
                  << " at " << last.train_tokens << " tokens, "
                  << last.model_entries << " table entries (bound "
                  << last.param_bound << ")\n";
    }
    std::cout << "curves -> " << cfg.output_path << "\nparams -> " << params_path
              << "\n";
    return 0;
}

int cmd_synth(const RunConfig& cfg) {
    require_path(cfg.synth_spec_path, "--spec");
    require_path(cfg.out_dir, "--out-dir");
    SyntheticSpec spec = load_synthetic_spec(cfg.synth_spec_path);
    if (cfg.seed) spec.seed = *cfg.seed;
    if (cfg.length) spec.length = *cfg.length;
    if (cfg.test_length) spec.test_length = *cfg.test_length;
    spec.validate();
    SyntheticData data = generate_synthetic(spec);
    write_synthetic_files(spec, data, cfg.out_dir);
    std::cout << "wrote " << data.train.tokens.size() << " train and "
              << data.test.tokens.size() << " test tokens to " << cfg.out_dir
              << "\n";
    return 0;
}

}  // namespace

int run(const RunConfig& cfg) {
    try {
        if (cfg.command == "train") return cmd_train(cfg);
        if (cfg.command == "tag") return cmd_tag(cfg);
        if (cfg.command == "eval") return cmd_eval(cfg);
        if (cfg.command == "stats") return cmd_stats(cfg);
        if (cfg.command == "sweep") return cmd_sweep(cfg);
        if (cfg.command == "synth") return cmd_synth(cfg);
        std::cerr << "error: unknown command '" << cfg.command << "'\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace swtag
