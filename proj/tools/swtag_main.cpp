#include <CLI11.hpp>

#include "swtag/cli.hpp"

namespace {

void add_resource_flags(CLI::App* cmd, swtag::RunConfig& cfg) {
    cmd->add_option("--tagset", cfg.tagset_path, "tagset file");
    cmd->add_option("--lexicon", cfg.lexicon_path, "lexicon file");
    cmd->add_option("--sentence-delim", cfg.sentence_delim,
                    "tag whose singleton-class tokens end a padding segment");
}

}  // namespace

int main(int argc, char** argv) {
    swtag::RunConfig cfg;
    CLI::App app{"sliding-window and HMM part-of-speech taggers"};
    app.require_subcommand(1);

    std::string window_flag;

    auto* train = app.add_subcommand("train", "train a tagger on an untagged corpus");
    add_resource_flags(train, cfg);
    train->add_option("--tagger", cfg.tagger, "sw | lsw | hmm")->required();
    train->add_option("--window", window_flag, "context positions, e.g. =-1,+1");
    train->add_option("--rules", cfg.rules_path, "forbid/enforce rules file");
    train->add_option("--corpus", cfg.corpus_path, "training corpus")->required();
    train->add_option("--model", cfg.model_path, "output model file")->required();
    train->add_option("--iterations", cfg.iterations, "estimation iterations");
    train->add_option("--epsilon", cfg.epsilon, "convergence threshold");

    auto* tag = app.add_subcommand("tag", "tag a corpus with a trained model");
    add_resource_flags(tag, cfg);
    tag->add_option("--model", cfg.model_path, "model file")->required();
    tag->add_option("--corpus", cfg.corpus_path, "corpus to tag")->required();
    tag->add_option("--output", cfg.output_path, "output file (stdout if absent)");

    auto* eval = app.add_subcommand("eval", "evaluate a model against gold tags");
    add_resource_flags(eval, cfg);
    eval->add_option("--model", cfg.model_path, "model file")->required();
    eval->add_option("--corpus", cfg.corpus_path, "gold test file")->required();

    auto* stats = app.add_subcommand("stats", "report corpus statistics");
    add_resource_flags(stats, cfg);
    stats->add_option("--corpus", cfg.corpus_path, "corpus file")->required();

    auto* sweep = app.add_subcommand("sweep", "learning curves over training sizes");
    add_resource_flags(sweep, cfg);
    sweep->add_option("--taggers", cfg.taggers,
                      "comma list: sw, lsw, lsw-norules, hmm")->required();
    sweep->add_option("--window", window_flag, "context positions, e.g. =-1,+1")
        ->required();
    sweep->add_option("--rules", cfg.rules_path, "forbid/enforce rules file");
    sweep->add_option("--corpus", cfg.corpus_path, "training corpus")->required();
    sweep->add_option("--test", cfg.test_path, "gold test file")->required();
    sweep->add_option("--sizes", cfg.sizes, "comma list of training sizes")
        ->required();
    sweep->add_option("--output", cfg.output_path, "output CSV")->required();
    sweep->add_option("--svg", cfg.svg_path, "optional SVG chart");
    sweep->add_option("--iterations", cfg.iterations, "estimation iterations");
    sweep->add_option("--epsilon", cfg.epsilon, "convergence threshold");

    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    synth->add_option("--spec", cfg.synth_spec_path, "synthetic language spec")
        ->required();
    synth->add_option("--out-dir", cfg.out_dir, "output directory")->required();
    synth->add_option("--seed", cfg.seed, "override the spec seed");
    synth->add_option("--length", cfg.length, "override the train length");
    synth->add_option("--test-length", cfg.test_length, "override the test length");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // config errors exit 2
    }

    cfg.command = app.get_subcommands().front()->get_name();
    if (!window_flag.empty()) cfg.window = window_flag;
    return swtag::run(cfg);
}
