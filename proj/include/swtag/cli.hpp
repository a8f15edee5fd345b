#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace swtag {

/// Parsed command line for the `swtag` tool. `run` validates per-command
/// requirements and executes; the binary only maps argv onto this struct.
struct RunConfig {
    std::string command;  // train | tag | eval | stats | sweep | synth
    std::string tagger;   // sw | lsw | hmm
    std::optional<std::string> window;

    std::string tagset_path;
    std::string lexicon_path;
    std::string rules_path;
    std::string corpus_path;
    std::string test_path;   // sweep: gold test set
    std::string model_path;
    std::string output_path;
    std::string svg_path;    // sweep, optional
    std::string taggers;     // sweep: comma list (sw, lsw, lsw-norules, hmm)
    std::string sizes;       // sweep: comma list of training sizes

    std::string synth_spec_path;  // synth
    std::string out_dir;          // synth

    std::optional<std::string> sentence_delim;
    int iterations = 8;
    double epsilon = 1e-6;
    std::optional<std::uint64_t> seed;         // synth override
    std::optional<std::uint64_t> length;       // synth override
    std::optional<std::uint64_t> test_length;  // synth override
};

/// Exit status: 0 success, 1 file or format error, 2 configuration error.
int run(const RunConfig& config);

}  // namespace swtag
