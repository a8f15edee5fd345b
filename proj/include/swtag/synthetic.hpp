#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swtag/core.hpp"
#include "swtag/corpus.hpp"
#include "swtag/rules.hpp"

namespace swtag {

/// Markov text source for desk-scale experiments: a tag chain with a
/// stochastic transition matrix (zero entries are hard constraints), a
/// class inventory, and per-tag emission distributions over the classes
/// containing the tag. One surface form per class.
struct SyntheticSpec {
    std::vector<std::string> tag_names;
    std::vector<double> start;                       // distribution over tags
    std::vector<std::vector<double>> transition;     // rows stochastic
    std::vector<std::string> class_names;
    std::vector<std::vector<std::size_t>> class_tags;  // tag indices per class
    // emission[tag][class] > 0 only when the class contains the tag
    std::vector<std::vector<double>> emission;
    std::size_t length = 10000;
    std::size_t test_length = 1000;
    std::size_t doc_len = 20;
    std::uint64_t seed = 1;

    /// Throws std::runtime_error describing the first violated invariant
    /// (non-stochastic row, emission outside the class, unreachable class).
    void validate() const;
};

/// Key-value spec file, one directive per line:
///   tags det noun verb
///   start det=0.7 noun=0.2 verb=0.1
///   trans det: noun=1.0
///   class c_nv = noun,verb
///   emit noun: c_n=0.3 c_nv=0.7
///   doc_len 20 / length 50000 / test_length 5000 / seed 1
SyntheticSpec load_synthetic_spec(const std::string& path);

/// Everything a tagging experiment needs, generated in memory.
struct SyntheticData {
    TagInventory tags;
    AmbiguityInventory classes;
    Lexicon lexicon;
    RuleSet rules;        // FORBID per exact-zero transition entry
    AmbiguousText train;  // classes only
    AmbiguousText test;   // classes + gold tags
};

/// Deterministic for a fixed spec (including seed): the tag path is
/// sampled from the chain, the class per tag from its emission map, and
/// the gold tags are kept on the test copy.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Writes tagset.txt, lexicon.txt, rules.txt, train.txt and test.txt
/// under `dir` (created if missing). Byte-identical across runs for a
/// fixed spec.
void write_synthetic_files(const SyntheticSpec& spec, const SyntheticData& data,
                           const std::string& dir);

}  // namespace swtag
