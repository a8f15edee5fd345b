#pragma once

#include <span>
#include <vector>

#include "swtag/corpus.hpp"
#include "swtag/core.hpp"
#include "swtag/rules.hpp"
#include "swtag/sw_tagger.hpp"

namespace swtag {

/// First-order HMM: states are tags, observations are ambiguity classes.
/// The boundary tag doubles as the initial/final state, so document
/// boundaries are ordinary EOS transitions. Emissions are constrained to
/// classes containing the state; forbidden transitions are exactly zero.
struct HmmModel {
    std::size_t n_tags = 0;
    std::size_t n_classes = 0;
    std::vector<std::vector<double>> trans;  // n_tags x n_tags, rows sum to 1
    std::vector<std::vector<double>> emit;   // n_tags x n_classes, rows sum to 1

    double transition(TagId from, TagId to) const { return trans[from][to]; }
    double emission(TagId tag, ClassId cls) const {
        return cls < n_classes ? emit[tag][cls] : 0.0;
    }
};

/// Uniform start, rule zeros in place: each transition row is uniform over
/// the successors the rules allow, each emission row uniform over the
/// classes containing the tag. Throws when rules leave a tag without any
/// legal successor.
HmmModel hmm_init(const TagInventory& tags, const AmbiguityInventory& inv,
                  const RuleSet* rules = nullptr);

struct HmmTrainResult {
    HmmModel model;
    // Corpus log-likelihood under the parameters entering each iteration;
    // non-decreasing for a correct implementation.
    std::vector<double> log_likelihood;
};

/// Baum-Welch over the ambiguity-class sequence, documents independent,
/// scaled forward-backward. Stops at `iterations` passes or when the
/// log-likelihood gain drops below `epsilon`. Zeros stay zero; rows whose
/// expected mass vanishes keep their previous values.
HmmTrainResult hmm_train(HmmModel model, const AmbiguousText& text,
                         const AmbiguityInventory& inv,
                         const TrainOptions& opts = {});

struct DocPosteriors {
    // gamma[t][tag] = P(tag at position t | document)
    std::vector<std::vector<double>> gamma;
    double log_likelihood = 0.0;
};

/// Scaled forward-backward posteriors for one document.
DocPosteriors hmm_posteriors(const HmmModel& model, std::span<const Token> doc,
                             const AmbiguityInventory& inv);

/// Most-likely tag path (Viterbi), restricted at every position to the
/// token's class. Ties pick the lowest tag id at each backtrace step. When
/// every path has zero probability the decision degrades to a per-position
/// emission argmax with a warning.
std::vector<TagId> hmm_tag(const HmmModel& model, const AmbiguousText& text,
                           const AmbiguityInventory& inv);

}  // namespace swtag
