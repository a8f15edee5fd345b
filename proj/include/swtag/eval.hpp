#pragma once

#include <optional>
#include <string>
#include <vector>

#include "swtag/corpus.hpp"
#include "swtag/core.hpp"
#include "swtag/rules.hpp"
#include "swtag/sw_tagger.hpp"

namespace swtag {

struct EvalReport {
    std::uint64_t total = 0;
    std::uint64_t correct = 0;
    std::uint64_t ambiguous_total = 0;
    std::uint64_t ambiguous_correct = 0;

    double accuracy() const {
        return total == 0 ? 1.0 : static_cast<double>(correct) / total;
    }
    // Vacuously perfect when the test set has no ambiguous tokens.
    double ambiguous_accuracy() const {
        return ambiguous_total == 0
                   ? 1.0
                   : static_cast<double>(ambiguous_correct) / ambiguous_total;
    }
};

/// Token-level accuracy of `pred` against the gold tags of `gold`.
/// Throws on length mismatch or a token without a gold tag.
EvalReport accuracy(const std::vector<TagId>& pred, const AmbiguousText& gold,
                    const AmbiguityInventory& inv);

enum class TaggerKind { kSw, kLsw, kHmm };

struct TaggerConfig {
    TaggerKind kind = TaggerKind::kLsw;
    WindowSpec window{1, 1};
    bool use_rules = false;  // lsw: constrained init; hmm: transition zeros
    TrainOptions train;

    /// Display labels: "SW(-1, +1)", "LSW(-1, +1)", "LSW(-1, +1)-No-Rules",
    /// "HMM".
    std::string label() const;
};

struct CurvePoint {
    std::size_t train_tokens = 0;
    double accuracy = 0.0;
    double ambiguous_accuracy = 0.0;
    std::size_t model_entries = 0;  // realized table entries (dense size for HMM)
    double param_bound = 0.0;       // key-space ceiling for the configuration
};

struct LearningCurve {
    std::string label;
    std::vector<CurvePoint> points;
};

/// Trains every configuration on cumulative prefixes of `train` and
/// evaluates each on the fixed `test` set. Sizes must be strictly
/// increasing and within the corpus. A single size is exactly one
/// train+tag+accuracy run.
std::vector<LearningCurve> learning_curve(const std::vector<TaggerConfig>& taggers,
                                          const AmbiguousText& train,
                                          const AmbiguousText& test,
                                          const std::vector<std::size_t>& sizes,
                                          const TagInventory& tags,
                                          const AmbiguityInventory& inv,
                                          const RuleSet* rules);

/// Canonical curve output: `tagger,train_tokens,accuracy,ambiguous_accuracy`
/// rows; fields containing commas are quoted.
void emit_csv(const std::vector<LearningCurve>& curves, const std::string& path);

/// Companion size report: `tagger,train_tokens,table_entries,param_bound`.
void emit_params_csv(const std::vector<LearningCurve>& curves,
                     const std::string& path);

/// Parses a file produced by emit_csv.
std::vector<LearningCurve> read_curves_csv(const std::string& path);

/// Minimal SVG 1.1 line chart, one polyline per curve, labeled axes.
void emit_svg(const std::vector<LearningCurve>& curves, const std::string& path);

}  // namespace swtag
