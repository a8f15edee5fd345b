#pragma once

#include <unordered_map>
#include <vector>

#include "swtag/corpus.hpp"
#include "swtag/core.hpp"
#include "swtag/rules.hpp"
#include "swtag/sw_tagger.hpp"

namespace swtag {

/// Light sliding-window model: effective counts ñ keyed by full tag
/// sequences (left tag context, tag, right tag context), shrinking the
/// parameter space from class-based to tag-based. Keys store the
/// concatenated sequence; entries zeroed by rules stay stored so their
/// exact-zero persistence is observable.
struct LswModel {
    WindowSpec spec;
    std::unordered_map<IdSeq, double, IdSeqHash> table;
    bool rules_applied = false;
    std::uint64_t rules_hash = 0;
    std::vector<double> global_tag_mass;

    double value(const IdSeq& seq) const {
        auto it = table.find(seq);
        return it == table.end() ? 0.0 : it->second;
    }
    double total_mass() const;
    std::size_t entry_count() const { return table.size(); }

    /// |Γ|^(n_minus + n_plus + 1): the key-space ceiling.
    static double param_bound(const WindowSpec& spec, std::size_t tag_count);
};

/// Initialization. Without rules every tag sequence compatible with an
/// observed window receives an equal share of the window's count. With
/// rules the share goes to the valid sequences only and the invalid ones
/// are pinned at exactly zero. A window whose sequences are all invalid
/// falls back to the uniform split (and warns on stderr) so no observed
/// mass is dropped.
LswModel lsw_init(const WindowCountTable& counts, const AmbiguityInventory& inv,
                  const RuleSet* rules = nullptr);

/// One multiplicative re-estimation pass:
///
///   ñ'(s) = ñ(s) · Σ_{windows w compatible with s} n(w) / D(w)
///   D(w)  = Σ over every tag sequence s' compatible with w of ñ(s')
///
/// where a window (C-, σ, C+) is compatible with sequence (E-, γ, E+) when
/// γ ∈ T(σ), E- ∈ T'(C-) and E+ ∈ T'(C+). Zero entries remain exactly
/// zero; total mass is conserved. Only observed windows are expanded, the
/// full parameter space is never enumerated.
LswModel lsw_iterate(const LswModel& model, const WindowCountTable& counts,
                     const AmbiguityInventory& inv);

/// lsw_init (with rules when given) followed by lsw_iterate until the
/// iteration cap or convergence, as in sw_train.
LswModel lsw_train(const WindowCountTable& counts, const AmbiguityInventory& inv,
                   const RuleSet* rules = nullptr, const TrainOptions& opts = {});

void lsw_finalize(LswModel& model, std::size_t tag_count);

/// Per-position decision: score(γ) sums ñ over every tag sequence the
/// context classes admit around γ; the highest-scoring candidate wins.
/// Fallback and tie-breaking as in sw_tag.
std::vector<TagId> lsw_tag(const LswModel& model, const AmbiguousText& text,
                           const AmbiguityInventory& inv);

/// Score of one candidate tag at position `t` of `doc` (exposed for tests).
double lsw_score(const LswModel& model, std::span<const Token> doc,
                 std::size_t t, TagId tag, const AmbiguityInventory& inv);

double lsw_max_relative_change(const LswModel& before, const LswModel& after);

}  // namespace swtag
