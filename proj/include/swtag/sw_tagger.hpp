#pragma once

#include <unordered_map>
#include <vector>

#include "swtag/corpus.hpp"
#include "swtag/core.hpp"

namespace swtag {

struct TrainOptions {
    int iterations = 8;
    double epsilon = 1e-6;  // stop when max relative parameter change drops below
};

/// Sliding-window model: effective counts ñ of a tag appearing between a
/// pair of ambiguity-class contexts. Grouped by context pair; within one
/// group the tag masses compete directly, which is all the tagging decision
/// ever consults.
struct SwModel {
    WindowSpec spec;
    std::unordered_map<IdSeq, std::unordered_map<TagId, double>, IdSeqHash> table;
    // Effective count summed over all contexts, per tag; the tagging
    // fallback for unseen or all-zero contexts.
    std::vector<double> global_tag_mass;

    double value(const IdSeq& ctx, TagId tag) const;
    double context_mass(const IdSeq& ctx) const;
    std::size_t entry_count() const;
};

/// Uniform start: each window's observed count is split equally among the
/// tags of its center class.
SwModel sw_init(const WindowCountTable& counts, const AmbiguityInventory& inv);

/// One multiplicative re-estimation pass. For every context group, each
/// tag's mass is rescaled by the observed counts of the center classes
/// containing it, normalized by the group's current mass on that class:
///
///   ñ'(γ) = ñ(γ) · Σ_{σ ∋ γ} n(σ) / Σ_{γ' ∈ T(σ)} ñ(γ')
///
/// Center classes whose entire tag mass is zero contribute nothing (zeros
/// are absorbing). Per-context total mass is conserved.
SwModel sw_iterate(const SwModel& model, const WindowCountTable& counts,
                   const AmbiguityInventory& inv);

/// sw_init + sw_iterate until `iterations` passes or the maximum relative
/// parameter change falls below `epsilon`. Computes global_tag_mass.
SwModel sw_train(const WindowCountTable& counts, const AmbiguityInventory& inv,
                 const TrainOptions& opts = {});

/// Fills global_tag_mass from the table. sw_train calls this; hand-built
/// models need it before tagging.
void sw_finalize(SwModel& model, std::size_t tag_count);

/// Per-position decision: the tag of the center class with the largest
/// effective count in the observed context. Unambiguous tokens keep their
/// single tag; unseen contexts and all-zero candidates fall back to
/// global_tag_mass; ties pick the lowest tag id.
std::vector<TagId> sw_tag(const SwModel& model, const AmbiguousText& text,
                          const AmbiguityInventory& inv);

/// Largest relative elementwise change between two models sharing a key
/// set; used for the convergence stop and by tests.
double max_relative_change(const SwModel& before, const SwModel& after);

}  // namespace swtag
