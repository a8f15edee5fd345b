#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "swtag/core.hpp"

namespace swtag {

/// Forbid/enforce constraints over tag bigrams. Immutable once parsed.
///
/// `FORBID a b` declares the bigram (a,b) impossible. `ENFORCE a: S`
/// restricts the successors of `a` to the set S. Bigrams whose second tag
/// is EOS pass enforce checks unless EOS is listed explicitly; forbid rules
/// naming EOS are honored as written. Everything else involving EOS is
/// permitted, so edge windows are never zeroed by accident.
class RuleSet {
public:
    void add_forbid(TagId a, TagId b);
    /// Unions with any successor set already enforced for `a`.
    void add_enforce(TagId a, const std::vector<TagId>& allowed);

    bool empty() const { return forbid_.empty() && enforce_.empty(); }
    std::size_t forbid_count() const { return forbid_.size(); }
    std::size_t enforce_count() const { return enforce_.size(); }

    bool bigram_valid(TagId a, TagId b) const;

    /// True iff every adjacent pair of the sequence is a valid bigram.
    bool sequence_valid(std::span<const TagId> seq) const;

    /// Throws when some (a,b) is both forbidden and enforce-allowed.
    void check_consistent(const TagInventory& tags) const;

    /// Hash of the canonical rule listing; model files store it so a model
    /// trained with one rule set is not tagged with another.
    std::uint64_t hash(const TagInventory& tags) const;

private:
    static std::uint64_t pack(TagId a, TagId b) {
        return (static_cast<std::uint64_t>(a) << 32) | b;
    }
    std::unordered_set<std::uint64_t> forbid_;
    std::unordered_map<TagId, std::unordered_set<TagId>> enforce_;
};

/// Rules file: `FORBID <tagA> <tagB>` and `ENFORCE <tagA>: <tagB>[,<tagC>...]`
/// lines, `#` comments. Duplicates are deduplicated.
RuleSet parse_rules(const std::string& path, const TagInventory& tags);

/// V'(window): the subset of tag_sequences(window) that satisfies every
/// rule. With an empty RuleSet this is exactly T'(window).
std::vector<IdSeq> valid_sequences(std::span<const ClassId> window,
                                   const RuleSet& rules,
                                   const AmbiguityInventory& inv);

}  // namespace swtag
