#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace swtag {

using TagId = std::uint32_t;
using ClassId = std::uint32_t;

// Sentinel boundary tag and its singleton class. Both are created by the
// inventory constructors and always occupy id 0.
inline constexpr TagId kEosTag = 0;
inline constexpr ClassId kEosClass = 0;
inline constexpr const char* kEosName = "EOS";

// Ceiling on context length per window side.
inline constexpr int kMaxContext = 3;

/// Generic id sequence: tag-id or class-id tuples used as table keys.
using IdSeq = std::vector<std::uint32_t>;

struct IdSeqHash {
    std::size_t operator()(const IdSeq& seq) const noexcept {
        std::uint64_t h = 1469598103934665603ull;  // FNV-1a
        for (std::uint32_t v : seq) {
            for (int shift = 0; shift < 32; shift += 8) {
                h ^= (v >> shift) & 0xffu;
                h *= 1099511628211ull;
            }
        }
        return static_cast<std::size_t>(h);
    }
};

/// Window geometry: number of context positions consulted to the left and
/// right of the word being disambiguated.
struct WindowSpec {
    int n_minus = 1;
    int n_plus = 1;

    bool operator==(const WindowSpec&) const = default;

    int width() const { return n_minus + 1 + n_plus; }

    /// Renders as the position list used on the command line and in model
    /// files, e.g. "-1,+1" or "-2,-1".
    std::string to_string() const;

    /// Parses a position list. Positions must form the contiguous ranges
    /// -n_minus..-1 and +1..+n_plus. Throws std::invalid_argument otherwise
    /// or when the result violates the ceilings.
    static WindowSpec parse(const std::string& text);

    /// n_minus + n_plus >= 1, each side <= kMaxContext.
    bool valid() const {
        return n_minus >= 0 && n_plus >= 0 && n_minus + n_plus >= 1 &&
               n_minus <= kMaxContext && n_plus <= kMaxContext;
    }
};

/// The tag set. Ids are dense, assigned in first-seen order; id 0 is the
/// reserved boundary tag EOS. Build-then-freeze: mutate only while loading.
class TagInventory {
public:
    TagInventory();

    /// Adds a tag (or marks an existing one open when `open` is set).
    /// Throws on duplicate names and on attempts to re-declare EOS.
    TagId add_tag(const std::string& name, bool open = false);

    std::optional<TagId> find(const std::string& name) const;
    /// find() that throws std::runtime_error naming the unknown tag.
    TagId require(const std::string& name) const;

    const std::string& name(TagId id) const;
    std::size_t size() const { return names_.size(); }

    /// Tags assigned to words missing from the lexicon. Never contains EOS.
    const std::vector<TagId>& open_class() const { return open_; }

    /// FNV-1a over tag names in id order; model files use it to detect
    /// tagset mismatches.
    std::uint64_t hash() const;

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, TagId> by_name_;
    std::vector<TagId> open_;
};

/// Interned ambiguity classes. Class id 0 is the boundary class {EOS}.
/// Two equal tag sets always intern to the same id.
class AmbiguityInventory {
public:
    AmbiguityInventory();

    /// Interns a non-empty tag set (order-insensitive, duplicates ignored).
    /// Tag ids are validated against `tags`.
    ClassId intern(std::vector<TagId> tag_set, const TagInventory& tags);

    std::optional<ClassId> find(std::vector<TagId> tag_set) const;

    /// T(σ): the class's tags in ascending id order.
    const std::vector<TagId>& tags_of(ClassId id) const;

    bool ambiguous(ClassId id) const { return tags_of(id).size() > 1; }
    std::size_t size() const { return classes_.size(); }

private:
    std::vector<std::vector<TagId>> classes_;
    std::unordered_map<IdSeq, ClassId, IdSeqHash> lookup_;
};

/// Exact-match surface-form table; no morphological analysis.
class Lexicon {
public:
    /// Throws on duplicate surface forms.
    void add(std::string surface, ClassId cls);
    std::optional<ClassId> lookup(const std::string& surface) const;
    std::size_t size() const { return entries_.size(); }

private:
    std::unordered_map<std::string, ClassId> entries_;
};

/// T'(C): every tag sequence compatible with a class sequence, i.e. the
/// Cartesian product of T(σ) per position. The empty sequence yields one
/// empty product. Rightmost position varies fastest; order is deterministic.
std::vector<IdSeq> tag_sequences(std::span<const ClassId> classes,
                                 const AmbiguityInventory& inv);

/// Number of sequences tag_sequences() would return, without materializing.
std::size_t tag_sequence_count(std::span<const ClassId> classes,
                               const AmbiguityInventory& inv);

/// Tagset file: one tag name per line, `open:` prefix marks open-class tags,
/// `#` starts a comment.
TagInventory load_tagset(const std::string& path);

/// Lexicon file: `surface<TAB>tag1,tag2,...` per line, `#` comments.
/// New classes are interned into `inv`.
Lexicon load_lexicon(const std::string& path, const TagInventory& tags,
                     AmbiguityInventory& inv);

/// Class used for words missing from the lexicon (interned open-class set).
/// Throws if the tagset declares no open-class tags.
ClassId open_class_id(const TagInventory& tags, AmbiguityInventory& inv);

}  // namespace swtag
