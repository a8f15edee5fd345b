#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "swtag/core.hpp"

namespace swtag {

/// Token as read from a corpus file, before lexicon analysis. `tags`
/// carries an explicit pre-disambiguated tag subset when present.
struct RawToken {
    std::string surface;
    std::optional<std::vector<std::string>> tags;
    int line = 0;
};

using RawDocument = std::vector<RawToken>;

struct Token {
    std::string surface;
    ClassId cls = 0;
    std::optional<TagId> gold;
};

/// Analyzed token stream split into documents. Documents are the padding
/// unit: windows never cross a document edge, they see EOS instead.
/// Padding tokens are virtual and never stored or counted.
struct AmbiguousText {
    std::vector<Token> tokens;
    std::vector<std::size_t> doc_end;  // exclusive end offset per document

    std::size_t doc_count() const { return doc_end.size(); }
    std::span<const Token> doc(std::size_t i) const {
        std::size_t b = i == 0 ? 0 : doc_end[i - 1];
        return {tokens.data() + b, doc_end[i] - b};
    }
    void append_document(std::vector<Token> toks);

    /// First `size` tokens, document structure preserved (last document
    /// may be truncated). size >= tokens.size() returns a full copy.
    AmbiguousText prefix(std::size_t size) const;
};

struct AnalyzeOptions {
    /// Tag name whose singleton-class tokens close the current document
    /// (the token stays in the document it closes).
    std::optional<std::string> sentence_delim;
};

/// Reads `surface` or `surface<TAB>tag1,tag2,...` lines; a blank line ends
/// the current document. `#`-lines are comments.
std::vector<RawDocument> read_raw_corpus(const std::string& path);

/// Maps each raw token to its ambiguity class: the lexicon class when the
/// surface is known, the open class otherwise. A pre-disambiguated tag
/// subset is interned as-is; for surfaces present in the lexicon it must be
/// a subset of the lexicon class (external narrowing may only reduce
/// ambiguity, not contradict the lexicon).
AmbiguousText analyze(const std::vector<RawDocument>& docs, const Lexicon& lex,
                      const TagInventory& tags, AmbiguityInventory& inv,
                      const AnalyzeOptions& opts = {});

AmbiguousText load_corpus(const std::string& path, const Lexicon& lex,
                          const TagInventory& tags, AmbiguityInventory& inv,
                          const AnalyzeOptions& opts = {});

/// Gold test file: `surface<TAB>goldtag` per line. The class comes from the
/// lexicon (or open class); the gold tag must belong to it.
AmbiguousText load_gold(const std::string& path, const Lexicon& lex,
                        const TagInventory& tags, AmbiguityInventory& inv,
                        const AnalyzeOptions& opts = {});

/// Observed window counts n over (left classes, class, right classes).
/// Grouped by context pair; the taggers and the estimation formulas always
/// consume whole context groups.
struct WindowCountTable {
    WindowSpec spec;
    // key: left context class ids followed by right context class ids
    // (n_minus + n_plus entries); value: center class -> count.
    std::unordered_map<IdSeq, std::unordered_map<ClassId, std::uint64_t>, IdSeqHash>
        by_context;
    std::uint64_t total = 0;

    std::uint64_t context_total(const IdSeq& ctx) const;
};

/// Context key for position `t` of a document, EOS-padded at the edges.
IdSeq window_context(std::span<const Token> doc, std::size_t t,
                     const WindowSpec& spec);

/// One count per token position; total mass equals the token count.
WindowCountTable count_windows(const AmbiguousText& text, const WindowSpec& spec);

/// Key-wise addition; both tables must share one WindowSpec. Counting a
/// text document-by-document and merging equals counting it whole.
void merge_counts(WindowCountTable& into, const WindowCountTable& from);

struct CorpusStats {
    std::uint64_t words = 0;
    std::uint64_t ambiguity_classes = 0;
    double ambiguity_rate = 0.0;  // fraction of tokens with |T(σ)| > 1
};

CorpusStats corpus_stats(const AmbiguousText& text, const AmbiguityInventory& inv);

}  // namespace swtag
