#include "swtag/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace swtag {

namespace {

std::runtime_error file_error(const std::string& path, int line,
                              const std::string& msg) {
    std::ostringstream os;
    os << path << ":" << line << ": " << msg;
    return std::runtime_error(os.str());
}

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_names(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string name;
    while (std::getline(ss, name, ',')) {
        name = trim(name);
        if (!name.empty()) out.push_back(std::move(name));
    }
    return out;
}

}  // namespace

void AmbiguousText::append_document(std::vector<Token> toks) {
    if (toks.empty()) return;
    tokens.insert(tokens.end(), std::make_move_iterator(toks.begin()),
                  std::make_move_iterator(toks.end()));
    doc_end.push_back(tokens.size());
}

AmbiguousText AmbiguousText::prefix(std::size_t size) const {
    AmbiguousText out;
    size = std::min(size, tokens.size());
    out.tokens.assign(tokens.begin(), tokens.begin() + size);
    for (std::size_t e : doc_end) {
        if (e < size) out.doc_end.push_back(e);
    }
    if (size > 0 && (out.doc_end.empty() || out.doc_end.back() != size))
        out.doc_end.push_back(size);
    return out;
}

std::vector<RawDocument> read_raw_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file '" + path + "'");
    std::vector<RawDocument> docs;
    RawDocument cur;
    std::string line;
    int line_no = 0;
    auto flush = [&] {
        if (!cur.empty()) docs.push_back(std::move(cur));
        cur.clear();
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = trim(line);
        if (t.empty()) {
            flush();
            continue;
        }
        if (t[0] == '#') continue;
        RawToken tok;
        tok.line = line_no;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            tok.surface = t;
        } else {
            tok.surface = trim(line.substr(0, tab));
            if (tok.surface.empty())
                throw file_error(path, line_no, "empty surface form");
            auto names = split_names(line.substr(tab + 1));
            if (names.empty())
                throw file_error(path, line_no, "annotation with no tags");
            tok.tags = std::move(names);
        }
        cur.push_back(std::move(tok));
    }
    flush();
    return docs;
}

AmbiguousText analyze(const std::vector<RawDocument>& docs, const Lexicon& lex,
                      const TagInventory& tags, AmbiguityInventory& inv,
                      const AnalyzeOptions& opts) {
    std::optional<ClassId> delim_class;
    if (opts.sentence_delim) {
        TagId t = tags.require(*opts.sentence_delim);
        delim_class = inv.intern({t}, tags);
    }
    // Interned lazily: corpora without unknown words need no open class.
    std::optional<ClassId> open_cls;

    AmbiguousText text;
    std::vector<Token> cur;
    for (const auto& doc : docs) {
        for (const auto& raw : doc) {
            Token tok;
            tok.surface = raw.surface;
            auto lex_cls = lex.lookup(raw.surface);
            if (raw.tags) {
                std::vector<TagId> set;
                for (const auto& name : *raw.tags) {
                    if (name == kEosName)
                        throw std::runtime_error(
                            "line " + std::to_string(raw.line) +
                            ": EOS cannot annotate a token");
                    set.push_back(tags.require(name));
                }
                ClassId annotated = inv.intern(std::move(set), tags);
                if (lex_cls) {
                    const auto& allowed = inv.tags_of(*lex_cls);
                    for (TagId t : inv.tags_of(annotated)) {
                        if (!std::binary_search(allowed.begin(), allowed.end(), t))
                            throw std::runtime_error(
                                "line " + std::to_string(raw.line) + ": tag '" +
                                tags.name(t) + "' not in the lexicon class of '" +
                                raw.surface + "'");
                    }
                }
                tok.cls = annotated;
            } else if (lex_cls) {
                tok.cls = *lex_cls;
            } else {
                if (!open_cls) open_cls = open_class_id(tags, inv);
                tok.cls = *open_cls;
            }
            cur.push_back(std::move(tok));
            if (delim_class && cur.back().cls == *delim_class) {
                text.append_document(std::move(cur));
                cur.clear();
            }
        }
        text.append_document(std::move(cur));
        cur.clear();
    }
    return text;
}

AmbiguousText load_corpus(const std::string& path, const Lexicon& lex,
                          const TagInventory& tags, AmbiguityInventory& inv,
                          const AnalyzeOptions& opts) {
    return analyze(read_raw_corpus(path), lex, tags, inv, opts);
}

AmbiguousText load_gold(const std::string& path, const Lexicon& lex,
                        const TagInventory& tags, AmbiguityInventory& inv,
                        const AnalyzeOptions& opts) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open gold file '" + path + "'");
    std::optional<ClassId> delim_class;
    if (opts.sentence_delim) {
        TagId t = tags.require(*opts.sentence_delim);
        delim_class = inv.intern({t}, tags);
    }
    std::optional<ClassId> open_cls;

    AmbiguousText text;
    std::vector<Token> cur;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = trim(line);
        if (t.empty()) {
            text.append_document(std::move(cur));
            cur.clear();
            continue;
        }
        if (t[0] == '#') continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw file_error(path, line_no, "expected 'surface<TAB>goldtag'");
        Token tok;
        tok.surface = trim(line.substr(0, tab));
        std::string gold_name = trim(line.substr(tab + 1));
        if (tok.surface.empty() || gold_name.empty())
            throw file_error(path, line_no, "expected 'surface<TAB>goldtag'");
        if (gold_name.find(',') != std::string::npos)
            throw file_error(path, line_no, "gold annotation must be a single tag");
        auto gold = tags.find(gold_name);
        if (!gold) throw file_error(path, line_no, "unknown tag '" + gold_name + "'");
        auto lex_cls = lex.lookup(tok.surface);
        if (lex_cls) {
            tok.cls = *lex_cls;
        } else {
            if (!open_cls) open_cls = open_class_id(tags, inv);
            tok.cls = *open_cls;
        }
        const auto& allowed = inv.tags_of(tok.cls);
        if (!std::binary_search(allowed.begin(), allowed.end(), *gold))
            throw file_error(path, line_no, "gold tag '" + gold_name +
                                                "' not in the class of '" +
                                                tok.surface + "'");
        tok.gold = *gold;
        cur.push_back(std::move(tok));
        if (delim_class && cur.back().cls == *delim_class) {
            text.append_document(std::move(cur));
            cur.clear();
        }
    }
    text.append_document(std::move(cur));
    return text;
}

IdSeq window_context(std::span<const Token> doc, std::size_t t,
                     const WindowSpec& spec) {
    IdSeq key;
    key.reserve(spec.n_minus + spec.n_plus);
    for (int i = spec.n_minus; i >= 1; --i) {
        std::ptrdiff_t p = static_cast<std::ptrdiff_t>(t) - i;
        key.push_back(p < 0 ? kEosClass : doc[p].cls);
    }
    for (int i = 1; i <= spec.n_plus; ++i) {
        std::size_t p = t + i;
        key.push_back(p >= doc.size() ? kEosClass : doc[p].cls);
    }
    return key;
}

std::uint64_t WindowCountTable::context_total(const IdSeq& ctx) const {
    auto it = by_context.find(ctx);
    if (it == by_context.end()) return 0;
    std::uint64_t sum = 0;
    for (const auto& [cls, n] : it->second) sum += n;
    return sum;
}

WindowCountTable count_windows(const AmbiguousText& text, const WindowSpec& spec) {
    if (!spec.valid()) throw std::invalid_argument("invalid window spec");
    WindowCountTable table;
    table.spec = spec;
    for (std::size_t d = 0; d < text.doc_count(); ++d) {
        auto doc = text.doc(d);
        for (std::size_t t = 0; t < doc.size(); ++t) {
            ++table.by_context[window_context(doc, t, spec)][doc[t].cls];
            ++table.total;
        }
    }
    return table;
}

void merge_counts(WindowCountTable& into, const WindowCountTable& from) {
    if (!(into.spec == from.spec))
        throw std::invalid_argument("cannot merge count tables with different windows");
    for (const auto& [ctx, row] : from.by_context) {
        auto& dst = into.by_context[ctx];
        for (const auto& [cls, n] : row) dst[cls] += n;
    }
    into.total += from.total;
}

CorpusStats corpus_stats(const AmbiguousText& text, const AmbiguityInventory& inv) {
    CorpusStats stats;
    stats.words = text.tokens.size();
    std::unordered_set<ClassId> seen;
    std::uint64_t ambiguous = 0;
    for (const auto& tok : text.tokens) {
        seen.insert(tok.cls);
        if (inv.ambiguous(tok.cls)) ++ambiguous;
    }
    stats.ambiguity_classes = seen.size();
    stats.ambiguity_rate =
        stats.words == 0 ? 0.0 : static_cast<double>(ambiguous) / stats.words;
    return stats;
}

}  // namespace swtag
