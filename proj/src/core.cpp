#include "swtag/core.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

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

}  // namespace

std::string WindowSpec::to_string() const {
    std::string out;
    for (int i = n_minus; i >= 1; --i) {
        if (!out.empty()) out += ',';
        out += '-';
        out += std::to_string(i);
    }
    for (int i = 1; i <= n_plus; ++i) {
        if (!out.empty()) out += ',';
        out += '+';
        out += std::to_string(i);
    }
    return out;
}

WindowSpec WindowSpec::parse(const std::string& text) {
    std::vector<int> positions;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        part = trim(part);
        if (part.empty())
            throw std::invalid_argument("bad window spec '" + text + "'");
        int v = 0;
        const char* b = part.data();
        if (*b == '+') ++b;  // from_chars rejects a leading plus
        auto res = std::from_chars(b, part.data() + part.size(), v);
        if (res.ec != std::errc{} || res.ptr != part.data() + part.size() || v == 0)
            throw std::invalid_argument("bad window position '" + part + "'");
        positions.push_back(v);
    }
    std::sort(positions.begin(), positions.end());
    WindowSpec spec{0, 0};
    for (int p : positions) {
        if (p < 0) ++spec.n_minus;
        else ++spec.n_plus;
    }
    // Positions must be exactly -n_minus..-1 and +1..+n_plus, no gaps.
    std::vector<int> expect;
    for (int i = spec.n_minus; i >= 1; --i) expect.push_back(-i);
    for (int i = 1; i <= spec.n_plus; ++i) expect.push_back(i);
    if (positions != expect || !spec.valid())
        throw std::invalid_argument("bad window spec '" + text +
                                    "': positions must be contiguous around 0, "
                                    "at most " + std::to_string(kMaxContext) +
                                    " per side");
    return spec;
}

TagInventory::TagInventory() {
    names_.emplace_back(kEosName);
    by_name_.emplace(kEosName, kEosTag);
}

TagId TagInventory::add_tag(const std::string& name, bool open) {
    if (name.empty()) throw std::invalid_argument("empty tag name");
    if (name == kEosName)
        throw std::invalid_argument("tag name 'EOS' is reserved for the boundary");
    auto it = by_name_.find(name);
    TagId id;
    if (it != by_name_.end()) {
        if (!open)
            throw std::invalid_argument("duplicate tag '" + name + "'");
        id = it->second;
    } else {
        id = static_cast<TagId>(names_.size());
        names_.push_back(name);
        by_name_.emplace(name, id);
    }
    if (open && std::find(open_.begin(), open_.end(), id) == open_.end())
        open_.push_back(id);
    return id;
}

std::optional<TagId> TagInventory::find(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

TagId TagInventory::require(const std::string& name) const {
    auto id = find(name);
    if (!id) throw std::runtime_error("unknown tag '" + name + "'");
    return *id;
}

const std::string& TagInventory::name(TagId id) const {
    if (id >= names_.size()) throw std::out_of_range("unknown tag id");
    return names_[id];
}

std::uint64_t TagInventory::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& n : names_) {
        for (unsigned char c : n) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= '\n';
        h *= 1099511628211ull;
    }
    return h;
}

AmbiguityInventory::AmbiguityInventory() {
    classes_.push_back({kEosTag});
    lookup_.emplace(IdSeq{kEosTag}, kEosClass);
}

ClassId AmbiguityInventory::intern(std::vector<TagId> tag_set,
                                   const TagInventory& tags) {
    if (tag_set.empty()) throw std::invalid_argument("empty ambiguity class");
    std::sort(tag_set.begin(), tag_set.end());
    tag_set.erase(std::unique(tag_set.begin(), tag_set.end()), tag_set.end());
    for (TagId t : tag_set)
        if (t >= tags.size())
            throw std::invalid_argument("unknown tag id in ambiguity class");
    auto it = lookup_.find(tag_set);
    if (it != lookup_.end()) return it->second;
    ClassId id = static_cast<ClassId>(classes_.size());
    lookup_.emplace(tag_set, id);
    classes_.push_back(std::move(tag_set));
    return id;
}

std::optional<ClassId> AmbiguityInventory::find(std::vector<TagId> tag_set) const {
    std::sort(tag_set.begin(), tag_set.end());
    tag_set.erase(std::unique(tag_set.begin(), tag_set.end()), tag_set.end());
    auto it = lookup_.find(tag_set);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

const std::vector<TagId>& AmbiguityInventory::tags_of(ClassId id) const {
    if (id >= classes_.size()) throw std::out_of_range("unknown class id");
    return classes_[id];
}

void Lexicon::add(std::string surface, ClassId cls) {
    auto [it, inserted] = entries_.emplace(std::move(surface), cls);
    if (!inserted)
        throw std::invalid_argument("duplicate lexicon entry '" + it->first + "'");
}

std::optional<ClassId> Lexicon::lookup(const std::string& surface) const {
    auto it = entries_.find(surface);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::vector<IdSeq> tag_sequences(std::span<const ClassId> classes,
                                 const AmbiguityInventory& inv) {
    if (classes.size() > 2 * kMaxContext + 1)
        throw std::invalid_argument("class sequence longer than window ceiling");
    std::vector<IdSeq> out;
    out.emplace_back();  // empty product
    for (ClassId c : classes) {
        const auto& tags = inv.tags_of(c);
        std::vector<IdSeq> next;
        next.reserve(out.size() * tags.size());
        for (const auto& prefix : out) {
            for (TagId t : tags) {
                IdSeq seq = prefix;
                seq.push_back(t);
                next.push_back(std::move(seq));
            }
        }
        out = std::move(next);
    }
    return out;
}

std::size_t tag_sequence_count(std::span<const ClassId> classes,
                               const AmbiguityInventory& inv) {
    std::size_t n = 1;
    for (ClassId c : classes) n *= inv.tags_of(c).size();
    return n;
}

TagInventory load_tagset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tagset file '" + path + "'");
    TagInventory tags;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        bool open = false;
        if (t.rfind("open:", 0) == 0) {
            open = true;
            t = trim(t.substr(5));
            if (t.empty()) throw file_error(path, line_no, "open: without a tag name");
        }
        try {
            tags.add_tag(t, open);
        } catch (const std::exception& e) {
            throw file_error(path, line_no, e.what());
        }
    }
    return tags;
}

Lexicon load_lexicon(const std::string& path, const TagInventory& tags,
                     AmbiguityInventory& inv) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lexicon file '" + path + "'");
    Lexicon lex;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw file_error(path, line_no, "expected 'surface<TAB>tag1,tag2,...'");
        std::string surface = trim(line.substr(0, tab));
        std::string rest = line.substr(tab + 1);
        if (surface.empty()) throw file_error(path, line_no, "empty surface form");
        std::vector<TagId> set;
        std::stringstream ss(rest);
        std::string name;
        while (std::getline(ss, name, ',')) {
            name = trim(name);
            if (name.empty()) continue;
            if (name == kEosName)
                throw file_error(path, line_no, "EOS cannot appear in a lexicon entry");
            auto id = tags.find(name);
            if (!id) throw file_error(path, line_no, "unknown tag '" + name + "'");
            set.push_back(*id);
        }
        if (set.empty()) throw file_error(path, line_no, "entry with no tags");
        try {
            lex.add(std::move(surface), inv.intern(std::move(set), tags));
        } catch (const std::exception& e) {
            throw file_error(path, line_no, e.what());
        }
    }
    return lex;
}

ClassId open_class_id(const TagInventory& tags, AmbiguityInventory& inv) {
    if (tags.open_class().empty())
        throw std::runtime_error("tagset declares no open-class tags");
    return inv.intern(tags.open_class(), tags);
}

}  // namespace swtag
