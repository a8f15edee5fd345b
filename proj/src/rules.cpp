#include "swtag/rules.hpp"

#include <algorithm>
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

void RuleSet::add_forbid(TagId a, TagId b) { forbid_.insert(pack(a, b)); }

void RuleSet::add_enforce(TagId a, const std::vector<TagId>& allowed) {
    if (allowed.empty())
        throw std::invalid_argument("enforce rule with empty successor list");
    auto& set = enforce_[a];
    set.insert(allowed.begin(), allowed.end());
}

bool RuleSet::bigram_valid(TagId a, TagId b) const {
    if (forbid_.contains(pack(a, b))) return false;
    if (b == kEosTag) return true;  // permissive boundary default
    auto it = enforce_.find(a);
    if (it != enforce_.end() && !it->second.contains(b)) return false;
    return true;
}

bool RuleSet::sequence_valid(std::span<const TagId> seq) const {
    for (std::size_t i = 0; i + 1 < seq.size(); ++i)
        if (!bigram_valid(seq[i], seq[i + 1])) return false;
    return true;
}

void RuleSet::check_consistent(const TagInventory& tags) const {
    for (const auto& [a, allowed] : enforce_) {
        for (TagId b : allowed) {
            if (forbid_.contains(pack(a, b)))
                throw std::runtime_error("contradictory rules: (" + tags.name(a) +
                                         "," + tags.name(b) +
                                         ") is both forbidden and enforce-allowed");
        }
    }
}

std::uint64_t RuleSet::hash(const TagInventory& tags) const {
    // Canonical listing: sorted FORBID lines then sorted ENFORCE lines.
    std::vector<std::string> lines;
    for (std::uint64_t packed : forbid_) {
        TagId a = static_cast<TagId>(packed >> 32);
        TagId b = static_cast<TagId>(packed & 0xffffffffu);
        lines.push_back("F " + tags.name(a) + " " + tags.name(b));
    }
    for (const auto& [a, allowed] : enforce_) {
        std::vector<TagId> sorted(allowed.begin(), allowed.end());
        std::sort(sorted.begin(), sorted.end());
        std::string line = "E " + tags.name(a) + ":";
        for (TagId b : sorted) line += " " + tags.name(b);
        lines.push_back(std::move(line));
    }
    std::sort(lines.begin(), lines.end());
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& line : lines) {
        for (unsigned char c : line) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= '\n';
        h *= 1099511628211ull;
    }
    return h;
}

RuleSet parse_rules(const std::string& path, const TagInventory& tags) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open rules file '" + path + "'");
    RuleSet rules;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::istringstream ss(t);
        std::string keyword;
        ss >> keyword;
        try {
            if (keyword == "FORBID") {
                std::string a, b, extra;
                ss >> a >> b;
                if (a.empty() || b.empty() || (ss >> extra))
                    throw std::runtime_error("expected 'FORBID <tagA> <tagB>'");
                rules.add_forbid(tags.require(a), tags.require(b));
            } else if (keyword == "ENFORCE") {
                std::string rest = trim(t.substr(7));
                std::size_t colon = rest.find(':');
                if (colon == std::string::npos)
                    throw std::runtime_error(
                        "expected 'ENFORCE <tagA>: <tagB>[,<tagC>...]'");
                std::string a = trim(rest.substr(0, colon));
                std::vector<TagId> allowed;
                std::stringstream names(rest.substr(colon + 1));
                std::string name;
                while (std::getline(names, name, ',')) {
                    name = trim(name);
                    if (!name.empty()) allowed.push_back(tags.require(name));
                }
                if (a.empty() || allowed.empty())
                    throw std::runtime_error("enforce rule with empty successor list");
                rules.add_enforce(tags.require(a), allowed);
            } else {
                throw std::runtime_error("unknown rule keyword '" + keyword + "'");
            }
        } catch (const std::exception& e) {
            throw file_error(path, line_no, e.what());
        }
    }
    rules.check_consistent(tags);
    return rules;
}

std::vector<IdSeq> valid_sequences(std::span<const ClassId> window,
                                   const RuleSet& rules,
                                   const AmbiguityInventory& inv) {
    std::vector<IdSeq> out = tag_sequences(window, inv);
    std::erase_if(out, [&](const IdSeq& seq) { return !rules.sequence_valid(seq); });
    return out;
}

}  // namespace swtag
