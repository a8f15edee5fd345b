#include "swtag/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace swtag {

namespace {

constexpr double kStochasticTol = 1e-9;

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// name=value pairs separated by whitespace
std::vector<std::pair<std::string, double>> parse_weights(const std::string& s,
                                                          const std::string& where) {
    std::vector<std::pair<std::string, double>> out;
    std::istringstream ss(s);
    std::string item;
    while (ss >> item) {
        std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::runtime_error(where + ": expected name=value, got '" + item +
                                     "'");
        out.emplace_back(item.substr(0, eq), std::stod(item.substr(eq + 1)));
    }
    if (out.empty()) throw std::runtime_error(where + ": empty weight list");
    return out;
}

// Portable uniform in [0,1): 53 random bits from a standard-specified engine.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t sample(const std::vector<double>& dist, std::mt19937_64& rng) {
    double u = uniform01(rng);
    double acc = 0.0;
    std::size_t last_positive = 0;
    bool seen = false;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist[i] <= 0.0) continue;
        acc += dist[i];
        last_positive = i;
        seen = true;
        if (u < acc) return i;
    }
    if (!seen) throw std::runtime_error("cannot sample from an all-zero distribution");
    return last_positive;  // u landed in the rounding gap at the top
}

}  // namespace

void SyntheticSpec::validate() const {
    const std::size_t n = tag_names.size();
    if (n == 0) throw std::runtime_error("synthetic spec: no tags");
    for (const auto& name : tag_names)
        if (name.empty() || name == kEosName)
            throw std::runtime_error("synthetic spec: bad tag name '" + name + "'");
    if (start.size() != n || transition.size() != n)
        throw std::runtime_error("synthetic spec: start/transition size mismatch");

    auto check_row = [&](const std::vector<double>& row, const std::string& what) {
        if (row.size() != (what == "start" ? n : n))
            throw std::runtime_error("synthetic spec: " + what + " row size mismatch");
        double sum = 0.0;
        for (double v : row) {
            if (v < 0.0 || !std::isfinite(v))
                throw std::runtime_error("synthetic spec: negative weight in " + what);
            sum += v;
        }
        if (std::abs(sum - 1.0) > kStochasticTol)
            throw std::runtime_error("synthetic spec: " + what +
                                     " row does not sum to 1");
    };
    check_row(start, "start");
    for (const auto& row : transition) check_row(row, "transition");

    if (class_names.size() != class_tags.size() || class_names.empty())
        throw std::runtime_error("synthetic spec: no classes");
    for (const auto& members : class_tags) {
        if (members.empty())
            throw std::runtime_error("synthetic spec: empty class");
        for (std::size_t t : members)
            if (t >= n) throw std::runtime_error("synthetic spec: bad class member");
    }

    if (emission.size() != n)
        throw std::runtime_error("synthetic spec: emission rows != tags");
    for (std::size_t t = 0; t < n; ++t) {
        const auto& row = emission[t];
        if (row.size() != class_names.size())
            throw std::runtime_error("synthetic spec: emission row size mismatch");
        double sum = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (row[c] < 0.0 || !std::isfinite(row[c]))
                throw std::runtime_error("synthetic spec: negative emission");
            if (row[c] > 0.0 &&
                std::find(class_tags[c].begin(), class_tags[c].end(), t) ==
                    class_tags[c].end())
                throw std::runtime_error("synthetic spec: tag '" + tag_names[t] +
                                         "' emits class '" + class_names[c] +
                                         "' that does not contain it");
            sum += row[c];
        }
        if (std::abs(sum - 1.0) > kStochasticTol)
            throw std::runtime_error("synthetic spec: emission row for '" +
                                     tag_names[t] + "' does not sum to 1");
    }

    // Reachability: every class must be emitted by some tag reachable from
    // the start distribution through positive transitions.
    std::vector<bool> reach(n, false);
    std::vector<std::size_t> queue;
    for (std::size_t t = 0; t < n; ++t)
        if (start[t] > 0.0) {
            reach[t] = true;
            queue.push_back(t);
        }
    while (!queue.empty()) {
        std::size_t t = queue.back();
        queue.pop_back();
        for (std::size_t j = 0; j < n; ++j)
            if (transition[t][j] > 0.0 && !reach[j]) {
                reach[j] = true;
                queue.push_back(j);
            }
    }
    for (std::size_t c = 0; c < class_names.size(); ++c) {
        bool ok = false;
        for (std::size_t t = 0; t < n && !ok; ++t)
            ok = reach[t] && emission[t][c] > 0.0;
        if (!ok)
            throw std::runtime_error("synthetic spec: class '" + class_names[c] +
                                     "' is unreachable");
    }

    if (doc_len == 0 || length == 0)
        throw std::runtime_error("synthetic spec: zero length");
}

SyntheticSpec load_synthetic_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open synthetic spec '" + path + "'");
    SyntheticSpec spec;
    std::vector<std::pair<std::string, std::string>> trans_lines, emit_lines;
    std::vector<std::pair<std::string, std::string>> start_parts;
    std::string start_line;
    std::string line;
    int line_no = 0;

    auto where = [&] { return path + ":" + std::to_string(line_no); };

    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::istringstream ss(t);
        std::string key;
        ss >> key;
        std::string rest = trim(t.substr(key.size()));
        if (key == "tags") {
            std::istringstream names(rest);
            std::string n;
            while (names >> n) spec.tag_names.push_back(n);
        } else if (key == "start") {
            start_line = rest;
        } else if (key == "trans") {
            std::size_t colon = rest.find(':');
            if (colon == std::string::npos)
                throw std::runtime_error(where() + ": expected 'trans <tag>: ...'");
            trans_lines.emplace_back(trim(rest.substr(0, colon)),
                                     trim(rest.substr(colon + 1)));
        } else if (key == "class") {
            std::size_t eq = rest.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error(where() + ": expected 'class <name> = tag,...'");
            spec.class_names.push_back(trim(rest.substr(0, eq)));
            std::string members = rest.substr(eq + 1);
            std::vector<std::size_t> ids;
            std::stringstream ms(members);
            std::string m;
            while (std::getline(ms, m, ',')) {
                m = trim(m);
                if (m.empty()) continue;
                auto it = std::find(spec.tag_names.begin(), spec.tag_names.end(), m);
                if (it == spec.tag_names.end())
                    throw std::runtime_error(where() + ": unknown tag '" + m + "'");
                ids.push_back(it - spec.tag_names.begin());
            }
            spec.class_tags.push_back(std::move(ids));
        } else if (key == "emit") {
            std::size_t colon = rest.find(':');
            if (colon == std::string::npos)
                throw std::runtime_error(where() + ": expected 'emit <tag>: ...'");
            emit_lines.emplace_back(trim(rest.substr(0, colon)),
                                    trim(rest.substr(colon + 1)));
        } else if (key == "doc_len") {
            spec.doc_len = std::stoull(rest);
        } else if (key == "length") {
            spec.length = std::stoull(rest);
        } else if (key == "test_length") {
            spec.test_length = std::stoull(rest);
        } else if (key == "seed") {
            spec.seed = std::stoull(rest);
        } else {
            throw std::runtime_error(where() + ": unknown directive '" + key + "'");
        }
    }

    const std::size_t n = spec.tag_names.size();
    auto tag_index = [&](const std::string& name) -> std::size_t {
        auto it = std::find(spec.tag_names.begin(), spec.tag_names.end(), name);
        if (it == spec.tag_names.end())
            throw std::runtime_error(path + ": unknown tag '" + name + "'");
        return it - spec.tag_names.begin();
    };
    auto class_index = [&](const std::string& name) -> std::size_t {
        auto it = std::find(spec.class_names.begin(), spec.class_names.end(), name);
        if (it == spec.class_names.end())
            throw std::runtime_error(path + ": unknown class '" + name + "'");
        return it - spec.class_names.begin();
    };

    spec.start.assign(n, 0.0);
    if (!start_line.empty())
        for (const auto& [name, w] : parse_weights(start_line, path + ": start"))
            spec.start[tag_index(name)] = w;
    spec.transition.assign(n, std::vector<double>(n, 0.0));
    for (const auto& [tag, weights] : trans_lines)
        for (const auto& [name, w] : parse_weights(weights, path + ": trans " + tag))
            spec.transition[tag_index(tag)][tag_index(name)] = w;
    spec.emission.assign(n, std::vector<double>(spec.class_names.size(), 0.0));
    for (const auto& [tag, weights] : emit_lines)
        for (const auto& [name, w] : parse_weights(weights, path + ": emit " + tag))
            spec.emission[tag_index(tag)][class_index(name)] = w;

    spec.validate();
    return spec;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    SyntheticData data;
    std::vector<TagId> tag_ids;
    for (const auto& name : spec.tag_names)
        tag_ids.push_back(data.tags.add_tag(name, /*open=*/true));
    std::vector<ClassId> class_ids;
    for (std::size_t c = 0; c < spec.class_names.size(); ++c) {
        std::vector<TagId> members;
        for (std::size_t t : spec.class_tags[c]) members.push_back(tag_ids[t]);
        ClassId id = data.classes.intern(std::move(members), data.tags);
        class_ids.push_back(id);
        data.lexicon.add(spec.class_names[c], id);
    }
    for (std::size_t i = 0; i < spec.tag_names.size(); ++i)
        for (std::size_t j = 0; j < spec.tag_names.size(); ++j)
            if (spec.transition[i][j] == 0.0)
                data.rules.add_forbid(tag_ids[i], tag_ids[j]);

    std::mt19937_64 rng(spec.seed);
    auto emit_text = [&](std::size_t total, bool with_gold) {
        AmbiguousText text;
        std::vector<Token> doc;
        std::size_t emitted = 0;
        std::size_t prev = 0;
        bool doc_start = true;
        while (emitted < total) {
            std::size_t tag =
                sample(doc_start ? spec.start : spec.transition[prev], rng);
            doc_start = false;
            std::size_t cls = sample(spec.emission[tag], rng);
            Token tok;
            tok.surface = spec.class_names[cls];
            tok.cls = class_ids[cls];
            if (with_gold) tok.gold = tag_ids[tag];
            doc.push_back(std::move(tok));
            prev = tag;
            ++emitted;
            if (doc.size() == spec.doc_len) {
                text.append_document(std::move(doc));
                doc.clear();
                doc_start = true;
            }
        }
        text.append_document(std::move(doc));
        return text;
    };
    data.train = emit_text(spec.length, /*with_gold=*/false);
    data.test = emit_text(spec.test_length, /*with_gold=*/true);
    return data;
}

void write_synthetic_files(const SyntheticSpec& spec, const SyntheticData& data,
                           const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto open = [&](const std::string& name) {
        std::ofstream out(fs::path(dir) / name);
        if (!out) throw std::runtime_error("cannot write '" + name + "' in " + dir);
        return out;
    };

    auto tagset = open("tagset.txt");
    for (const auto& name : spec.tag_names) tagset << "open: " << name << "\n";

    auto lexicon = open("lexicon.txt");
    for (std::size_t c = 0; c < spec.class_names.size(); ++c) {
        lexicon << spec.class_names[c] << '\t';
        for (std::size_t i = 0; i < spec.class_tags[c].size(); ++i)
            lexicon << (i ? "," : "") << spec.tag_names[spec.class_tags[c][i]];
        lexicon << '\n';
    }

    auto rules = open("rules.txt");
    for (std::size_t i = 0; i < spec.tag_names.size(); ++i)
        for (std::size_t j = 0; j < spec.tag_names.size(); ++j)
            if (spec.transition[i][j] == 0.0)
                rules << "FORBID " << spec.tag_names[i] << ' ' << spec.tag_names[j]
                      << '\n';

    auto write_text = [&](const AmbiguousText& text, const std::string& name,
                          bool with_gold) {
        auto out = open(name);
        for (std::size_t d = 0; d < text.doc_count(); ++d) {
            if (d) out << '\n';
            for (const Token& tok : text.doc(d)) {
                out << tok.surface;
                if (with_gold) out << '\t' << data.tags.name(*tok.gold);
                out << '\n';
            }
        }
    };
    write_text(data.train, "train.txt", false);
    write_text(data.test, "test.txt", true);
}

}  // namespace swtag
