#include "swtag/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace swtag {

namespace {

std::string hex_double(double v) {
    if (!std::isfinite(v))
        throw std::runtime_error("refusing to serialize a non-finite value");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

std::string hex_u64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string join_ids(std::span<const std::uint32_t> ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(ids[i]);
    }
    return out;
}

// Line-oriented reader that tracks positions for diagnostics.
class LineReader {
public:
    LineReader(const std::string& path) : path_(path), in_(path) {
        if (!in_) throw std::runtime_error("cannot open model file '" + path + "'");
    }
    bool next(std::string& line) {
        if (!std::getline(in_, line)) return false;
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }
    std::string require() {
        std::string line;
        if (!next(line)) throw error("unexpected end of file");
        return line;
    }
    std::runtime_error error(const std::string& msg) const {
        std::ostringstream os;
        os << path_ << ":" << line_no_ << ": " << msg;
        return std::runtime_error(os.str());
    }

private:
    std::string path_;
    std::ifstream in_;
    int line_no_ = 0;
};

double parse_hex_double(const std::string& text, const LineReader& reader) {
    const char* begin = text.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + text.size() || text.empty())
        throw reader.error("bad float '" + text + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& text, const LineReader& reader,
                        int base = 10) {
    char* end = nullptr;
    std::uint64_t v = std::strtoull(text.c_str(), &end, base);
    if (end != text.c_str() + text.size() || text.empty())
        throw reader.error("bad integer '" + text + "'");
    return v;
}

IdSeq parse_ids(const std::string& text, const LineReader& reader) {
    IdSeq ids;
    if (text.empty()) return ids;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ','))
        ids.push_back(static_cast<std::uint32_t>(parse_u64(part, reader)));
    return ids;
}

void expect_header(LineReader& reader, const std::string& key,
                   std::string& value_out) {
    std::string line = reader.require();
    std::size_t space = line.find(' ');
    if (space == std::string::npos || line.substr(0, space) != key)
        throw reader.error("expected '" + key + " ...' header line");
    value_out = line.substr(space + 1);
}

void check_tagset(LineReader& reader, const std::string& value,
                  const TagInventory& tags) {
    if (value != hex_u64(tags.hash()))
        throw reader.error("tagset hash mismatch: model was built for a "
                           "different tagset");
}

// --- ambiguity-class sections -------------------------------------------

void write_classes(std::ostream& out, const std::vector<ClassId>& ids,
                   const AmbiguityInventory& inv) {
    out << "classes " << ids.size() << "\n";
    for (ClassId id : ids)
        out << id << ":" << join_ids(inv.tags_of(id)) << "\n";
}

// Reads a `classes` section and interns every class, returning old->new.
std::unordered_map<ClassId, ClassId> read_classes(LineReader& reader,
                                                  const TagInventory& tags,
                                                  AmbiguityInventory& inv) {
    std::string value;
    expect_header(reader, "classes", value);
    std::size_t count = parse_u64(value, reader);
    std::unordered_map<ClassId, ClassId> remap;
    remap.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::string line = reader.require();
        std::size_t colon = line.find(':');
        if (colon == std::string::npos)
            throw reader.error("expected '<class id>:<tag ids>'");
        ClassId old_id =
            static_cast<ClassId>(parse_u64(line.substr(0, colon), reader));
        IdSeq tag_ids = parse_ids(line.substr(colon + 1), reader);
        if (tag_ids.empty()) throw reader.error("class with no tags");
        std::vector<TagId> set(tag_ids.begin(), tag_ids.end());
        ClassId new_id;
        try {
            new_id = inv.intern(std::move(set), tags);
        } catch (const std::exception& e) {
            throw reader.error(e.what());
        }
        if (!remap.emplace(old_id, new_id).second)
            throw reader.error("duplicate class id in model file");
    }
    return remap;
}

ClassId remap_class(ClassId id, const std::unordered_map<ClassId, ClassId>& remap,
                    const LineReader& reader) {
    auto it = remap.find(id);
    if (it == remap.end())
        throw reader.error("key references class id " + std::to_string(id) +
                           " missing from the classes section");
    return it->second;
}

// Collects every class id appearing in a context key map, sorted.
template <typename Table>
std::vector<ClassId> referenced_classes(const Table& table) {
    std::vector<ClassId> ids;
    for (const auto& [ctx, row] : table)
        ids.insert(ids.end(), ctx.begin(), ctx.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

}  // namespace

void save_model(const SwModel& model, const TagInventory& tags,
                const AmbiguityInventory& inv, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
    out << "swmodel v1\n";
    out << "window " << model.spec.to_string() << "\n";
    out << "tagset " << hex_u64(tags.hash()) << "\n";
    write_classes(out, referenced_classes(model.table), inv);

    // Flatten to (C- , tag, C+) keys and sort.
    std::map<IdSeq, double> entries;
    for (const auto& [ctx, row] : model.table) {
        for (const auto& [tag, v] : row) {
            IdSeq key;
            key.reserve(ctx.size() + 1);
            key.insert(key.end(), ctx.begin(), ctx.begin() + model.spec.n_minus);
            key.push_back(tag);
            key.insert(key.end(), ctx.begin() + model.spec.n_minus, ctx.end());
            entries.emplace(std::move(key), v);
        }
    }
    out << "entries " << entries.size() << "\n";
    for (const auto& [key, v] : entries) {
        std::span<const std::uint32_t> k(key);
        out << join_ids(k.subspan(0, model.spec.n_minus)) << ';'
            << k[model.spec.n_minus] << ';' << join_ids(k.subspan(model.spec.n_minus + 1))
            << '\t' << hex_double(v) << '\n';
    }
}

void save_model(const LswModel& model, const TagInventory& tags,
                const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
    out << "lswmodel v1\n";
    out << "window " << model.spec.to_string() << "\n";
    out << "tagset " << hex_u64(tags.hash()) << "\n";
    out << "rules " << (model.rules_applied ? 1 : 0) << ' '
        << hex_u64(model.rules_hash) << "\n";

    std::map<IdSeq, double> entries(model.table.begin(), model.table.end());
    out << "entries " << entries.size() << "\n";
    for (const auto& [key, v] : entries) {
        std::span<const std::uint32_t> k(key);
        out << join_ids(k.subspan(0, model.spec.n_minus)) << ';'
            << k[model.spec.n_minus] << ';' << join_ids(k.subspan(model.spec.n_minus + 1))
            << '\t' << hex_double(v) << '\n';
    }
}

void save_model(const HmmModel& model, const TagInventory& tags,
                const AmbiguityInventory& inv, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
    out << "hmmmodel v1\n";
    out << "tagset " << hex_u64(tags.hash()) << "\n";
    out << "tags " << model.n_tags << "\n";
    std::vector<ClassId> ids(model.n_classes);
    for (ClassId c = 0; c < model.n_classes; ++c) ids[c] = c;
    write_classes(out, ids, inv);
    out << "transitions\n";
    for (const auto& row : model.trans) {
        for (std::size_t j = 0; j < row.size(); ++j)
            out << (j ? " " : "") << hex_double(row[j]);
        out << '\n';
    }
    out << "emissions\n";
    for (const auto& row : model.emit) {
        for (std::size_t j = 0; j < row.size(); ++j)
            out << (j ? " " : "") << hex_double(row[j]);
        out << '\n';
    }
}

namespace {

// Parses `C-;center;C+<TAB>value` entry lines shared by sw and lsw files.
struct Entry {
    IdSeq left;
    std::uint32_t center;
    IdSeq right;
    double value;
};

Entry parse_entry(const std::string& line, const WindowSpec& spec,
                  LineReader& reader) {
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
        throw reader.error("expected '<key><TAB><value>'");
    std::string key = line.substr(0, tab);
    std::size_t s1 = key.find(';');
    std::size_t s2 = key.find(';', s1 == std::string::npos ? s1 : s1 + 1);
    if (s1 == std::string::npos || s2 == std::string::npos)
        throw reader.error("expected key 'C-;center;C+'");
    Entry e;
    e.left = parse_ids(key.substr(0, s1), reader);
    IdSeq center = parse_ids(key.substr(s1 + 1, s2 - s1 - 1), reader);
    e.right = parse_ids(key.substr(s2 + 1), reader);
    if (center.size() != 1)
        throw reader.error("key center must be a single id");
    e.center = center[0];
    if (static_cast<int>(e.left.size()) != spec.n_minus ||
        static_cast<int>(e.right.size()) != spec.n_plus)
        throw reader.error("key does not match the window spec");
    e.value = parse_hex_double(line.substr(tab + 1), reader);
    if (!(e.value >= 0.0) || !std::isfinite(e.value))
        throw reader.error("effective counts must be finite and non-negative");
    return e;
}

WindowSpec parse_window_header(LineReader& reader) {
    std::string value;
    expect_header(reader, "window", value);
    try {
        return WindowSpec::parse(value);
    } catch (const std::exception& e) {
        throw reader.error(e.what());
    }
}

SwModel load_sw(LineReader& reader, const TagInventory& tags,
                AmbiguityInventory& inv) {
    SwModel model;
    model.spec = parse_window_header(reader);
    std::string value;
    expect_header(reader, "tagset", value);
    check_tagset(reader, value, tags);
    auto remap = read_classes(reader, tags, inv);
    expect_header(reader, "entries", value);
    std::size_t count = parse_u64(value, reader);
    for (std::size_t i = 0; i < count; ++i) {
        Entry e = parse_entry(reader.require(), model.spec, reader);
        if (e.center >= tags.size())
            throw reader.error("unknown tag id in key");
        IdSeq ctx;
        ctx.reserve(e.left.size() + e.right.size());
        for (std::uint32_t id : e.left)
            ctx.push_back(remap_class(id, remap, reader));
        for (std::uint32_t id : e.right)
            ctx.push_back(remap_class(id, remap, reader));
        if (!model.table[ctx].emplace(e.center, e.value).second)
            throw reader.error("duplicate model entry");
    }
    sw_finalize(model, tags.size());
    return model;
}

LswModel load_lsw(LineReader& reader, const TagInventory& tags) {
    LswModel model;
    model.spec = parse_window_header(reader);
    std::string value;
    expect_header(reader, "tagset", value);
    check_tagset(reader, value, tags);
    expect_header(reader, "rules", value);
    std::istringstream rs(value);
    std::string applied, hash;
    if (!(rs >> applied >> hash) || (applied != "0" && applied != "1"))
        throw reader.error("expected 'rules <0|1> <hash>'");
    model.rules_applied = applied == "1";
    model.rules_hash = parse_u64(hash, reader, 16);
    expect_header(reader, "entries", value);
    std::size_t count = parse_u64(value, reader);
    for (std::size_t i = 0; i < count; ++i) {
        Entry e = parse_entry(reader.require(), model.spec, reader);
        IdSeq seq;
        seq.reserve(e.left.size() + 1 + e.right.size());
        seq.insert(seq.end(), e.left.begin(), e.left.end());
        seq.push_back(e.center);
        seq.insert(seq.end(), e.right.begin(), e.right.end());
        for (std::uint32_t id : seq)
            if (id >= tags.size()) throw reader.error("unknown tag id in key");
        if (!model.table.emplace(std::move(seq), e.value).second)
            throw reader.error("duplicate model entry");
    }
    lsw_finalize(model, tags.size());
    return model;
}

std::vector<std::vector<double>> read_matrix(LineReader& reader,
                                             std::size_t rows, std::size_t cols) {
    std::vector<std::vector<double>> m(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        std::string line = reader.require();
        std::istringstream ss(line);
        std::string cell;
        m[i].reserve(cols);
        while (ss >> cell) {
            double v = parse_hex_double(cell, reader);
            if (!(v >= 0.0) || !std::isfinite(v))
                throw reader.error("probabilities must be finite and non-negative");
            m[i].push_back(v);
        }
        if (m[i].size() != cols) throw reader.error("matrix row width mismatch");
    }
    return m;
}

HmmModel load_hmm(LineReader& reader, const TagInventory& tags,
                  AmbiguityInventory& inv) {
    HmmModel model;
    std::string value;
    expect_header(reader, "tagset", value);
    check_tagset(reader, value, tags);
    expect_header(reader, "tags", value);
    std::size_t n_tags = parse_u64(value, reader);
    if (n_tags != tags.size()) throw reader.error("tag count mismatch");
    auto remap = read_classes(reader, tags, inv);
    std::string marker = reader.require();
    if (marker != "transitions") throw reader.error("expected 'transitions'");
    auto trans = read_matrix(reader, n_tags, n_tags);
    marker = reader.require();
    if (marker != "emissions") throw reader.error("expected 'emissions'");
    auto emit_stored = read_matrix(reader, n_tags, remap.size());

    model.n_tags = n_tags;
    model.n_classes = inv.size();
    model.trans = std::move(trans);
    model.emit.assign(n_tags, std::vector<double>(model.n_classes, 0.0));
    for (const auto& [old_id, new_id] : remap)
        if (old_id >= remap.size())
            throw reader.error("emission class ids must be dense");
    for (std::size_t t = 0; t < n_tags; ++t)
        for (const auto& [old_id, new_id] : remap)
            model.emit[t][new_id] = emit_stored[t][old_id];
    return model;
}

}  // namespace

AnyModel load_model(const std::string& path, const TagInventory& tags,
                    AmbiguityInventory& inv) {
    LineReader reader(path);
    std::string version = reader.require();
    if (version == "swmodel v1") return load_sw(reader, tags, inv);
    if (version == "lswmodel v1") return load_lsw(reader, tags);
    if (version == "hmmmodel v1") return load_hmm(reader, tags, inv);
    throw reader.error("unsupported model version '" + version + "'");
}

}  // namespace swtag
