#include "swtag/sw_tagger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swtag {

double SwModel::value(const IdSeq& ctx, TagId tag) const {
    auto it = table.find(ctx);
    if (it == table.end()) return 0.0;
    auto jt = it->second.find(tag);
    return jt == it->second.end() ? 0.0 : jt->second;
}

double SwModel::context_mass(const IdSeq& ctx) const {
    auto it = table.find(ctx);
    if (it == table.end()) return 0.0;
    double sum = 0.0;
    for (const auto& [tag, v] : it->second) sum += v;
    return sum;
}

std::size_t SwModel::entry_count() const {
    std::size_t n = 0;
    for (const auto& [ctx, row] : table) n += row.size();
    return n;
}

SwModel sw_init(const WindowCountTable& counts, const AmbiguityInventory& inv) {
    if (counts.total == 0)
        throw std::invalid_argument("cannot initialize from an empty count table");
    SwModel model;
    model.spec = counts.spec;
    for (const auto& [ctx, row] : counts.by_context) {
        auto& dst = model.table[ctx];
        for (const auto& [cls, n] : row) {
            const auto& tags = inv.tags_of(cls);
            double share = static_cast<double>(n) / tags.size();
            for (TagId t : tags) dst[t] += share;
        }
    }
    return model;
}

SwModel sw_iterate(const SwModel& model, const WindowCountTable& counts,
                   const AmbiguityInventory& inv) {
    if (!(model.spec == counts.spec))
        throw std::invalid_argument("model and count table window specs differ");
    SwModel next;
    next.spec = model.spec;
    for (const auto& [ctx, row] : model.table) {
        auto& dst = next.table[ctx];
        auto cit = counts.by_context.find(ctx);
        if (cit == counts.by_context.end()) {
            // No observations for this context: every update sum is empty.
            for (const auto& [tag, v] : row) dst[tag] = 0.0;
            continue;
        }
        // factor(γ) = Σ over observed center classes containing γ of
        // n(σ) / (current mass of T(σ) in this context)
        std::unordered_map<TagId, double> factor;
        factor.reserve(row.size());
        for (const auto& [cls, n] : cit->second) {
            const auto& tags = inv.tags_of(cls);
            double denom = 0.0;
            for (TagId t : tags) {
                auto it = row.find(t);
                if (it != row.end()) denom += it->second;
            }
            if (denom <= 0.0) continue;  // zero-mass class: contributes nothing
            double term = static_cast<double>(n) / denom;
            for (TagId t : tags) factor[t] += term;
        }
        for (const auto& [tag, v] : row) {
            auto it = factor.find(tag);
            dst[tag] = it == factor.end() ? 0.0 : v * it->second;
        }
    }
    return next;
}

double max_relative_change(const SwModel& before, const SwModel& after) {
    double worst = 0.0;
    for (const auto& [ctx, row] : before.table) {
        auto it = after.table.find(ctx);
        for (const auto& [tag, old_v] : row) {
            double new_v = 0.0;
            if (it != after.table.end()) {
                auto jt = it->second.find(tag);
                if (jt != it->second.end()) new_v = jt->second;
            }
            if (old_v > 0.0)
                worst = std::max(worst, std::abs(new_v - old_v) / old_v);
            else if (new_v != 0.0)
                return std::numeric_limits<double>::infinity();
        }
    }
    return worst;
}

void sw_finalize(SwModel& model, std::size_t tag_count) {
    // Sorted accumulation: the mass must not depend on hash-map layout, so a
    // reloaded model reproduces it bit-exactly.
    std::vector<std::pair<TagId, double>> flat;
    for (const auto& [ctx, row] : model.table)
        for (const auto& [tag, v] : row) flat.emplace_back(tag, v);
    std::sort(flat.begin(), flat.end());
    model.global_tag_mass.assign(tag_count, 0.0);
    for (const auto& [tag, v] : flat) {
        if (tag >= model.global_tag_mass.size())
            model.global_tag_mass.resize(tag + 1, 0.0);
        model.global_tag_mass[tag] += v;
    }
}

SwModel sw_train(const WindowCountTable& counts, const AmbiguityInventory& inv,
                 const TrainOptions& opts) {
    if (opts.iterations < 0)
        throw std::invalid_argument("iterations must be non-negative");
    SwModel model = sw_init(counts, inv);
    for (int k = 0; k < opts.iterations; ++k) {
        SwModel next = sw_iterate(model, counts, inv);
        double change = max_relative_change(model, next);
        model = std::move(next);
        if (change < opts.epsilon) break;
    }
    sw_finalize(model, 0);
    return model;
}

namespace {

// Argmax over `candidates` of `score`, lowest tag id on ties. Returns the
// first candidate when every score is zero or negative-infinity-like.
template <typename ScoreFn>
TagId argmax_tag(const std::vector<TagId>& candidates, ScoreFn score,
                 bool* all_zero = nullptr) {
    TagId best = candidates.front();
    double best_score = -1.0;
    bool zero = true;
    for (TagId t : candidates) {  // ascending ids: strict > keeps the lowest
        double s = score(t);
        if (s > 0.0) zero = false;
        if (s > best_score) {
            best_score = s;
            best = t;
        }
    }
    if (all_zero) *all_zero = zero;
    return best;
}

}  // namespace

std::vector<TagId> sw_tag(const SwModel& model, const AmbiguousText& text,
                          const AmbiguityInventory& inv) {
    std::vector<TagId> out;
    out.reserve(text.tokens.size());
    for (std::size_t d = 0; d < text.doc_count(); ++d) {
        auto doc = text.doc(d);
        for (std::size_t t = 0; t < doc.size(); ++t) {
            const auto& candidates = inv.tags_of(doc[t].cls);
            if (candidates.size() == 1) {
                out.push_back(candidates.front());
                continue;
            }
            IdSeq ctx = window_context(doc, t, model.spec);
            auto it = model.table.find(ctx);
            bool all_zero = true;
            TagId pick = candidates.front();
            if (it != model.table.end()) {
                const auto& row = it->second;
                pick = argmax_tag(
                    candidates,
                    [&](TagId tag) {
                        auto jt = row.find(tag);
                        return jt == row.end() ? 0.0 : jt->second;
                    },
                    &all_zero);
            }
            if (all_zero) {
                // Unseen context or zero candidates: global mass decides.
                pick = argmax_tag(candidates, [&](TagId tag) {
                    return tag < model.global_tag_mass.size()
                               ? model.global_tag_mass[tag]
                               : 0.0;
                });
            }
            out.push_back(pick);
        }
    }
    return out;
}

}  // namespace swtag
