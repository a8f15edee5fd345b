#include "swtag/lsw_tagger.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace swtag {

namespace {

// Splits a context key (left class ids then right class ids) and expands
// each side through T'. Returns the two sequence pools.
struct SidePools {
    std::vector<IdSeq> left;
    std::vector<IdSeq> right;
};

SidePools expand_sides(const IdSeq& ctx, const WindowSpec& spec,
                       const AmbiguityInventory& inv) {
    std::span<const ClassId> all(ctx);
    return {tag_sequences(all.subspan(0, spec.n_minus), inv),
            tag_sequences(all.subspan(spec.n_minus), inv)};
}

IdSeq assemble(const IdSeq& left, TagId center, const IdSeq& right) {
    IdSeq seq;
    seq.reserve(left.size() + 1 + right.size());
    seq.insert(seq.end(), left.begin(), left.end());
    seq.push_back(center);
    seq.insert(seq.end(), right.begin(), right.end());
    return seq;
}

}  // namespace

double LswModel::total_mass() const {
    double sum = 0.0;
    for (const auto& [seq, v] : table) sum += v;
    return sum;
}

double LswModel::param_bound(const WindowSpec& spec, std::size_t tag_count) {
    return std::pow(static_cast<double>(tag_count), spec.n_minus + spec.n_plus + 1);
}

LswModel lsw_init(const WindowCountTable& counts, const AmbiguityInventory& inv,
                  const RuleSet* rules) {
    if (counts.total == 0)
        throw std::invalid_argument("cannot initialize from an empty count table");
    LswModel model;
    model.spec = counts.spec;
    model.rules_applied = rules != nullptr;
    std::size_t forbidden_windows = 0;
    for (const auto& [ctx, row] : counts.by_context) {
        auto sides = expand_sides(ctx, counts.spec, inv);
        for (const auto& [cls, n] : row) {
            const auto& center_tags = inv.tags_of(cls);
            // Collect the window's sequences, partitioned by validity.
            std::vector<IdSeq> valid;
            std::vector<IdSeq> invalid;
            for (const auto& l : sides.left) {
                for (TagId c : center_tags) {
                    for (const auto& r : sides.right) {
                        IdSeq seq = assemble(l, c, r);
                        if (!rules || rules->sequence_valid(seq))
                            valid.push_back(std::move(seq));
                        else
                            invalid.push_back(std::move(seq));
                    }
                }
            }
            if (valid.empty()) {
                // Rules left nothing: keep the window's mass rather than
                // dropping it, spread uniformly over all sequences.
                ++forbidden_windows;
                valid = std::move(invalid);
                invalid.clear();
            }
            double share = static_cast<double>(n) / valid.size();
            for (auto& seq : valid) model.table[std::move(seq)] += share;
            for (auto& seq : invalid) model.table.try_emplace(std::move(seq), 0.0);
        }
    }
    if (forbidden_windows > 0)
        std::cerr << "warning: rules forbid every tag sequence in "
                  << forbidden_windows << " observed window(s); "
                  << "initialized those uniformly instead\n";
    return model;
}

LswModel lsw_iterate(const LswModel& model, const WindowCountTable& counts,
                     const AmbiguityInventory& inv) {
    if (!(model.spec == counts.spec))
        throw std::invalid_argument("model and count table window specs differ");
    // coeff(s) = Σ over windows containing s of n(w) / D(w)
    std::unordered_map<IdSeq, double, IdSeqHash> coeff;
    coeff.reserve(model.table.size());
    std::vector<IdSeq> window_seqs;
    for (const auto& [ctx, row] : counts.by_context) {
        auto sides = expand_sides(ctx, counts.spec, inv);
        for (const auto& [cls, n] : row) {
            const auto& center_tags = inv.tags_of(cls);
            window_seqs.clear();
            double denom = 0.0;
            for (const auto& l : sides.left) {
                for (TagId c : center_tags) {
                    for (const auto& r : sides.right) {
                        IdSeq seq = assemble(l, c, r);
                        denom += model.value(seq);
                        window_seqs.push_back(std::move(seq));
                    }
                }
            }
            if (denom <= 0.0) continue;  // zero-mass window: absorbing
            double term = static_cast<double>(n) / denom;
            for (auto& seq : window_seqs) coeff[std::move(seq)] += term;
        }
    }
    LswModel next;
    next.spec = model.spec;
    next.rules_applied = model.rules_applied;
    next.rules_hash = model.rules_hash;
    next.table.reserve(model.table.size());
    for (const auto& [seq, v] : model.table) {
        auto it = coeff.find(seq);
        next.table.emplace(seq, it == coeff.end() ? 0.0 : v * it->second);
    }
    return next;
}

double lsw_max_relative_change(const LswModel& before, const LswModel& after) {
    double worst = 0.0;
    for (const auto& [seq, old_v] : before.table) {
        double new_v = after.value(seq);
        if (old_v > 0.0)
            worst = std::max(worst, std::abs(new_v - old_v) / old_v);
        else if (new_v != 0.0)
            return std::numeric_limits<double>::infinity();
    }
    return worst;
}

void lsw_finalize(LswModel& model, std::size_t tag_count) {
    // Sorted accumulation, as in sw_finalize: reloaded models must
    // reproduce the mass bit-exactly.
    std::vector<std::pair<TagId, double>> flat;
    flat.reserve(model.table.size());
    for (const auto& [seq, v] : model.table)
        flat.emplace_back(seq[model.spec.n_minus], v);
    std::sort(flat.begin(), flat.end());
    model.global_tag_mass.assign(tag_count, 0.0);
    for (const auto& [tag, v] : flat) {
        if (tag >= model.global_tag_mass.size())
            model.global_tag_mass.resize(tag + 1, 0.0);
        model.global_tag_mass[tag] += v;
    }
}

LswModel lsw_train(const WindowCountTable& counts, const AmbiguityInventory& inv,
                   const RuleSet* rules, const TrainOptions& opts) {
    if (opts.iterations < 0)
        throw std::invalid_argument("iterations must be non-negative");
    LswModel model = lsw_init(counts, inv, rules);
    for (int k = 0; k < opts.iterations; ++k) {
        LswModel next = lsw_iterate(model, counts, inv);
        double change = lsw_max_relative_change(model, next);
        model = std::move(next);
        if (change < opts.epsilon) break;
    }
    lsw_finalize(model, 0);
    return model;
}

double lsw_score(const LswModel& model, std::span<const Token> doc,
                 std::size_t t, TagId tag, const AmbiguityInventory& inv) {
    IdSeq ctx = window_context(doc, t, model.spec);
    auto sides = expand_sides(ctx, model.spec, inv);
    double score = 0.0;
    for (const auto& l : sides.left)
        for (const auto& r : sides.right) score += model.value(assemble(l, tag, r));
    return score;
}

std::vector<TagId> lsw_tag(const LswModel& model, const AmbiguousText& text,
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
            auto sides = expand_sides(ctx, model.spec, inv);
            TagId pick = candidates.front();
            double best = -1.0;
            bool all_zero = true;
            for (TagId cand : candidates) {  // ascending: lowest id wins ties
                double score = 0.0;
                for (const auto& l : sides.left)
                    for (const auto& r : sides.right)
                        score += model.value(assemble(l, cand, r));
                if (score > 0.0) all_zero = false;
                if (score > best) {
                    best = score;
                    pick = cand;
                }
            }
            if (all_zero) {
                best = -1.0;
                for (TagId cand : candidates) {
                    double mass = cand < model.global_tag_mass.size()
                                      ? model.global_tag_mass[cand]
                                      : 0.0;
                    if (mass > best) {
                        best = mass;
                        pick = cand;
                    }
                }
            }
            out.push_back(pick);
        }
    }
    return out;
}

}  // namespace swtag
