#include "swtag/hmm_tagger.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace swtag {

namespace {

void check_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw std::runtime_error(std::string("non-finite value in ") + what);
}

// Forward pass with per-position scaling. Returns the scaled alphas, the
// scale factors, and the final EOS factor; log-likelihood is the sum of
// their logs. States are restricted to each token's class.
struct ForwardResult {
    std::vector<std::vector<double>> alpha;  // alpha[t][tag], normalized rows
    std::vector<double> scale;               // c_t per position
    double end_scale = 0.0;                  // Σ_j alpha[L-1][j] a(j, EOS)
    double log_likelihood = 0.0;
};

ForwardResult forward(const HmmModel& model, std::span<const Token> doc,
                      const AmbiguityInventory& inv) {
    const std::size_t len = doc.size();
    ForwardResult fr;
    fr.alpha.assign(len, {});
    fr.scale.assign(len, 0.0);
    for (std::size_t t = 0; t < len; ++t) {
        const auto& states = inv.tags_of(doc[t].cls);
        auto& cur = fr.alpha[t];
        cur.assign(model.n_tags, 0.0);
        double total = 0.0;
        if (t == 0) {
            for (TagId j : states) {
                cur[j] = model.transition(kEosTag, j) * model.emission(j, doc[t].cls);
                total += cur[j];
            }
        } else {
            const auto& prev_states = inv.tags_of(doc[t - 1].cls);
            const auto& prev = fr.alpha[t - 1];
            for (TagId j : states) {
                double sum = 0.0;
                for (TagId i : prev_states) sum += prev[i] * model.transition(i, j);
                cur[j] = sum * model.emission(j, doc[t].cls);
                total += cur[j];
            }
        }
        check_finite(total, "forward pass");
        if (total <= 0.0)
            throw std::runtime_error(
                "document has zero probability under the model (position " +
                std::to_string(t) + ")");
        for (TagId j : states) cur[j] /= total;
        fr.scale[t] = total;
        fr.log_likelihood += std::log(total);
    }
    fr.end_scale = 0.0;
    for (TagId j : inv.tags_of(doc[len - 1].cls))
        fr.end_scale += fr.alpha[len - 1][j] * model.transition(j, kEosTag);
    check_finite(fr.end_scale, "forward pass");
    if (fr.end_scale <= 0.0)
        throw std::runtime_error(
            "document has zero probability under the model (final boundary)");
    fr.log_likelihood += std::log(fr.end_scale);
    return fr;
}

// Backward pass sharing the forward scales; beta[t][i] is defined so that
// alpha[t][i] * beta[t][i] is the state posterior.
std::vector<std::vector<double>> backward(const HmmModel& model,
                                          std::span<const Token> doc,
                                          const AmbiguityInventory& inv,
                                          const ForwardResult& fr) {
    const std::size_t len = doc.size();
    std::vector<std::vector<double>> beta(len);
    beta[len - 1].assign(model.n_tags, 0.0);
    for (TagId j : inv.tags_of(doc[len - 1].cls))
        beta[len - 1][j] = model.transition(j, kEosTag) / fr.end_scale;
    for (std::size_t t = len - 1; t-- > 0;) {
        const auto& states = inv.tags_of(doc[t].cls);
        const auto& next_states = inv.tags_of(doc[t + 1].cls);
        beta[t].assign(model.n_tags, 0.0);
        for (TagId i : states) {
            double sum = 0.0;
            for (TagId j : next_states)
                sum += model.transition(i, j) * model.emission(j, doc[t + 1].cls) *
                       beta[t + 1][j];
            beta[t][i] = sum / fr.scale[t + 1];
        }
    }
    return beta;
}

}  // namespace

HmmModel hmm_init(const TagInventory& tags, const AmbiguityInventory& inv,
                  const RuleSet* rules) {
    HmmModel model;
    model.n_tags = tags.size();
    model.n_classes = inv.size();
    model.trans.assign(model.n_tags, std::vector<double>(model.n_tags, 0.0));
    model.emit.assign(model.n_tags, std::vector<double>(model.n_classes, 0.0));

    for (TagId i = 0; i < model.n_tags; ++i) {
        std::size_t legal = 0;
        for (TagId j = 0; j < model.n_tags; ++j)
            if (!rules || rules->bigram_valid(i, j)) ++legal;
        if (legal == 0)
            throw std::runtime_error("rules leave tag '" + tags.name(i) +
                                     "' without any legal successor");
        double p = 1.0 / legal;
        for (TagId j = 0; j < model.n_tags; ++j)
            if (!rules || rules->bigram_valid(i, j)) model.trans[i][j] = p;
    }

    std::vector<std::vector<ClassId>> classes_of(model.n_tags);
    for (ClassId c = 0; c < model.n_classes; ++c)
        for (TagId t : inv.tags_of(c)) classes_of[t].push_back(c);
    for (TagId t = 0; t < model.n_tags; ++t) {
        if (classes_of[t].empty()) continue;  // tag never observable
        double p = 1.0 / classes_of[t].size();
        for (ClassId c : classes_of[t]) model.emit[t][c] = p;
    }
    return model;
}

DocPosteriors hmm_posteriors(const HmmModel& model, std::span<const Token> doc,
                             const AmbiguityInventory& inv) {
    if (doc.empty()) return {};
    ForwardResult fr = forward(model, doc, inv);
    auto beta = backward(model, doc, inv, fr);
    DocPosteriors post;
    post.log_likelihood = fr.log_likelihood;
    post.gamma.assign(doc.size(), std::vector<double>(model.n_tags, 0.0));
    for (std::size_t t = 0; t < doc.size(); ++t)
        for (TagId j : inv.tags_of(doc[t].cls))
            post.gamma[t][j] = fr.alpha[t][j] * beta[t][j];
    return post;
}

HmmTrainResult hmm_train(HmmModel model, const AmbiguousText& text,
                         const AmbiguityInventory& inv,
                         const TrainOptions& opts) {
    if (text.tokens.empty())
        throw std::invalid_argument("cannot train on an empty text");
    if (opts.iterations < 0)
        throw std::invalid_argument("iterations must be non-negative");
    HmmTrainResult result;
    for (int iter = 0; iter < opts.iterations; ++iter) {
        std::vector<std::vector<double>> trans_count(
            model.n_tags, std::vector<double>(model.n_tags, 0.0));
        std::vector<std::vector<double>> emit_count(
            model.n_tags, std::vector<double>(model.n_classes, 0.0));
        double loglik = 0.0;

        for (std::size_t d = 0; d < text.doc_count(); ++d) {
            auto doc = text.doc(d);
            if (doc.empty()) continue;
            ForwardResult fr = forward(model, doc, inv);
            auto beta = backward(model, doc, inv, fr);
            loglik += fr.log_likelihood;
            const std::size_t len = doc.size();

            for (std::size_t t = 0; t < len; ++t) {
                for (TagId j : inv.tags_of(doc[t].cls)) {
                    double gamma = fr.alpha[t][j] * beta[t][j];
                    emit_count[j][doc[t].cls] += gamma;
                    if (t == 0) trans_count[kEosTag][j] += gamma;
                    if (t == len - 1)
                        trans_count[j][kEosTag] +=
                            fr.alpha[t][j] * model.transition(j, kEosTag) /
                            fr.end_scale;
                }
            }
            for (std::size_t t = 0; t + 1 < len; ++t) {
                const auto& from = inv.tags_of(doc[t].cls);
                const auto& to = inv.tags_of(doc[t + 1].cls);
                for (TagId i : from) {
                    for (TagId j : to) {
                        double xi = fr.alpha[t][i] * model.transition(i, j) *
                                    model.emission(j, doc[t + 1].cls) *
                                    beta[t + 1][j] / fr.scale[t + 1];
                        trans_count[i][j] += xi;
                    }
                }
            }
        }
        check_finite(loglik, "log-likelihood");
        result.log_likelihood.push_back(loglik);

        // M-step: renormalize rows; rows without mass keep their values.
        for (TagId i = 0; i < model.n_tags; ++i) {
            double row_sum = 0.0;
            for (TagId j = 0; j < model.n_tags; ++j) row_sum += trans_count[i][j];
            if (row_sum > 0.0)
                for (TagId j = 0; j < model.n_tags; ++j)
                    model.trans[i][j] = trans_count[i][j] / row_sum;
        }
        for (TagId t = 0; t < model.n_tags; ++t) {
            double row_sum = 0.0;
            for (ClassId c = 0; c < model.n_classes; ++c) row_sum += emit_count[t][c];
            if (row_sum > 0.0)
                for (ClassId c = 0; c < model.n_classes; ++c)
                    model.emit[t][c] = emit_count[t][c] / row_sum;
        }

        if (result.log_likelihood.size() >= 2) {
            double gain = loglik - result.log_likelihood[result.log_likelihood.size() - 2];
            if (std::abs(gain) < opts.epsilon) break;
        }
    }
    result.model = std::move(model);
    return result;
}

std::vector<TagId> hmm_tag(const HmmModel& model, const AmbiguousText& text,
                           const AmbiguityInventory& inv) {
    std::vector<TagId> out;
    out.reserve(text.tokens.size());
    std::size_t dead_docs = 0;
    for (std::size_t d = 0; d < text.doc_count(); ++d) {
        auto doc = text.doc(d);
        const std::size_t len = doc.size();
        if (len == 0) continue;

        // Max-product with per-position renormalization against underflow.
        std::vector<std::vector<double>> delta(len);
        std::vector<std::vector<TagId>> back(len);
        bool dead = false;
        for (std::size_t t = 0; t < len && !dead; ++t) {
            const auto& states = inv.tags_of(doc[t].cls);
            delta[t].assign(model.n_tags, 0.0);
            back[t].assign(model.n_tags, 0);
            double best_here = 0.0;
            for (TagId j : states) {
                double best = 0.0;
                TagId arg = states.front();
                if (t == 0) {
                    best = model.transition(kEosTag, j);
                } else {
                    for (TagId i : inv.tags_of(doc[t - 1].cls)) {
                        double v = delta[t - 1][i] * model.transition(i, j);
                        if (v > best) {  // strict: lowest predecessor id wins ties
                            best = v;
                            arg = i;
                        }
                    }
                }
                delta[t][j] = best * model.emission(j, doc[t].cls);
                back[t][j] = arg;
                best_here = std::max(best_here, delta[t][j]);
            }
            if (best_here <= 0.0) {
                dead = true;
                break;
            }
            for (TagId j : states) delta[t][j] /= best_here;
        }

        TagId final_tag = 0;
        double final_best = 0.0;
        if (!dead) {
            const auto& last_states = inv.tags_of(doc[len - 1].cls);
            final_tag = last_states.front();
            for (TagId j : last_states) {
                double v = delta[len - 1][j] * model.transition(j, kEosTag);
                if (v > final_best) {
                    final_best = v;
                    final_tag = j;
                }
            }
        }
        if (dead || final_best <= 0.0) {
            ++dead_docs;
            for (std::size_t t = 0; t < len; ++t) {
                const auto& states = inv.tags_of(doc[t].cls);
                TagId pick = states.front();
                double best = 0.0;
                for (TagId j : states) {
                    double e = model.emission(j, doc[t].cls);
                    if (e > best) {
                        best = e;
                        pick = j;
                    }
                }
                out.push_back(pick);
            }
            continue;
        }

        std::vector<TagId> path(len);
        path[len - 1] = final_tag;
        for (std::size_t t = len - 1; t > 0; --t)
            path[t - 1] = back[t][path[t]];
        out.insert(out.end(), path.begin(), path.end());
    }
    if (dead_docs > 0)
        std::cerr << "warning: " << dead_docs << " document(s) had no "
                  << "positive-probability tag path; fell back to the "
                  << "per-position emission argmax\n";
    return out;
}

}  // namespace swtag
