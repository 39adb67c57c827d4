#include "logmine/lda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "logmine/random.hpp"

namespace logmine {

std::size_t DocumentSet::total_tokens() const {
    std::size_t n = 0;
    for (const auto& d : docs) n += d.size();
    return n;
}

void DocumentSet::validate() const {
    if (docs.empty()) throw std::invalid_argument("document set is empty");
    for (const auto& d : docs) {
        if (d.empty()) throw std::invalid_argument("documents must be non-empty");
        for (std::uint32_t id : d)
            if (id >= vocab_size)
                throw std::invalid_argument("token id outside the vocabulary");
    }
}

void LdaParams::validate() const {
    if (iterations == 0) throw std::invalid_argument("iterations must be positive");
    if (burn_in >= iterations) throw std::invalid_argument("burn-in must precede the last sweep");
    if (thin == 0) throw std::invalid_argument("thinning interval must be positive");
    if (!(word_concentration > 0.0))
        throw std::invalid_argument("word concentration must be positive");
}

const char* to_string(FoldStrategy s) {
    return s == FoldStrategy::random ? "random" : "strided";
}

namespace {

// Documents are visited in a canonical content order and each owns its RNG
// stream, so results do not depend on input order (theta rows permute along
// with the documents; signatures are bit-identical).
std::vector<std::size_t> canonical_order(const DocumentSet& docs,
                                         const std::vector<std::uint64_t>& hashes) {
    std::vector<std::size_t> order(docs.docs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (hashes[a] != hashes[b]) return hashes[a] < hashes[b];
        if (docs.docs[a] != docs.docs[b]) return docs.docs[a] < docs.docs[b];
        return a < b;
    });
    return order;
}

}  // namespace

TopicModel gibbs_fit(const DocumentSet& docs, std::size_t num_topics, const LdaParams& params,
                     std::uint64_t seed) {
    docs.validate();
    params.validate();
    if (num_topics == 0) throw std::invalid_argument("need at least one topic");

    const std::size_t D = docs.docs.size();
    const std::size_t M = docs.vocab_size;
    const std::size_t E = num_topics;
    const double a_doc = params.doc_concentration > 0.0 ? params.doc_concentration
                                                        : 50.0 / static_cast<double>(E);
    const double a_word = params.word_concentration;

    std::vector<std::uint64_t> hashes(D);
    for (std::size_t d = 0; d < D; ++d) hashes[d] = hash_tokens(docs.docs[d]);
    const std::vector<std::size_t> order = canonical_order(docs, hashes);
    std::vector<Rng> rngs;
    rngs.reserve(D);
    for (std::size_t d = 0; d < D; ++d) rngs.emplace_back(mix_seed(seed, hashes[d]));

    TopicModel model;
    model.num_topics = E;
    model.vocab_size = M;
    model.doc_concentration = a_doc;
    model.word_concentration = a_word;
    model.seed = seed;
    model.topic_word.assign(E, std::vector<std::int64_t>(M, 0));
    model.doc_topic.assign(D, std::vector<std::int64_t>(E, 0));
    model.topic_total.assign(E, 0);
    model.assignments.resize(D);

    for (std::size_t d : order) {
        auto& z = model.assignments[d];
        z.resize(docs.docs[d].size());
        for (std::size_t t = 0; t < z.size(); ++t) {
            const std::uint32_t e = static_cast<std::uint32_t>(rngs[d].below(E));
            z[t] = e;
            ++model.doc_topic[d][e];
            ++model.topic_word[e][docs.docs[d][t]];
            ++model.topic_total[e];
        }
    }

    std::vector<std::vector<double>> phi_acc(E, std::vector<double>(M, 0.0));
    std::vector<std::vector<double>> theta_acc(D, std::vector<double>(E, 0.0));
    std::size_t samples = 0;
    const double word_norm = static_cast<double>(M) * a_word;

    // Two sweep kernels. With more than a handful of topics the conditional's
    // factors are mirrored as ready-to-multiply doubles, refreshed from the
    // integer counts whenever one changes: a sweep then costs two divisions
    // per token instead of one per topic, and the word table is word-major so
    // the topic loop runs contiguously. For few topics the mirror upkeep costs
    // more than the divisions it saves, so the direct form wins there.
    const bool mirrored = E > 4;
    std::vector<double> word_weight;
    std::vector<double> inv_total;
    std::vector<double> doc_weight;
    if (mirrored) {
        word_weight.resize(M * E);
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t e = 0; e < E; ++e)
                word_weight[m * E + e] = static_cast<double>(model.topic_word[e][m]) + a_word;
        inv_total.resize(E);
        for (std::size_t e = 0; e < E; ++e)
            inv_total[e] = 1.0 / (static_cast<double>(model.topic_total[e]) + word_norm);
        doc_weight.resize(E);
    }
    std::vector<double> cum(E);

    for (std::size_t iter = 1; iter <= params.iterations; ++iter) {
        for (std::size_t d : order) {
            auto& z = model.assignments[d];
            auto& nd = model.doc_topic[d];
            const auto& tokens = docs.docs[d];
            Rng& rng = rngs[d];
            if (!mirrored) {
                for (std::size_t t = 0; t < tokens.size(); ++t) {
                    const std::uint32_t m = tokens[t];
                    const std::uint32_t old = z[t];
                    --nd[old];
                    --model.topic_word[old][m];
                    --model.topic_total[old];
                    double total = 0.0;
                    for (std::size_t e = 0; e < E; ++e) {
                        const double w =
                            (static_cast<double>(nd[e]) + a_doc) *
                            (static_cast<double>(model.topic_word[e][m]) + a_word) /
                            (static_cast<double>(model.topic_total[e]) + word_norm);
                        cum[e] = w;
                        total += w;
                    }
                    double u = rng.unit() * total;
                    std::size_t pick = E - 1;
                    for (std::size_t e = 0; e < E; ++e) {
                        u -= cum[e];
                        if (u < 0.0) {
                            pick = e;
                            break;
                        }
                    }
                    z[t] = static_cast<std::uint32_t>(pick);
                    ++nd[pick];
                    ++model.topic_word[pick][m];
                    ++model.topic_total[pick];
                }
                continue;
            }
            for (std::size_t e = 0; e < E; ++e)
                doc_weight[e] = static_cast<double>(nd[e]) + a_doc;
            for (std::size_t t = 0; t < tokens.size(); ++t) {
                const std::uint32_t m = tokens[t];
                const std::uint32_t old = z[t];
                --nd[old];
                --model.topic_word[old][m];
                --model.topic_total[old];
                double* wm = word_weight.data() + static_cast<std::size_t>(m) * E;
                doc_weight[old] = static_cast<double>(nd[old]) + a_doc;
                wm[old] = static_cast<double>(model.topic_word[old][m]) + a_word;
                inv_total[old] =
                    1.0 / (static_cast<double>(model.topic_total[old]) + word_norm);
                double total = 0.0;
                for (std::size_t e = 0; e < E; ++e) {
                    const double w = doc_weight[e] * wm[e] * inv_total[e];
                    cum[e] = w;
                    total += w;
                }
                double u = rng.unit() * total;
                std::size_t pick = E - 1;
                for (std::size_t e = 0; e < E; ++e) {
                    u -= cum[e];
                    if (u < 0.0) {
                        pick = e;
                        break;
                    }
                }
                z[t] = static_cast<std::uint32_t>(pick);
                ++nd[pick];
                ++model.topic_word[pick][m];
                ++model.topic_total[pick];
                doc_weight[pick] = static_cast<double>(nd[pick]) + a_doc;
                wm[pick] = static_cast<double>(model.topic_word[pick][m]) + a_word;
                inv_total[pick] =
                    1.0 / (static_cast<double>(model.topic_total[pick]) + word_norm);
            }
        }
        // Thinned posterior-mean accumulation, aligned so the final sweep is
        // always sampled.
        if (iter > params.burn_in && (params.iterations - iter) % params.thin == 0) {
            ++samples;
            for (std::size_t e = 0; e < E; ++e) {
                const double denom = static_cast<double>(model.topic_total[e]) + word_norm;
                for (std::size_t m = 0; m < M; ++m)
                    phi_acc[e][m] +=
                        (static_cast<double>(model.topic_word[e][m]) + a_word) / denom;
            }
            for (std::size_t d = 0; d < D; ++d) {
                const double denom = static_cast<double>(docs.docs[d].size()) +
                                     static_cast<double>(E) * a_doc;
                for (std::size_t e = 0; e < E; ++e)
                    theta_acc[d][e] +=
                        (static_cast<double>(model.doc_topic[d][e]) + a_doc) / denom;
            }
        }
    }

    const double inv = 1.0 / static_cast<double>(samples);
    for (auto& row : phi_acc)
        for (double& v : row) v *= inv;
    for (auto& row : theta_acc)
        for (double& v : row) v *= inv;
    model.signatures = std::move(phi_acc);
    model.theta = std::move(theta_acc);
    return model;
}

namespace {

// Short fold-in runs used when scoring held-out documents.
constexpr std::size_t kFoldInIters = 200;
constexpr std::size_t kFoldInBurn = 100;
constexpr std::size_t kFoldInThin = 10;

std::vector<double> fold_in_theta(const TopicModel& model,
                                  const std::vector<std::uint32_t>& tokens, Rng& rng) {
    const std::size_t E = model.num_topics;
    std::vector<std::int64_t> nd(E, 0);
    std::vector<std::uint32_t> z(tokens.size());
    std::vector<double> weights(E);
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        const std::uint32_t e = static_cast<std::uint32_t>(rng.below(E));
        z[t] = e;
        ++nd[e];
    }
    std::vector<double> acc(E, 0.0);
    std::size_t samples = 0;
    for (std::size_t iter = 1; iter <= kFoldInIters; ++iter) {
        for (std::size_t t = 0; t < tokens.size(); ++t) {
            const std::uint32_t m = tokens[t];
            --nd[z[t]];
            double total = 0.0;
            for (std::size_t e = 0; e < E; ++e) {
                const double w = (static_cast<double>(nd[e]) + model.doc_concentration) *
                                 model.signatures[e][m];
                weights[e] = w;
                total += w;
            }
            std::size_t pick;
            if (total > 0.0) {
                double u = rng.unit() * total;
                pick = E - 1;
                for (std::size_t e = 0; e < E; ++e) {
                    u -= weights[e];
                    if (u < 0.0) {
                        pick = e;
                        break;
                    }
                }
            } else {
                pick = rng.below(E);
            }
            z[t] = static_cast<std::uint32_t>(pick);
            ++nd[pick];
        }
        if (iter > kFoldInBurn && (kFoldInIters - iter) % kFoldInThin == 0) {
            ++samples;
            const double denom = static_cast<double>(tokens.size()) +
                                 static_cast<double>(E) * model.doc_concentration;
            for (std::size_t e = 0; e < E; ++e)
                acc[e] += (static_cast<double>(nd[e]) + model.doc_concentration) / denom;
        }
    }
    for (double& v : acc) v /= static_cast<double>(samples);
    return acc;
}

}  // namespace

double held_out_loglik(const TopicModel& model, const DocumentSet& docs) {
    docs.validate();
    if (docs.vocab_size > model.vocab_size)
        throw std::invalid_argument("held-out vocabulary exceeds the model's");
    double ll = 0.0;
    for (const auto& tokens : docs.docs) {
        Rng rng(mix_seed(model.seed, 0x486f6c64ULL, hash_tokens(tokens)));
        const std::vector<double> theta = fold_in_theta(model, tokens, rng);
        for (std::uint32_t m : tokens) {
            double p = 0.0;
            for (std::size_t e = 0; e < model.num_topics; ++e)
                p += theta[e] * model.signatures[e][m];
            ll += std::log(p);
        }
    }
    return ll;
}

TopicSelection select_num_topics(const DocumentSet& docs,
                                 const std::vector<std::size_t>& candidates, std::size_t folds,
                                 FoldStrategy strategy, const LdaParams& params,
                                 std::uint64_t seed) {
    docs.validate();
    params.validate();
    if (candidates.empty()) throw std::invalid_argument("need at least one candidate");
    for (std::size_t c : candidates)
        if (c == 0) throw std::invalid_argument("candidate topic counts must be positive");
    if (folds < 2) throw std::invalid_argument("need at least two folds");
    const std::size_t D = docs.docs.size();
    if (D < folds) throw std::invalid_argument("fewer documents than folds");

    std::vector<std::size_t> fold_of(D);
    if (strategy == FoldStrategy::strided) {
        for (std::size_t d = 0; d < D; ++d) fold_of[d] = d % folds;
    } else {
        std::vector<std::size_t> perm(D);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        Rng rng(mix_seed(seed, 0xF01D5ULL));
        for (std::size_t i = D; i > 1; --i)
            std::swap(perm[i - 1], perm[rng.below(i)]);
        for (std::size_t i = 0; i < D; ++i) fold_of[perm[i]] = i % folds;
    }

    TopicSelection sel;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t cand : candidates) {
        double score_sum = 0.0;
        for (std::size_t f = 0; f < folds; ++f) {
            DocumentSet train{docs.vocab_size, {}};
            DocumentSet test{docs.vocab_size, {}};
            for (std::size_t d = 0; d < D; ++d)
                (fold_of[d] == f ? test : train).docs.push_back(docs.docs[d]);
            const TopicModel model = gibbs_fit(train, cand, params, mix_seed(seed, cand, f));
            score_sum += held_out_loglik(model, test);
        }
        const double score = score_sum / static_cast<double>(folds);
        sel.scores.emplace_back(cand, score);
        if (score > best_score) {
            best_score = score;
            sel.best = cand;
        }
    }
    return sel;
}

}  // namespace logmine
