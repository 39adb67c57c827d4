#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "logmine/corpus.hpp"

namespace logmine {

// Bag-of-words documents over a shared vocabulary of message ids.
struct DocumentSet {
    std::size_t vocab_size = 0;
    std::vector<std::vector<std::uint32_t>> docs;

    std::size_t total_tokens() const;
    void validate() const;  // nonempty docs, ids < vocab_size
};

struct LdaParams {
    std::size_t iterations = 1000;
    std::size_t burn_in = 500;   // must be < iterations
    std::size_t thin = 10;       // keep every thin-th post-burn-in sweep
    double doc_concentration = 0.0;   // <= 0 picks the 50/num_topics default
    double word_concentration = 0.01;

    void validate() const;
};

struct TopicModel {
    std::size_t num_topics = 0;
    std::size_t vocab_size = 0;
    double doc_concentration = 0.0;
    double word_concentration = 0.0;
    std::uint64_t seed = 0;

    // Posterior means over thinned post-burn-in sweeps.
    std::vector<std::vector<double>> signatures;  // num_topics x vocab_size
    std::vector<std::vector<double>> theta;       // num_docs x num_topics

    // Final sampler state, kept so invariants stay checkable.
    std::vector<std::vector<std::uint32_t>> assignments;  // per doc, per token
    std::vector<std::vector<std::int64_t>> topic_word;    // num_topics x vocab_size
    std::vector<std::vector<std::int64_t>> doc_topic;     // num_docs x num_topics
    std::vector<std::int64_t> topic_total;                // num_topics
};

// Collapsed Gibbs sampler (Griffiths & Steyvers style). Deterministic for a
// fixed (docs, num_topics, params, seed): sweeps visit documents in a
// canonical content order and every document owns an RNG stream keyed on
// (seed, content hash), so permuting document order permutes theta rows and
// leaves the signatures bit-identical.
TopicModel gibbs_fit(const DocumentSet& docs, std::size_t num_topics,
                     const LdaParams& params, std::uint64_t seed);

// Held-out log-likelihood: signatures stay frozen, per-document mixtures are
// re-estimated by folding each document in with short Gibbs runs, then
// sum_tokens log(sum_e theta_e * signature_e[token]). Always <= 0.
double held_out_loglik(const TopicModel& model, const DocumentSet& docs);

enum class FoldStrategy : std::uint8_t {
    random,   // shuffle under the seed, deal round-robin
    strided,  // document i joins fold i % folds
};

const char* to_string(FoldStrategy s);

struct TopicSelection {
    std::size_t best = 0;
    // (candidate, mean held-out log-likelihood across folds), candidate order
    std::vector<std::pair<std::size_t, double>> scores;
};

// Cross-validated topic-count selection; the best candidate maximizes the
// average held-out log-likelihood (ties keep the earlier candidate).
TopicSelection select_num_topics(const DocumentSet& docs,
                                 const std::vector<std::size_t>& candidates,
                                 std::size_t folds, FoldStrategy strategy,
                                 const LdaParams& params, std::uint64_t seed);

}  // namespace logmine
