#pragma once

// Randomized invariant suites shared by the unit tests and the acceptance
// runner. Each suite generates its own cases from a fixed seed and collects
// violations instead of stopping, so a red run names the offending case.

#include <algorithm>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "logmine/baselines.hpp"
#include "logmine/changepoint.hpp"
#include "logmine/corpus.hpp"
#include "logmine/lda.hpp"
#include "logmine/random.hpp"
#include "logmine/synth.hpp"

namespace logmine::props {

struct SuiteResult {
    std::string name;
    std::size_t cases = 0;
    std::vector<std::string> failures;  // capped; first violations only
    bool ok() const { return failures.empty(); }
};

namespace detail {

inline void record(SuiteResult& res, std::size_t case_no, const std::string& what) {
    if (res.failures.size() < 5)
        res.failures.push_back("case " + std::to_string(case_no) + ": " + what);
    else if (res.failures.size() == 5)
        res.failures.push_back("...");
}

inline bool stochastic(const std::vector<double>& row, double tol = 1e-9) {
    double sum = 0.0;
    for (double v : row) {
        if (!(v >= 0.0)) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

inline std::vector<double> random_simplex(Rng& rng, std::size_t k, double floor) {
    std::vector<double> v(k);
    double sum = 0.0;
    for (double& x : v) {
        x = floor + rng.unit();
        sum += x;
    }
    for (double& x : v) x /= sum;
    return v;
}

inline MessageStream random_stream(Rng& rng, std::size_t n, std::size_t vocab) {
    MessageStream s;
    s.reserve(n);
    double t = rng.unit() * 10.0;
    for (std::size_t i = 0; i < n; ++i) {
        s.push_back({static_cast<std::uint32_t>(rng.below(vocab)), t});
        t += rng.unit() * 2.0;
    }
    return s;
}

inline DocumentSet random_docs(Rng& rng, std::size_t max_docs, std::size_t max_vocab) {
    DocumentSet docs;
    docs.vocab_size = 2 + rng.below(max_vocab - 1);
    const std::size_t D = 1 + rng.below(max_docs);
    for (std::size_t d = 0; d < D; ++d) {
        std::vector<std::uint32_t> doc(2 + rng.below(19));
        for (auto& m : doc) m = static_cast<std::uint32_t>(rng.below(docs.vocab_size));
        docs.docs.push_back(std::move(doc));
    }
    return docs;
}

inline LdaParams tiny_lda_params() {
    LdaParams p;
    p.iterations = 30;
    p.burn_in = 10;
    p.thin = 5;
    return p;
}

}  // namespace detail

// Every fitted model row is a probability distribution.
inline SuiteResult normalization_suite(std::size_t cases, std::uint64_t seed) {
    SuiteResult res{"normalization", 0, {}};
    for (std::size_t c = 0; c < cases; ++c, ++res.cases) {
        Rng rng(mix_seed(seed, 0x4E4F524DULL, c));
        const DocumentSet docs = detail::random_docs(rng, 4, 6);
        const std::size_t E = 1 + rng.below(3);
        const TopicModel model = gibbs_fit(docs, E, detail::tiny_lda_params(), rng.next());
        for (const auto& row : model.signatures)
            if (!detail::stochastic(row)) detail::record(res, c, "signature row not stochastic");
        for (const auto& row : model.theta)
            if (!detail::stochastic(row)) detail::record(res, c, "theta row not stochastic");
        if (c % 10 == 0) {
            const MessageStream stream = detail::random_stream(rng, 10 + rng.below(40), 4);
            AlgoBParams bp;
            bp.iterations = 30;
            bp.burn_in = 10;
            bp.thin = 5;
            const AlgoBModel bm = algob_fit(stream, 1 + rng.below(2), bp, rng.next());
            if (!detail::stochastic(bm.event_probs))
                detail::record(res, c, "event probabilities not stochastic");
            for (const auto& row : bm.signatures)
                if (!detail::stochastic(row))
                    detail::record(res, c, "baseline signature row not stochastic");
        }
    }
    return res;
}

// Split counts always partition the totals, and Gibbs count tables always
// match the assignments they summarize.
inline SuiteResult count_conservation_suite(std::size_t cases, std::uint64_t seed) {
    SuiteResult res{"count-conservation", 0, {}};
    for (std::size_t c = 0; c < cases; ++c, ++res.cases) {
        Rng rng(mix_seed(seed, 0xC04E53ULL, c));
        const std::size_t vocab = 1 + rng.below(8);
        const std::size_t n = 4 + rng.below(197);
        const MessageStream stream = detail::random_stream(rng, n, vocab);
        std::vector<std::int64_t> total(vocab, 0);
        for (const auto& m : stream) ++total[m.id];

        SlidingCounts counts(stream, vocab, 2);
        for (std::size_t split = 2; split + 2 <= n; counts.advance(), ++split) {
            if (counts.left_total() != split || counts.right_total() != n - split) {
                detail::record(res, c, "window totals disagree with the split");
                break;
            }
            const std::uint32_t id = static_cast<std::uint32_t>(rng.below(vocab));
            if (counts.left(id) + counts.right(id) != total[id]) {
                detail::record(res, c, "split counts do not partition the total");
                break;
            }
        }
        while (counts.split() > 2) counts.retreat();
        SlidingCounts fresh(stream, vocab, 2);
        for (std::uint32_t id = 0; id < vocab; ++id)
            if (counts.left(id) != fresh.left(id) || counts.right(id) != fresh.right(id))
                detail::record(res, c, "advance/retreat did not restore the state");

        if (c % 5 == 0) {
            const DocumentSet docs = detail::random_docs(rng, 3, 5);
            const std::size_t E = 1 + rng.below(3);
            const TopicModel model = gibbs_fit(docs, E, detail::tiny_lda_params(), rng.next());
            std::vector<std::vector<std::int64_t>> tw(E,
                                                      std::vector<std::int64_t>(docs.vocab_size));
            std::vector<std::int64_t> tt(E, 0);
            for (std::size_t d = 0; d < docs.docs.size(); ++d) {
                std::vector<std::int64_t> dt(E, 0);
                for (std::size_t t = 0; t < docs.docs[d].size(); ++t) {
                    const std::uint32_t e = model.assignments[d][t];
                    ++tw[e][docs.docs[d][t]];
                    ++tt[e];
                    ++dt[e];
                }
                for (std::size_t e = 0; e < E; ++e)
                    if (dt[e] != model.doc_topic[d][e])
                        detail::record(res, c, "doc-topic table disagrees with assignments");
            }
            for (std::size_t e = 0; e < E; ++e) {
                if (tt[e] != model.topic_total[e])
                    detail::record(res, c, "topic totals disagree with assignments");
                for (std::size_t m = 0; m < docs.vocab_size; ++m)
                    if (tw[e][m] != model.topic_word[e][m])
                        detail::record(res, c, "topic-word table disagrees with assignments");
            }
        }
    }
    return res;
}

// Identical inputs and seeds reproduce identical outputs, bit for bit.
inline SuiteResult determinism_suite(std::size_t cases, std::uint64_t seed) {
    SuiteResult res{"determinism", 0, {}};
    for (std::size_t c = 0; c < cases; ++c, ++res.cases) {
        Rng rng(mix_seed(seed, 0xDE7E4ULL, c));
        SynthSpec spec;
        spec.vocab_size = 2 + rng.below(5);
        const std::size_t E = 1 + rng.below(3);
        for (std::size_t e = 0; e < E; ++e)
            spec.signatures.push_back(detail::random_simplex(rng, spec.vocab_size, 0.01));
        const std::size_t eps = 1 + rng.below(3);
        for (std::size_t i = 0; i < eps; ++i) {
            EpisodeSpec ep;
            ep.length = 2 + rng.below(59);
            ep.mixture = detail::random_simplex(rng, E, 0.05);
            ep.law = (rng.below(2) == 0) ? GapLaw::uniform_mean : GapLaw::exponential_mean;
            ep.mean_gap = 0.25 + rng.unit();
            spec.episodes.push_back(std::move(ep));
        }
        spec.seed = rng.next();

        const SynthStream a = generate(spec);
        const SynthStream b = generate(spec);
        bool same = a.messages.size() == b.messages.size() &&
                    a.true_segmentation.changepoints == b.true_segmentation.changepoints;
        for (std::size_t i = 0; same && i < a.messages.size(); ++i)
            same = a.messages[i].id == b.messages[i].id &&
                   a.messages[i].time == b.messages[i].time;
        if (!same) detail::record(res, c, "regenerated stream differs");

        if (c % 20 == 0) {
            const DocumentSet docs = detail::random_docs(rng, 3, 5);
            const std::uint64_t s = rng.next();
            const TopicModel m1 = gibbs_fit(docs, 2, detail::tiny_lda_params(), s);
            const TopicModel m2 = gibbs_fit(docs, 2, detail::tiny_lda_params(), s);
            if (m1.signatures != m2.signatures || m1.theta != m2.theta)
                detail::record(res, c, "refitted topic model differs");
        } else if (c % 20 == 10) {
            AlgoBParams bp;
            bp.iterations = 30;
            bp.burn_in = 10;
            bp.thin = 5;
            const std::uint64_t s = rng.next();
            const AlgoBModel m1 = algob_fit(a.messages, 2, bp, s);
            const AlgoBModel m2 = algob_fit(a.messages, 2, bp, s);
            if (m1.signatures != m2.signatures || m1.beta_a != m2.beta_a)
                detail::record(res, c, "refitted baseline model differs");
        } else if (c % 10 == 5 && a.messages.size() >= 8) {
            CdParams params;
            params.alpha = 0.25;
            const MetricProfile p1 = metric_profile(a.messages, params);
            const MetricProfile p2 = metric_profile(a.messages, params);
            if (p1.values != p2.values || p1.argmax_split != p2.argmax_split)
                detail::record(res, c, "recomputed profile differs");
        }
    }
    return res;
}

// Rounding times down to a granularity is idempotent and order-preserving.
inline SuiteResult rounding_suite(std::size_t cases, std::uint64_t seed) {
    SuiteResult res{"idempotent-rounding", 0, {}};
    const double grans[] = {0.1, 1.0, 2.5, 60.0, 1000.0};
    for (std::size_t c = 0; c < cases; ++c, ++res.cases) {
        Rng rng(mix_seed(seed, 0x1D3A7ULL, c));
        const double g = grans[rng.below(5)];
        MessageStream stream;
        double t = (rng.unit() - 0.5) * 1e6;
        const std::size_t n = 1 + rng.below(100);
        for (std::size_t i = 0; i < n; ++i) {
            // A third of the times land exactly on the grid to probe the
            // boundary of the floor.
            if (rng.below(3) == 0) t = std::floor(t / g) * g;
            stream.push_back({static_cast<std::uint32_t>(rng.below(4)), t});
            t += rng.unit() * g * 3.0;
        }
        const MessageStream once = round_times(stream, g);
        const MessageStream twice = round_times(once, g);
        for (std::size_t i = 0; i < n; ++i) {
            if (twice[i].time != once[i].time) {
                detail::record(res, c, "rounding is not idempotent");
                break;
            }
            if (once[i].id != stream[i].id) {
                detail::record(res, c, "rounding touched a message id");
                break;
            }
            if (once[i].time > stream[i].time ||
                stream[i].time - once[i].time >= g * (1.0 + 1e-9)) {
                detail::record(res, c, "rounded time not the floor multiple");
                break;
            }
        }
        if (!time_ordered(once)) detail::record(res, c, "rounding broke the ordering");
    }
    return res;
}

// Jaccard and the co-occurrence distance match their set-arithmetic
// definitions on explicitly constructed slot incidences.
inline SuiteResult graph_formula_suite(std::size_t cases, std::uint64_t seed) {
    SuiteResult res{"jaccard-and-rho", 0, {}};
    for (std::size_t c = 0; c < cases; ++c, ++res.cases) {
        Rng rng(mix_seed(seed, 0x6A7A1DULL, c));
        const std::size_t ids = 2 + rng.below(5);
        const std::size_t slots = 1 + rng.below(30);
        const double w = (c % 3 == 0) ? 0.5 : (c % 3 == 1 ? 1.0 : 60.0);
        std::vector<std::set<std::int64_t>> slot_set(ids);
        MessageStream stream;
        for (std::size_t s = 0; s < slots; ++s)
            for (std::size_t i = 0; i < ids; ++i)
                if (rng.unit() < 0.4) {
                    slot_set[i].insert(static_cast<std::int64_t>(s));
                    stream.push_back({static_cast<std::uint32_t>(i),
                                      static_cast<double>(s) * w});
                }
        if (stream.empty()) {
            slot_set[0].insert(0);
            stream.push_back({0, 0.0});
        }
        const std::size_t min_support = 1 + rng.below(2);
        const CooccurrenceGraph graph = build_cooccurrence(stream, w, min_support);

        std::vector<std::uint32_t> kept;
        for (std::size_t i = 0; i < ids; ++i)
            if (slot_set[i].size() >= min_support) kept.push_back(static_cast<std::uint32_t>(i));
        if (graph.nodes != kept) {
            detail::record(res, c, "kept node set differs from the slot-support rule");
            continue;
        }
        for (std::size_t a = 0; a < kept.size(); ++a) {
            if (graph.slot_counts[a] !=
                static_cast<std::int64_t>(slot_set[kept[a]].size()))
                detail::record(res, c, "slot count differs from the distinct-slot set");
            if (graph.rho(kept[a], kept[a]) != 0.0)
                detail::record(res, c, "self-distance is not zero");
            for (std::size_t b = a + 1; b < kept.size(); ++b) {
                std::vector<std::int64_t> inter;
                std::set_intersection(slot_set[kept[a]].begin(), slot_set[kept[a]].end(),
                                      slot_set[kept[b]].begin(), slot_set[kept[b]].end(),
                                      std::back_inserter(inter));
                const std::int64_t nij = static_cast<std::int64_t>(inter.size());
                const std::int64_t ni = static_cast<std::int64_t>(slot_set[kept[a]].size());
                const std::int64_t nj = static_cast<std::int64_t>(slot_set[kept[b]].size());
                const double expected =
                    nij == 0 ? 1.0
                             : 1.0 - static_cast<double>(nij) /
                                         static_cast<double>(ni + nj - nij);
                if (graph.rho(kept[a], kept[b]) != expected ||
                    graph.rho(kept[b], kept[a]) != expected)
                    detail::record(res, c, "rho differs from the set formula");
            }
        }

        // Jaccard against direct set arithmetic on two of the slot sets.
        std::vector<std::uint32_t> sa, sb;
        for (std::int64_t v : slot_set[0]) sa.push_back(static_cast<std::uint32_t>(v));
        for (std::int64_t v : slot_set[1 % ids]) sb.push_back(static_cast<std::uint32_t>(v));
        std::vector<std::uint32_t> inter, uni;
        std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                              std::back_inserter(inter));
        std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(uni));
        const double expected =
            uni.empty() ? 0.0
                        : static_cast<double>(inter.size()) / static_cast<double>(uni.size());
        if (jaccard(sa, sb) != expected)
            detail::record(res, c, "jaccard differs from the set formula");
    }
    return res;
}

inline std::vector<SuiteResult> run_all_suites(std::size_t cases, std::uint64_t seed) {
    return {normalization_suite(cases, seed), count_conservation_suite(cases, seed),
            determinism_suite(cases, seed), rounding_suite(cases, seed),
            graph_formula_suite(cases, seed)};
}

}  // namespace logmine::props
