#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "logmine/changepoint.hpp"
#include "logmine/corpus.hpp"
#include "logmine/lda.hpp"

namespace logmine {

struct EventOccurrence {
    double start = 0.0;   // time of the first message of the first episode
    double finish = 0.0;  // time of the last message of the last episode
};

struct EventSummary {
    std::size_t id = 0;
    // Sparse signature, descending by probability (ties by id). Entries below
    // 1e-12 are dropped.
    std::vector<std::pair<std::uint32_t, double>> signature;
    std::vector<EventOccurrence> occurrences;
    bool active = false;  // false when no episode passes the eta threshold
};

struct EventReport {
    std::vector<EventSummary> events;
    std::vector<std::size_t> changepoints;
    double eta = 0.0;
};

struct PipelineConfig {
    CdParams cd;
    double eta = 0.1;  // mixture-weight threshold for event presence

    // Fixed topic count, or 0 to cross-validate over topic_candidates.
    std::size_t num_topics = 0;
    std::vector<std::size_t> topic_candidates;
    std::size_t folds = 10;
    FoldStrategy fold_strategy = FoldStrategy::random;

    LdaParams lda;
    std::uint64_t seed = 0;

    // Times are divided by this for the detection stage only, so the gap term
    // of the statistic is measured in these units (the CLI passes the rounding
    // granularity). Reported occurrence times stay in original units.
    double detection_time_scale = 1.0;
};

struct PipelineResult {
    Segmentation segmentation;
    TopicModel model;
    EventReport report;
    bool single_episode_fallback = false;  // stream too short to segment
    std::optional<TopicSelection> selection;
};

// The full mining pipeline: segment the stream into episodes, treat episodes
// as documents, fit the topic model, and read events off the fitted mixtures.
PipelineResult run_cdlda(const MessageStream& stream, const PipelineConfig& config);

// Threshold the per-episode mixtures at eta and merge runs of contiguous
// episodes into occurrence windows.
EventReport assemble_occurrences(const TopicModel& model, const Segmentation& seg,
                                 const MessageStream& stream, double eta);

struct SignatureClusters {
    std::vector<std::vector<std::size_t>> clusters;  // member indices, ascending
    std::vector<std::vector<double>> centroids;      // per-cluster mean signature
};

// Single-linkage clustering: signatures land in one cluster when connected by
// pairwise total-variation distances <= tv_threshold.
SignatureClusters dedup_signatures(const std::vector<std::vector<double>>& signatures,
                                   double tv_threshold);

}  // namespace logmine
