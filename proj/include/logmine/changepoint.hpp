#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "logmine/corpus.hpp"

namespace logmine {

// Statistic computed at every candidate split. tv_plus_gap is the full
// detection statistic: L1 distance between the left/right empirical message
// distributions plus gap_weight times the absolute difference of mean
// inter-arrival times. The others are pure distributional alternatives used
// for metric comparisons.
enum class ChangeMetric : std::uint8_t {
    tv_plus_gap,
    l1_only,
    l2,
    unbiased_l2,
    jensen_shannon,
    hellinger,
};

const char* to_string(ChangeMetric m);
std::optional<ChangeMetric> parse_change_metric(const std::string& name);

struct CdParams {
    double alpha = 0.01;  // admissible splits keep at least alpha*n messages per side
    double delta = 0.1;   // detection threshold on the statistic
    ChangeMetric metric = ChangeMetric::tv_plus_gap;
    double gap_weight = 1.0;

    void validate() const;  // throws std::invalid_argument
};

// Candidate splits are 0-based: split s puts messages [0, s) left and [s, n)
// right, so s is also the index of the first right-window message. The
// admissible range keeps >= alpha*n and >= 2 messages on each side.
struct SplitRange {
    std::size_t lo = 0;  // inclusive
    std::size_t hi = 0;  // inclusive; empty() when hi < lo
    bool empty() const { return hi < lo; }
};

SplitRange admissible_splits(std::size_t n, double alpha);

// Integer count state for one split position, advanced one message at a time.
class SlidingCounts {
public:
    SlidingCounts(std::span<const TimedMessage> slice, std::size_t vocab_size, std::size_t split);

    void advance();  // split -> split + 1
    void retreat();  // split -> split - 1

    std::size_t split() const { return split_; }
    std::size_t size() const { return slice_.size(); }
    std::int64_t left(std::uint32_t id) const { return left_[id]; }
    std::int64_t right(std::uint32_t id) const { return right_[id]; }
    std::size_t left_total() const { return split_; }
    std::size_t right_total() const { return slice_.size() - split_; }

    // Mean inter-arrival inside each window, as (time span)/(gap count). The
    // right window's span starts at the last left message so the boundary gap
    // belongs to the right sum. Requires split >= 2 (left) and < n (right).
    double left_gap_mean() const;
    double right_gap_mean() const;

    // Ascending ids with a nonzero count anywhere in the slice.
    const std::vector<std::uint32_t>& present_ids() const { return present_; }

private:
    std::span<const TimedMessage> slice_;
    std::vector<std::int64_t> left_, right_;
    std::vector<std::uint32_t> present_;
    std::size_t split_;
};

struct MetricProfile {
    std::size_t n = 0;
    std::size_t first_split = 0;        // split value of values[0]
    std::vector<double> values;         // statistic per admissible split
    std::size_t argmax_split = 0;       // smallest split attaining the max
    double max_value = 0.0;

    std::size_t last_split() const { return first_split + values.size() - 1; }
    double value_at(std::size_t split) const { return values.at(split - first_split); }
};

// Full statistic profile over the admissible range, computed in one
// left-to-right sweep (O(n) count updates + O(distinct ids) per split).
// Throws std::invalid_argument when no admissible split exists.
MetricProfile metric_profile(std::span<const TimedMessage> slice, const CdParams& params);

// Single change-point rule: argmax of the profile, accepted only when the
// statistic clears delta and the split lies strictly inside the
// (alpha*n, (1-alpha)*n) band. nullopt means "no change".
std::optional<std::size_t> detect_single(std::span<const TimedMessage> slice,
                                         const CdParams& params);

struct Segmentation {
    std::size_t n = 0;
    std::vector<std::size_t> changepoints;  // strictly increasing, each in (0, n)

    // Half-open index ranges tiling [0, n).
    std::vector<std::pair<std::size_t, std::size_t>> episodes() const;
};

// Recursive bisection: detect a change, recurse on both sides. Slices shorter
// than 2/alpha (or without an admissible split) terminate silently, including
// at the top level.
Segmentation detect_all(std::span<const TimedMessage> stream, const CdParams& params);

// Standalone distances between two explicit distributions (same length,
// nonnegative, each summing to 1 within 1e-9; otherwise throws).
enum class Divergence : std::uint8_t { tv, l2, jensen_shannon, hellinger };

double distance(std::span<const double> p, std::span<const double> q, Divergence kind);

// Unbiased estimator of ||p - q||_2^2 from two count vectors (same length,
// each totalling >= 2 samples). May be negative on small samples.
double unbiased_l2(std::span<const std::int64_t> x_counts,
                   std::span<const std::int64_t> y_counts);

}  // namespace logmine
