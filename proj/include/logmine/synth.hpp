#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "logmine/changepoint.hpp"
#include "logmine/corpus.hpp"

namespace logmine {

enum class GapLaw : std::uint8_t {
    uniform_mean,      // uniform on [0, 2*mean]: bounded, sub-Gaussian
    exponential_mean,  // exponential with the given mean
};

struct EpisodeSpec {
    std::size_t length = 0;
    std::vector<double> mixture;  // weight per event, sums to 1
    GapLaw law = GapLaw::uniform_mean;
    double mean_gap = 1.0;
};

struct SynthSpec {
    std::size_t vocab_size = 0;
    std::vector<std::vector<double>> signatures;  // per event, length vocab_size
    std::vector<EpisodeSpec> episodes;
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t total_length() const;
};

struct SynthStream {
    MessageStream messages;
    Segmentation true_segmentation;                // episode boundaries
    std::vector<std::vector<double>> true_signatures;
    std::vector<std::vector<double>> episode_mixtures;
};

// Sample a stream: per message, draw the event from the episode mixture, the
// id from that event's signature, and the gap from the episode's law (the
// first message sits at t = 0). Byte-identical for identical (spec, seed).
SynthStream generate(const SynthSpec& spec);

// Test oracle: the same statistic profile recomputed from scratch at every
// split with its own arithmetic. Deliberately independent of the sweep
// implementation; must agree with it exactly. Guarded to n <= 5000.
MetricProfile exhaustive_single_cp(std::span<const TimedMessage> slice,
                                   const CdParams& params);

// Test oracle for two planted change points: exhaustive search over all index
// pairs minimizing the summed within-segment L1 deviation from each segment's
// empirical distribution (equivalently maximizing sum |seg|*||p_seg||_2^2).
std::pair<std::size_t, std::size_t> best_two_split(std::span<const TimedMessage> stream);

// Population statistic around a single change at gamma, normalized so the
// value at the change point is d_at_change: windows straddling the change see
// the mixture, so the statistic decays as (1-gamma)/(1-g) left of gamma and
// gamma/g right of it.
double analytic_single_change(double g, double gamma, double d_at_change);

// --- Canned stream specs ---------------------------------------------------

// Two halves over 10 ids: uniform vs {0.09 x5, 0.11 x5} (L1 distance 0.1),
// unit-mean uniform gaps on both sides. Change at floor(gamma * n).
SynthSpec metric_shift_spec(std::size_t n, std::uint64_t seed, double gamma = 0.5);

// Two overlapping events over 4 ids across three episodes (3500/2554/3946
// messages): pure event 1, an even mixture, pure event 2. Episode rates
// differ (mean gaps 1.0/0.5/1.0) since the middle episode runs two events.
SynthSpec overlap_mixture_spec(std::uint64_t seed);

// num_changes+1 equal segments, each uniform over its own block of ids.
SynthSpec scaling_spec(std::size_t n, std::size_t vocab_size, std::size_t num_changes,
                       std::uint64_t seed);

// --- Experiment harnesses --------------------------------------------------

struct MetricComparisonRow {
    ChangeMetric metric;
    double mean_abs_error = 0.0;  // mean |argmax/n - 0.5|
    std::size_t trials = 0;
    std::size_t n = 0;
};

// Per metric, the mean profile-argmax error over freshly generated
// metric_shift streams. All metrics see the same streams. trials >= 10.
std::vector<MetricComparisonRow> run_metric_comparison(std::size_t n, std::size_t trials,
                                                       std::span<const ChangeMetric> metrics,
                                                       std::uint64_t seed);

struct ScalingRow {
    std::size_t n = 0;
    double seconds = 0.0;
};

struct ScalingResult {
    std::vector<ScalingRow> rows;
    double slope = 0.0;  // least-squares slope of log(seconds) vs log(n)
};

// Times detect_all on scaling_spec streams. Needs >= 3 sizes spanning at
// least two decades. Generation is excluded from the timings.
ScalingResult run_scaling(std::span<const std::size_t> n_values, std::size_t vocab_size,
                          std::size_t num_changes, std::uint64_t seed);

struct SampleComplexityRow {
    std::size_t n = 0;
    std::size_t trials = 0;
    std::size_t correct = 0;
    double rate = 0.0;
    double wilson_low = 0.0;
    double wilson_high = 0.0;
};

// Fraction of trials where detect_all finds exactly one change within
// epsilon*n of the planted one. Rejects epsilon >= min(gamma, 1-gamma).
std::vector<SampleComplexityRow> run_sample_complexity(std::span<const std::size_t> n_values,
                                                       std::size_t trials, double gamma,
                                                       double epsilon, std::uint64_t seed);

// --- Evaluation helpers ----------------------------------------------------

double l1_distance(std::span<const double> p, std::span<const double> q);

// Assignment of estimated rows to reference rows minimizing total L1
// (exhaustive over permutations; sizes must match and be <= 8).
std::vector<std::size_t> match_signatures(const std::vector<std::vector<double>>& estimated,
                                          const std::vector<std::vector<double>>& reference);

// max_e L1(estimated[perm[e]], reference[e]) under the optimal matching.
double max_matched_l1(const std::vector<std::vector<double>>& estimated,
                      const std::vector<std::vector<double>>& reference);

std::pair<double, double> wilson_interval(std::size_t correct, std::size_t trials);

}  // namespace logmine
