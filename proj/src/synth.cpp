#include "logmine/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "logmine/random.hpp"

namespace logmine {

namespace {

constexpr double kSumTol = 1e-9;

void check_simplex(std::span<const double> p, const char* name) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(name) + " has a negative or non-finite entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTol)
        throw std::invalid_argument(std::string(name) + " does not sum to 1");
}

}  // namespace

void SynthSpec::validate() const {
    if (vocab_size == 0) throw std::invalid_argument("vocab_size must be positive");
    if (signatures.empty()) throw std::invalid_argument("need at least one event signature");
    for (const auto& sig : signatures) {
        if (sig.size() != vocab_size)
            throw std::invalid_argument("signature length does not match vocab_size");
        check_simplex(sig, "signature");
    }
    if (episodes.empty()) throw std::invalid_argument("need at least one episode");
    for (const auto& ep : episodes) {
        if (ep.length == 0) throw std::invalid_argument("episode length must be positive");
        if (ep.mixture.size() != signatures.size())
            throw std::invalid_argument("mixture length does not match the event count");
        check_simplex(ep.mixture, "mixture");
        if (!(ep.mean_gap > 0.0) || !std::isfinite(ep.mean_gap))
            throw std::invalid_argument("mean gap must be positive");
    }
}

std::size_t SynthSpec::total_length() const {
    std::size_t n = 0;
    for (const auto& ep : episodes) n += ep.length;
    return n;
}

SynthStream generate(const SynthSpec& spec) {
    spec.validate();
    Rng rng(mix_seed(spec.seed, 0x53594E54ULL));

    SynthStream out;
    out.messages.reserve(spec.total_length());
    out.true_signatures = spec.signatures;

    double t = 0.0;
    bool first = true;
    std::vector<std::size_t> boundaries;
    for (const auto& ep : spec.episodes) {
        out.episode_mixtures.push_back(ep.mixture);
        for (std::size_t k = 0; k < ep.length; ++k) {
            if (!first) {
                // The gap preceding a message follows that message's episode,
                // so a boundary gap already runs at the new episode's rate.
                const double u = rng.unit();
                t += ep.law == GapLaw::uniform_mean ? 2.0 * ep.mean_gap * u
                                                    : -ep.mean_gap * std::log1p(-u);
            }
            first = false;
            const std::size_t e = rng.sample(ep.mixture);
            const std::size_t id = rng.sample(spec.signatures[e]);
            out.messages.push_back({static_cast<std::uint32_t>(id), t});
        }
        boundaries.push_back(out.messages.size());
    }
    boundaries.pop_back();  // the final boundary is just n
    out.true_segmentation = Segmentation{out.messages.size(), std::move(boundaries)};
    return out;
}

MetricProfile exhaustive_single_cp(std::span<const TimedMessage> slice,
                                   const CdParams& params) {
    params.validate();
    const std::size_t n = slice.size();
    if (n > 5000) throw std::invalid_argument("exhaustive oracle is capped at 5000 messages");
    const SplitRange range = admissible_splits(n, params.alpha);
    if (range.empty())
        throw std::invalid_argument("no admissible split: slice too short for alpha");

    // Counts are rebuilt from scratch at every split; only the split range is
    // shared with the sweep so the two profiles align index for index. The
    // per-id expressions below deliberately copy the sweep's arithmetic
    // (reciprocal multiplies, ascending ids) so agreement is exact, not
    // approximate. Ids absent from a window contribute an exact 0.0.
    const std::size_t M = vocab_upper_bound(slice);
    MetricProfile prof;
    prof.n = n;
    prof.first_split = range.lo;
    prof.values.reserve(range.hi - range.lo + 1);

    std::vector<std::int64_t> left(M), right(M);
    for (std::size_t s = range.lo; s <= range.hi; ++s) {
        std::fill(left.begin(), left.end(), 0);
        std::fill(right.begin(), right.end(), 0);
        for (std::size_t i = 0; i < s; ++i) ++left[slice[i].id];
        for (std::size_t i = s; i < n; ++i) ++right[slice[i].id];

        const double inv_l = 1.0 / static_cast<double>(s);
        const double inv_r = 1.0 / static_cast<double>(n - s);
        double value = 0.0;
        switch (params.metric) {
            case ChangeMetric::tv_plus_gap:
            case ChangeMetric::l1_only: {
                double sum = 0.0;
                for (std::size_t id = 0; id < M; ++id)
                    sum += std::abs(static_cast<double>(left[id]) * inv_l -
                                    static_cast<double>(right[id]) * inv_r);
                if (params.metric == ChangeMetric::tv_plus_gap) {
                    const double lg =
                        (slice[s - 1].time - slice[0].time) / static_cast<double>(s - 1);
                    const double rg =
                        (slice[n - 1].time - slice[s - 1].time) / static_cast<double>(n - s);
                    sum += params.gap_weight * std::abs(lg - rg);
                }
                value = sum;
                break;
            }
            case ChangeMetric::l2: {
                double sum = 0.0;
                for (std::size_t id = 0; id < M; ++id) {
                    const double d = static_cast<double>(left[id]) * inv_l -
                                     static_cast<double>(right[id]) * inv_r;
                    sum += d * d;
                }
                value = std::sqrt(sum);
                break;
            }
            case ChangeMetric::unbiased_l2: {
                const double l = static_cast<double>(s);
                const double r = static_cast<double>(n - s);
                const double inv_ll = 1.0 / (l * (l - 1.0));
                const double inv_rr = 1.0 / (r * (r - 1.0));
                const double inv_lr = 1.0 / (l * r);
                double sum = 0.0;
                for (std::size_t id = 0; id < M; ++id) {
                    const double x = static_cast<double>(left[id]);
                    const double y = static_cast<double>(right[id]);
                    sum += (x * x - x) * inv_ll + (y * y - y) * inv_rr - 2.0 * x * y * inv_lr;
                }
                value = sum;
                break;
            }
            case ChangeMetric::jensen_shannon: {
                double sum = 0.0;
                for (std::size_t id = 0; id < M; ++id) {
                    const double pl = static_cast<double>(left[id]) * inv_l;
                    const double pr = static_cast<double>(right[id]) * inv_r;
                    const double m = 0.5 * (pl + pr);
                    if (pl > 0.0) sum += 0.5 * pl * std::log(pl / m);
                    if (pr > 0.0) sum += 0.5 * pr * std::log(pr / m);
                }
                value = std::sqrt(std::max(sum, 0.0));
                break;
            }
            case ChangeMetric::hellinger: {
                double sum = 0.0;
                for (std::size_t id = 0; id < M; ++id) {
                    const double d = std::sqrt(static_cast<double>(left[id]) * inv_l) -
                                     std::sqrt(static_cast<double>(right[id]) * inv_r);
                    sum += d * d;
                }
                value = std::sqrt(0.5 * sum);
                break;
            }
        }
        prof.values.push_back(value);
    }

    prof.argmax_split = range.lo;
    prof.max_value = prof.values.front();
    for (std::size_t i = 1; i < prof.values.size(); ++i) {
        if (prof.values[i] > prof.max_value) {
            prof.max_value = prof.values[i];
            prof.argmax_split = range.lo + i;
        }
    }
    return prof;
}

std::pair<std::size_t, std::size_t> best_two_split(std::span<const TimedMessage> stream) {
    const std::size_t n = stream.size();
    if (n < 3) throw std::invalid_argument("need at least 3 messages for two splits");
    const std::size_t M = vocab_upper_bound(stream);

    std::vector<std::int64_t> total(M, 0);
    for (const auto& m : stream) ++total[m.id];

    // Score(i, j) = sum over the three segments of sum_m c_m^2 / len. The
    // sums of squares update in O(1) as one message crosses a boundary.
    std::vector<std::int64_t> c1(M, 0), c2(M), c3(M);
    std::int64_t sq1 = 0;
    double best = -1.0;
    std::pair<std::size_t, std::size_t> best_pair{1, 2};
    for (std::size_t i = 1; i + 2 <= n; ++i) {
        const std::uint32_t idi = stream[i - 1].id;
        sq1 += 2 * c1[idi] + 1;
        ++c1[idi];

        std::fill(c2.begin(), c2.end(), 0);
        std::int64_t sq2 = 0;
        std::int64_t sq3 = 0;
        for (std::size_t m = 0; m < M; ++m) {
            c3[m] = total[m] - c1[m];
            sq3 += c3[m] * c3[m];
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::uint32_t id = stream[j - 1].id;
            sq2 += 2 * c2[id] + 1;
            ++c2[id];
            sq3 -= 2 * c3[id] - 1;
            --c3[id];
            const double score = static_cast<double>(sq1) / static_cast<double>(i) +
                                 static_cast<double>(sq2) / static_cast<double>(j - i) +
                                 static_cast<double>(sq3) / static_cast<double>(n - j);
            if (score > best) {
                best = score;
                best_pair = {i, j};
            }
        }
    }
    return best_pair;
}

double analytic_single_change(double g, double gamma, double d_at_change) {
    if (!(g > 0.0 && g < 1.0)) throw std::invalid_argument("split fraction must lie in (0, 1)");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("change fraction must lie in (0, 1)");
    if (!(d_at_change >= 0.0)) throw std::invalid_argument("peak value must be nonnegative");
    // Left of the change the right window dilutes the contrast by
    // (1-gamma)/(1-g); right of it the left window dilutes by gamma/g.
    return g <= gamma ? d_at_change * (1.0 - gamma) / (1.0 - g)
                      : d_at_change * gamma / g;
}

SynthSpec metric_shift_spec(std::size_t n, std::uint64_t seed, double gamma) {
    if (n < 4) throw std::invalid_argument("need at least 4 messages");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("change fraction must lie in (0, 1)");
    SynthSpec spec;
    spec.vocab_size = 10;
    spec.signatures = {std::vector<double>(10, 0.1),
                       {0.09, 0.09, 0.09, 0.09, 0.09, 0.11, 0.11, 0.11, 0.11, 0.11}};
    const auto first = static_cast<std::size_t>(
        std::floor(gamma * static_cast<double>(n) + 1e-9));
    if (first == 0 || first >= n) throw std::invalid_argument("change fraction leaves an empty side");
    spec.episodes = {{first, {1.0, 0.0}, GapLaw::uniform_mean, 1.0},
                     {n - first, {0.0, 1.0}, GapLaw::uniform_mean, 1.0}};
    spec.seed = seed;
    return spec;
}

SynthSpec overlap_mixture_spec(std::uint64_t seed) {
    SynthSpec spec;
    spec.vocab_size = 4;
    spec.signatures = {{0.25, 0.25, 0.499, 0.001}, {0.25, 0.25, 0.001, 0.499}};
    // The middle episode runs both events at once, so messages arrive twice
    // as fast there; the rate shift is what lifts the second boundary's
    // statistic over thresholds the id distribution alone would miss.
    spec.episodes = {{3500, {1.0, 0.0}, GapLaw::uniform_mean, 1.0},
                     {2554, {0.5, 0.5}, GapLaw::uniform_mean, 0.5},
                     {3946, {0.0, 1.0}, GapLaw::uniform_mean, 1.0}};
    spec.seed = seed;
    return spec;
}

SynthSpec scaling_spec(std::size_t n, std::size_t vocab_size, std::size_t num_changes,
                       std::uint64_t seed) {
    const std::size_t k = num_changes + 1;
    if (n < k) throw std::invalid_argument("stream shorter than the episode count");
    if (vocab_size < k) throw std::invalid_argument("need at least one id per episode");
    SynthSpec spec;
    spec.vocab_size = vocab_size;
    const std::size_t vb = vocab_size / k;
    const std::size_t vrem = vocab_size % k;
    const std::size_t lb = n / k;
    const std::size_t lrem = n % k;
    std::size_t id0 = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t width = vb + (i < vrem ? 1 : 0);
        std::vector<double> sig(vocab_size, 0.0);
        for (std::size_t m = id0; m < id0 + width; ++m)
            sig[m] = 1.0 / static_cast<double>(width);
        id0 += width;
        spec.signatures.push_back(std::move(sig));

        std::vector<double> mix(k, 0.0);
        mix[i] = 1.0;
        spec.episodes.push_back(
            {lb + (i < lrem ? 1 : 0), std::move(mix), GapLaw::uniform_mean, 1.0});
    }
    spec.seed = seed;
    return spec;
}

std::vector<MetricComparisonRow> run_metric_comparison(std::size_t n, std::size_t trials,
                                                       std::span<const ChangeMetric> metrics,
                                                       std::uint64_t seed) {
    if (trials < 10) throw std::invalid_argument("need at least 10 trials");
    if (metrics.empty()) throw std::invalid_argument("need at least one metric");

    std::vector<double> err_sum(metrics.size(), 0.0);
    for (std::size_t t = 0; t < trials; ++t) {
        const SynthStream stream = generate(metric_shift_spec(n, mix_seed(seed, t)));
        for (std::size_t k = 0; k < metrics.size(); ++k) {
            CdParams params;
            // A wide alpha band admits windows so small that their sampling
            // noise outruns the true contrast and captures the argmax; 0.25
            // keeps every window at n/4 samples while the planted change at
            // n/2 stays comfortably admissible.
            params.alpha = 0.25;
            params.metric = metrics[k];
            const MetricProfile prof = metric_profile(stream.messages, params);
            const double frac =
                static_cast<double>(prof.argmax_split) / static_cast<double>(n);
            err_sum[k] += std::abs(frac - 0.5);
        }
    }

    std::vector<MetricComparisonRow> rows;
    for (std::size_t k = 0; k < metrics.size(); ++k)
        rows.push_back({metrics[k], err_sum[k] / static_cast<double>(trials), trials, n});
    return rows;
}

ScalingResult run_scaling(std::span<const std::size_t> n_values, std::size_t vocab_size,
                          std::size_t num_changes, std::uint64_t seed) {
    if (n_values.size() < 3) throw std::invalid_argument("need at least 3 stream sizes");
    const auto [mn, mx] = std::minmax_element(n_values.begin(), n_values.end());
    if (static_cast<double>(*mx) < 100.0 * static_cast<double>(*mn))
        throw std::invalid_argument("sizes must span at least two decades");

    CdParams params;
    params.alpha = 0.05;
    params.delta = 0.5;

    ScalingResult result;
    for (std::size_t n : n_values) {
        const SynthStream stream =
            generate(scaling_spec(n, vocab_size, num_changes, mix_seed(seed, n)));
        const auto start = std::chrono::steady_clock::now();
        const Segmentation seg = detect_all(stream.messages, params);
        const auto stop = std::chrono::steady_clock::now();
        (void)seg;
        const double secs =
            std::max(std::chrono::duration<double>(stop - start).count(), 1e-9);
        result.rows.push_back({n, secs});
    }

    double sx = 0.0, sy = 0.0;
    for (const auto& row : result.rows) {
        sx += std::log(static_cast<double>(row.n));
        sy += std::log(row.seconds);
    }
    const double mean_x = sx / static_cast<double>(result.rows.size());
    const double mean_y = sy / static_cast<double>(result.rows.size());
    double num = 0.0, den = 0.0;
    for (const auto& row : result.rows) {
        const double dx = std::log(static_cast<double>(row.n)) - mean_x;
        num += dx * (std::log(row.seconds) - mean_y);
        den += dx * dx;
    }
    result.slope = num / den;
    return result;
}

std::vector<SampleComplexityRow> run_sample_complexity(std::span<const std::size_t> n_values,
                                                       std::size_t trials, double gamma,
                                                       double epsilon, std::uint64_t seed) {
    if (n_values.empty()) throw std::invalid_argument("need at least one stream size");
    if (trials == 0) throw std::invalid_argument("need at least one trial");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("change fraction must lie in (0, 1)");
    if (!(epsilon > 0.0 && epsilon < std::min(gamma, 1.0 - gamma)))
        throw std::invalid_argument("tolerance must lie in (0, min(gamma, 1-gamma))");

    CdParams params;
    // The planted change is purely distributional (gap law identical on both
    // sides), so the inter-arrival term carries noise and no signal; drop it.
    // The wide minimum-episode fraction keeps the small-window ends of the
    // sweep, where L1 sampling noise swamps the true 0.1 separation, out of
    // the argmax and out of the recursion.
    params.alpha = 0.25;
    params.delta = 0.07;
    params.gap_weight = 0.0;

    std::vector<SampleComplexityRow> rows;
    for (std::size_t n : n_values) {
        SampleComplexityRow row;
        row.n = n;
        row.trials = trials;
        for (std::size_t t = 0; t < trials; ++t) {
            const SynthStream stream = generate(metric_shift_spec(n, mix_seed(seed, n, t), gamma));
            const Segmentation seg = detect_all(stream.messages, params);
            if (seg.changepoints.size() == 1) {
                const double frac = static_cast<double>(seg.changepoints.front()) /
                                    static_cast<double>(n);
                if (std::abs(frac - gamma) < epsilon) ++row.correct;
            }
        }
        row.rate = static_cast<double>(row.correct) / static_cast<double>(trials);
        std::tie(row.wilson_low, row.wilson_high) = wilson_interval(row.correct, trials);
        rows.push_back(row);
    }
    return rows;
}

double l1_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("vectors differ in length");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
    return sum;
}

std::vector<std::size_t> match_signatures(const std::vector<std::vector<double>>& estimated,
                                          const std::vector<std::vector<double>>& reference) {
    const std::size_t k = reference.size();
    if (estimated.size() != k) throw std::invalid_argument("row counts differ");
    if (k > 8) throw std::invalid_argument("exhaustive matching is capped at 8 rows");
    if (k == 0) return {};

    std::vector<std::size_t> perm(k), best_perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    best_perm = perm;
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t e = 0; e < k; ++e) total += l1_distance(estimated[perm[e]], reference[e]);
        if (total < best) {
            best = total;
            best_perm = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best_perm;
}

double max_matched_l1(const std::vector<std::vector<double>>& estimated,
                      const std::vector<std::vector<double>>& reference) {
    const std::vector<std::size_t> perm = match_signatures(estimated, reference);
    double worst = 0.0;
    for (std::size_t e = 0; e < reference.size(); ++e)
        worst = std::max(worst, l1_distance(estimated[perm[e]], reference[e]));
    return worst;
}

std::pair<double, double> wilson_interval(std::size_t correct, std::size_t trials) {
    if (trials == 0) throw std::invalid_argument("need at least one trial");
    if (correct > trials) throw std::invalid_argument("more successes than trials");
    constexpr double z = 1.959963984540054;  // 97.5th normal quantile
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(correct) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace logmine
