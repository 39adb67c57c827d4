#include "logmine/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace logmine {

namespace {

// ceil/floor of alpha*n with a tiny snap so products like 0.1*100 that float
// to 10.000000000000002 still count as the integer they mean.
constexpr double kSnap = 1e-9;

std::size_t ceil_snapped(double x) {
    return static_cast<std::size_t>(std::ceil(x - kSnap));
}

std::size_t floor_snapped(double x) {
    return static_cast<std::size_t>(std::floor(x + kSnap));
}

}  // namespace

const char* to_string(ChangeMetric m) {
    switch (m) {
        case ChangeMetric::tv_plus_gap: return "tv_plus_gap";
        case ChangeMetric::l1_only: return "l1";
        case ChangeMetric::l2: return "l2";
        case ChangeMetric::unbiased_l2: return "unbiased_l2";
        case ChangeMetric::jensen_shannon: return "js";
        case ChangeMetric::hellinger: return "hellinger";
    }
    return "?";
}

std::optional<ChangeMetric> parse_change_metric(const std::string& name) {
    if (name == "tv_plus_gap") return ChangeMetric::tv_plus_gap;
    if (name == "l1") return ChangeMetric::l1_only;
    if (name == "l2") return ChangeMetric::l2;
    if (name == "unbiased_l2") return ChangeMetric::unbiased_l2;
    if (name == "js") return ChangeMetric::jensen_shannon;
    if (name == "hellinger") return ChangeMetric::hellinger;
    return std::nullopt;
}

void CdParams::validate() const {
    if (!(alpha > 0.0 && alpha < 0.5))
        throw std::invalid_argument("alpha must lie in (0, 0.5)");
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("delta must be nonnegative");
    if (!(gap_weight >= 0.0) || !std::isfinite(gap_weight))
        throw std::invalid_argument("gap_weight must be nonnegative");
}

SplitRange admissible_splits(std::size_t n, double alpha) {
    SplitRange r{1, 0};
    if (n < 4) return r;  // need two messages per side
    const double dn = static_cast<double>(n);
    // One-based split bounds ceil(alpha n)..floor((1-alpha) n), shifted to the
    // zero-based convention, then clamped so each window keeps >= 2 messages.
    std::size_t l_lo = ceil_snapped(alpha * dn);
    std::size_t l_hi = floor_snapped((1.0 - alpha) * dn);
    r.lo = std::max<std::size_t>(l_lo > 0 ? l_lo - 1 : 0, 2);
    r.hi = std::min<std::size_t>(l_hi > 0 ? l_hi - 1 : 0, n - 2);
    return r;
}

SlidingCounts::SlidingCounts(std::span<const TimedMessage> slice, std::size_t vocab_size,
                             std::size_t split)
    : slice_(slice), left_(vocab_size, 0), right_(vocab_size, 0), split_(split) {
    if (split > slice.size()) throw std::invalid_argument("split beyond slice");
    for (std::size_t i = 0; i < split; ++i) ++left_[slice[i].id];
    for (std::size_t i = split; i < slice.size(); ++i) ++right_[slice[i].id];
    for (std::uint32_t id = 0; id < vocab_size; ++id)
        if (left_[id] + right_[id] > 0) present_.push_back(id);
}

void SlidingCounts::advance() {
    const std::uint32_t id = slice_[split_].id;
    ++left_[id];
    --right_[id];
    ++split_;
}

void SlidingCounts::retreat() {
    --split_;
    const std::uint32_t id = slice_[split_].id;
    --left_[id];
    ++right_[id];
}

double SlidingCounts::left_gap_mean() const {
    // Mean of the split-1 real gaps inside [0, split).
    return (slice_[split_ - 1].time - slice_[0].time) / static_cast<double>(split_ - 1);
}

double SlidingCounts::right_gap_mean() const {
    // The boundary gap joins the right window, so its span is anchored at the
    // last left message: (n - split) gaps in total.
    const std::size_t n = slice_.size();
    return (slice_[n - 1].time - slice_[split_ - 1].time) / static_cast<double>(n - split_);
}

namespace {

// One statistic evaluation from the live counts. Terms accumulate over ids in
// ascending order with multiply-by-reciprocal arithmetic; the exhaustive test
// oracle mirrors these expressions exactly, so keep them in sync.
double profile_value(const SlidingCounts& c, const CdParams& params) {
    const double inv_l = 1.0 / static_cast<double>(c.left_total());
    const double inv_r = 1.0 / static_cast<double>(c.right_total());
    switch (params.metric) {
        case ChangeMetric::tv_plus_gap:
        case ChangeMetric::l1_only: {
            double sum = 0.0;
            for (std::uint32_t id : c.present_ids())
                sum += std::abs(static_cast<double>(c.left(id)) * inv_l -
                                static_cast<double>(c.right(id)) * inv_r);
            if (params.metric == ChangeMetric::tv_plus_gap)
                sum += params.gap_weight * std::abs(c.left_gap_mean() - c.right_gap_mean());
            return sum;
        }
        case ChangeMetric::l2: {
            double sum = 0.0;
            for (std::uint32_t id : c.present_ids()) {
                const double d = static_cast<double>(c.left(id)) * inv_l -
                                 static_cast<double>(c.right(id)) * inv_r;
                sum += d * d;
            }
            return std::sqrt(sum);
        }
        case ChangeMetric::unbiased_l2: {
            const double l = static_cast<double>(c.left_total());
            const double r = static_cast<double>(c.right_total());
            const double inv_ll = 1.0 / (l * (l - 1.0));
            const double inv_rr = 1.0 / (r * (r - 1.0));
            const double inv_lr = 1.0 / (l * r);
            double sum = 0.0;
            for (std::uint32_t id : c.present_ids()) {
                const double x = static_cast<double>(c.left(id));
                const double y = static_cast<double>(c.right(id));
                sum += (x * x - x) * inv_ll + (y * y - y) * inv_rr - 2.0 * x * y * inv_lr;
            }
            return sum;
        }
        case ChangeMetric::jensen_shannon: {
            double sum = 0.0;
            for (std::uint32_t id : c.present_ids()) {
                const double pl = static_cast<double>(c.left(id)) * inv_l;
                const double pr = static_cast<double>(c.right(id)) * inv_r;
                const double m = 0.5 * (pl + pr);
                if (pl > 0.0) sum += 0.5 * pl * std::log(pl / m);
                if (pr > 0.0) sum += 0.5 * pr * std::log(pr / m);
            }
            return std::sqrt(std::max(sum, 0.0));
        }
        case ChangeMetric::hellinger: {
            double sum = 0.0;
            for (std::uint32_t id : c.present_ids()) {
                const double d = std::sqrt(static_cast<double>(c.left(id)) * inv_l) -
                                 std::sqrt(static_cast<double>(c.right(id)) * inv_r);
                sum += d * d;
            }
            return std::sqrt(0.5 * sum);
        }
    }
    return 0.0;
}

}  // namespace

MetricProfile metric_profile(std::span<const TimedMessage> slice, const CdParams& params) {
    params.validate();
    const std::size_t n = slice.size();
    const SplitRange range = admissible_splits(n, params.alpha);
    if (range.empty())
        throw std::invalid_argument("no admissible split: slice too short for alpha");

    SlidingCounts counts(slice, vocab_upper_bound(slice), range.lo);
    MetricProfile prof;
    prof.n = n;
    prof.first_split = range.lo;
    prof.values.reserve(range.hi - range.lo + 1);
    for (std::size_t s = range.lo;; ++s) {
        prof.values.push_back(profile_value(counts, params));
        if (s == range.hi) break;
        counts.advance();
    }
    const auto it = std::max_element(prof.values.begin(), prof.values.end());
    prof.argmax_split = range.lo + static_cast<std::size_t>(it - prof.values.begin());
    prof.max_value = *it;
    return prof;
}

std::optional<std::size_t> detect_single(std::span<const TimedMessage> slice,
                                         const CdParams& params) {
    const MetricProfile prof = metric_profile(slice, params);
    const double dn = static_cast<double>(slice.size());
    // The acceptance band is strict: alpha*n < l < (1-alpha)*n on one-based l.
    const std::size_t l = prof.argmax_split + 1;
    const std::size_t l_min = floor_snapped(params.alpha * dn) + 1;
    const std::size_t l_max = ceil_snapped((1.0 - params.alpha) * dn) - 1;
    if (prof.max_value > params.delta && l >= l_min && l <= l_max)
        return prof.argmax_split;
    return std::nullopt;
}

std::vector<std::pair<std::size_t, std::size_t>> Segmentation::episodes() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t lo = 0;
    for (std::size_t tau : changepoints) {
        out.emplace_back(lo, tau);
        lo = tau;
    }
    out.emplace_back(lo, n);
    return out;
}

namespace {

void detect_range(std::span<const TimedMessage> stream, std::size_t lo, std::size_t hi,
                  const CdParams& params, std::vector<std::size_t>& taus) {
    const std::size_t len = hi - lo;
    if (static_cast<double>(len) < 2.0 / params.alpha) return;
    if (admissible_splits(len, params.alpha).empty()) return;
    const auto split = detect_single(stream.subspan(lo, len), params);
    if (!split) return;
    const std::size_t tau = lo + *split;
    detect_range(stream, lo, tau, params, taus);
    detect_range(stream, tau, hi, params, taus);
    taus.push_back(tau);
}

}  // namespace

Segmentation detect_all(std::span<const TimedMessage> stream, const CdParams& params) {
    params.validate();
    std::vector<std::size_t> taus;
    detect_range(stream, 0, stream.size(), params, taus);
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    return Segmentation{stream.size(), std::move(taus)};
}

namespace {

void check_distribution(std::span<const double> p, const char* name) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(name) + " has a negative or non-finite entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument(std::string(name) + " does not sum to 1");
}

}  // namespace

double distance(std::span<const double> p, std::span<const double> q, Divergence kind) {
    if (p.size() != q.size())
        throw std::invalid_argument("distributions differ in length");
    check_distribution(p, "p");
    check_distribution(q, "q");
    switch (kind) {
        case Divergence::tv: {
            double sum = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
            return 0.5 * sum;
        }
        case Divergence::l2: {
            double sum = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) sum += (p[i] - q[i]) * (p[i] - q[i]);
            return std::sqrt(sum);
        }
        case Divergence::jensen_shannon: {
            double sum = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double m = 0.5 * (p[i] + q[i]);
                if (p[i] > 0.0) sum += 0.5 * p[i] * std::log(p[i] / m);
                if (q[i] > 0.0) sum += 0.5 * q[i] * std::log(q[i] / m);
            }
            return std::sqrt(std::max(sum, 0.0));
        }
        case Divergence::hellinger: {
            double sum = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
                sum += d * d;
            }
            return std::sqrt(0.5 * sum);
        }
    }
    return 0.0;
}

double unbiased_l2(std::span<const std::int64_t> x_counts,
                   std::span<const std::int64_t> y_counts) {
    if (x_counts.size() != y_counts.size())
        throw std::invalid_argument("count vectors differ in length");
    std::int64_t n = 0, m = 0;
    for (std::int64_t v : x_counts) n += v;
    for (std::int64_t v : y_counts) m += v;
    if (n < 2 || m < 2)
        throw std::invalid_argument("unbiased l2 needs at least 2 samples per side");
    const double dn = static_cast<double>(n);
    const double dm = static_cast<double>(m);
    double sum = 0.0;
    for (std::size_t i = 0; i < x_counts.size(); ++i) {
        const double x = static_cast<double>(x_counts[i]);
        const double y = static_cast<double>(y_counts[i]);
        sum += (x * x - x) / (dn * dn - dn) + (y * y - y) / (dm * dm - dm) -
               2.0 * x * y / (dn * dm);
    }
    return sum;
}

}  // namespace logmine
