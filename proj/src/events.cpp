#include "logmine/events.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace logmine {

namespace {

std::vector<std::pair<std::uint32_t, double>> sparse_signature(
    const std::vector<double>& dense) {
    std::vector<std::pair<std::uint32_t, double>> out;
    for (std::size_t m = 0; m < dense.size(); ++m)
        if (dense[m] > 1e-12) out.emplace_back(static_cast<std::uint32_t>(m), dense[m]);
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

}  // namespace

EventReport assemble_occurrences(const TopicModel& model, const Segmentation& seg,
                                 const MessageStream& stream, double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0, 1)");
    if (seg.n != stream.size())
        throw std::invalid_argument("segmentation does not match the stream");
    const auto episodes = seg.episodes();
    if (model.theta.size() != episodes.size())
        throw std::invalid_argument("model was fit on a different episode count");

    EventReport report;
    report.changepoints = seg.changepoints;
    report.eta = eta;
    report.events.resize(model.num_topics);
    for (std::size_t e = 0; e < model.num_topics; ++e) {
        EventSummary& ev = report.events[e];
        ev.id = e;
        ev.signature = sparse_signature(model.signatures[e]);
        // Merge runs of consecutive episodes whose mixture weight clears eta.
        std::size_t i = 0;
        while (i < episodes.size()) {
            if (model.theta[i][e] > eta) {
                std::size_t j = i;
                while (j + 1 < episodes.size() && model.theta[j + 1][e] > eta) ++j;
                ev.occurrences.push_back({stream[episodes[i].first].time,
                                          stream[episodes[j].second - 1].time});
                i = j + 1;
            } else {
                ++i;
            }
        }
        ev.active = !ev.occurrences.empty();
    }
    return report;
}

PipelineResult run_cdlda(const MessageStream& stream, const PipelineConfig& config) {
    if (stream.empty()) throw std::invalid_argument("cannot mine an empty stream");
    if (!time_ordered(stream)) throw std::invalid_argument("stream must be time-ordered");
    config.cd.validate();
    if (!(config.eta > 0.0 && config.eta < 1.0))
        throw std::invalid_argument("eta must lie in (0, 1)");

    PipelineResult result;

    // Detection runs on rescaled times so the gap term is measured in the
    // caller's granularity units.
    const double n_min = 2.0 / config.cd.alpha;
    if (static_cast<double>(stream.size()) < n_min) {
        result.single_episode_fallback = true;
        result.segmentation = Segmentation{stream.size(), {}};
    } else if (config.detection_time_scale != 1.0) {
        MessageStream scaled = stream;
        for (auto& m : scaled) m.time /= config.detection_time_scale;
        result.segmentation = detect_all(scaled, config.cd);
    } else {
        result.segmentation = detect_all(stream, config.cd);
    }

    DocumentSet docs;
    docs.vocab_size = vocab_upper_bound(stream);
    for (const auto& [lo, hi] : result.segmentation.episodes()) {
        std::vector<std::uint32_t> doc;
        doc.reserve(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) doc.push_back(stream[i].id);
        docs.docs.push_back(std::move(doc));
    }

    std::size_t num_topics = config.num_topics;
    if (num_topics == 0) {
        result.selection = select_num_topics(docs, config.topic_candidates, config.folds,
                                             config.fold_strategy, config.lda, config.seed);
        num_topics = result.selection->best;
    }

    result.model = gibbs_fit(docs, num_topics, config.lda, config.seed);
    result.report = assemble_occurrences(result.model, result.segmentation, stream, config.eta);
    return result;
}

SignatureClusters dedup_signatures(const std::vector<std::vector<double>>& signatures,
                                   double tv_threshold) {
    if (!(tv_threshold >= 0.0 && tv_threshold <= 1.0))
        throw std::invalid_argument("tv threshold must lie in [0, 1]");
    const std::size_t k = signatures.size();
    if (k == 0) return {};
    for (const auto& s : signatures)
        if (s.size() != signatures.front().size())
            throw std::invalid_argument("signatures differ in length");

    // Single linkage via union-find over pairs within the threshold.
    std::vector<std::size_t> parent(k);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            double tv = 0.0;
            for (std::size_t m = 0; m < signatures[i].size(); ++m)
                tv += std::abs(signatures[i][m] - signatures[j][m]);
            tv *= 0.5;
            if (tv <= tv_threshold) parent[find(i)] = find(j);
        }
    }

    SignatureClusters out;
    std::vector<std::ptrdiff_t> cluster_of(k, -1);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t root = find(i);
        if (cluster_of[root] < 0) {
            cluster_of[root] = static_cast<std::ptrdiff_t>(out.clusters.size());
            out.clusters.emplace_back();
        }
        out.clusters[static_cast<std::size_t>(cluster_of[root])].push_back(i);
    }
    for (const auto& members : out.clusters) {
        std::vector<double> mean(signatures.front().size(), 0.0);
        for (std::size_t idx : members)
            for (std::size_t m = 0; m < mean.size(); ++m) mean[m] += signatures[idx][m];
        double sum = 0.0;
        for (double& v : mean) {
            v /= static_cast<double>(members.size());
            sum += v;
        }
        if (sum > 0.0)
            for (double& v : mean) v /= sum;
        out.centroids.push_back(std::move(mean));
    }
    return out;
}

}  // namespace logmine
