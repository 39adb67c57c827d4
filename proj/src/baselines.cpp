#include "logmine/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "logmine/random.hpp"

namespace logmine {

void AlgoBParams::validate() const {
    if (iterations == 0) throw std::invalid_argument("iterations must be positive");
    if (burn_in >= iterations) throw std::invalid_argument("burn-in must precede the last sweep");
    if (thin == 0) throw std::invalid_argument("thinning interval must be positive");
}

namespace {

constexpr double kTimeClamp = 1e-6;

struct BetaParams {
    double a = 1.0;
    double b = 1.0;
    double log_norm = 0.0;  // lgamma(a+b) - lgamma(a) - lgamma(b)
};

BetaParams moment_beta(double mean, double var) {
    BetaParams p;
    // Method of moments; degenerate clusters keep the uniform Beta(1,1).
    const double spread = mean * (1.0 - mean);
    if (var > 1e-12 && spread > var) {
        const double conc = spread / var - 1.0;
        p.a = std::clamp(mean * conc, 1e-3, 1e4);
        p.b = std::clamp((1.0 - mean) * conc, 1e-3, 1e4);
    }
    p.log_norm = std::lgamma(p.a + p.b) - std::lgamma(p.a) - std::lgamma(p.b);
    return p;
}

}  // namespace

AlgoBModel algob_fit(const MessageStream& stream, std::size_t num_events,
                     const AlgoBParams& params, std::uint64_t seed) {
    if (stream.empty()) throw std::invalid_argument("cannot fit an empty stream");
    if (!time_ordered(stream)) throw std::invalid_argument("stream must be time-ordered");
    if (num_events == 0) throw std::invalid_argument("need at least one event");
    params.validate();

    const std::size_t n = stream.size();
    const std::size_t M = vocab_upper_bound(stream);
    const std::size_t E = num_events;

    // Rescale times into (0,1) for the Beta densities.
    const double t0 = stream.front().time;
    const double span = stream.back().time - t0;
    std::vector<double> u(n), log_u(n), log_1mu(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = span > 0.0 ? (stream[i].time - t0) / span : 0.5;
        v = std::clamp(v, kTimeClamp, 1.0 - kTimeClamp);
        u[i] = v;
        log_u[i] = std::log(v);
        log_1mu[i] = std::log1p(-v);
    }

    Rng rng(mix_seed(seed, 0xA16B0ULL));
    std::vector<std::uint32_t> z(n);
    std::vector<std::int64_t> event_count(E, 0);
    std::vector<std::vector<std::int64_t>> event_word(E, std::vector<std::int64_t>(M, 0));
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t e = static_cast<std::uint32_t>(rng.below(E));
        z[i] = e;
        ++event_count[e];
        ++event_word[e][stream[i].id];
    }
    std::vector<BetaParams> beta(E);

    std::vector<double> weights(E), logpdf(E);
    std::vector<double> p_acc(E, 0.0);
    std::vector<std::vector<double>> sig_acc(E, std::vector<double>(M, 0.0));
    std::size_t samples = 0;
    const double dM = static_cast<double>(M);

    for (std::size_t iter = 1; iter <= params.iterations; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t m = stream[i].id;
            const std::uint32_t old = z[i];
            --event_count[old];
            --event_word[old][m];
            // Collapsed counts with uniform Dirichlet priors, times a Beta
            // density evaluated in log space (max-shifted before exp).
            double max_log = -std::numeric_limits<double>::infinity();
            for (std::size_t e = 0; e < E; ++e) {
                logpdf[e] = beta[e].log_norm + (beta[e].a - 1.0) * log_u[i] +
                            (beta[e].b - 1.0) * log_1mu[i];
                max_log = std::max(max_log, logpdf[e]);
            }
            double total = 0.0;
            for (std::size_t e = 0; e < E; ++e) {
                const double w = (static_cast<double>(event_count[e]) + 1.0) *
                                 (static_cast<double>(event_word[e][m]) + 1.0) /
                                 (static_cast<double>(event_count[e]) + dM) *
                                 std::exp(logpdf[e] - max_log);
                weights[e] = w;
                total += w;
            }
            std::size_t pick = E - 1;
            double draw = rng.unit() * total;
            for (std::size_t e = 0; e < E; ++e) {
                draw -= weights[e];
                if (draw < 0.0) {
                    pick = e;
                    break;
                }
            }
            z[i] = static_cast<std::uint32_t>(pick);
            ++event_count[pick];
            ++event_word[pick][m];
        }

        // Re-fit each event's Beta by moments over its assigned times.
        std::vector<double> sum(E, 0.0), sumsq(E, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            sum[z[i]] += u[i];
            sumsq[z[i]] += u[i] * u[i];
        }
        for (std::size_t e = 0; e < E; ++e) {
            if (event_count[e] >= 2) {
                const double cnt = static_cast<double>(event_count[e]);
                const double mean = sum[e] / cnt;
                const double var = sumsq[e] / cnt - mean * mean;
                beta[e] = moment_beta(mean, var);
            } else {
                beta[e] = BetaParams{};
            }
        }

        if (iter > params.burn_in && (params.iterations - iter) % params.thin == 0) {
            ++samples;
            for (std::size_t e = 0; e < E; ++e) {
                p_acc[e] += (static_cast<double>(event_count[e]) + 1.0) /
                            (static_cast<double>(n) + static_cast<double>(E));
                const double denom = static_cast<double>(event_count[e]) + dM;
                for (std::size_t m = 0; m < M; ++m)
                    sig_acc[e][m] += (static_cast<double>(event_word[e][m]) + 1.0) / denom;
            }
        }
    }

    AlgoBModel model;
    model.num_events = E;
    model.vocab_size = M;
    const double inv = 1.0 / static_cast<double>(samples);
    for (double& v : p_acc) v *= inv;
    for (auto& row : sig_acc)
        for (double& v : row) v *= inv;
    model.event_probs = std::move(p_acc);
    model.signatures = std::move(sig_acc);
    model.beta_a.resize(E);
    model.beta_b.resize(E);
    for (std::size_t e = 0; e < E; ++e) {
        model.beta_a[e] = beta[e].a;
        model.beta_b[e] = beta[e].b;
    }
    model.assignments = std::move(z);
    return model;
}

void AlgoCParams::validate() const {
    if (!(slot_width > 0.0)) throw std::invalid_argument("slot width must be positive");
    if (!(edge_threshold >= 0.0)) throw std::invalid_argument("edge threshold must be nonnegative");
    if (max_nodes == 0) throw std::invalid_argument("node cap must be positive");
}

double CooccurrenceGraph::rho(std::uint32_t a, std::uint32_t b) const {
    const std::size_t ia = node_index(a);
    const std::size_t ib = node_index(b);
    if (ia >= nodes.size() || ib >= nodes.size())
        throw std::invalid_argument("id is not a graph node");
    if (a == b) return 0.0;
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    auto it = pair_counts.find(key);
    const double nij = it == pair_counts.end() ? 0.0 : static_cast<double>(it->second);
    const double denom = static_cast<double>(slot_counts[ia] + slot_counts[ib]) - nij;
    return 1.0 - nij / denom;
}

std::size_t CooccurrenceGraph::node_index(std::uint32_t id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
    if (it == nodes.end() || *it != id) return nodes.size();
    return static_cast<std::size_t>(it - nodes.begin());
}

CooccurrenceGraph build_cooccurrence(const MessageStream& stream, double slot_width,
                                     std::size_t min_support) {
    if (!(slot_width > 0.0)) throw std::invalid_argument("slot width must be positive");
    CooccurrenceGraph g;
    g.slot_width = slot_width;
    if (stream.empty()) return g;

    const double t0 = stream.front().time;
    // Distinct slots per id; stream order keeps each id's slots sorted.
    std::unordered_map<std::uint32_t, std::vector<std::int64_t>> slots_of;
    for (const auto& m : stream) {
        const auto slot = static_cast<std::int64_t>(std::floor((m.time - t0) / slot_width));
        auto& v = slots_of[m.id];
        if (v.empty() || v.back() != slot) v.push_back(slot);
    }
    for (auto& [id, v] : slots_of) {
        if (v.size() >= min_support) {
            g.nodes.push_back(id);
        }
    }
    std::sort(g.nodes.begin(), g.nodes.end());
    g.slot_counts.resize(g.nodes.size());
    std::unordered_map<std::int64_t, std::vector<std::uint32_t>> ids_in_slot;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const auto& v = slots_of[g.nodes[i]];
        g.slot_counts[i] = static_cast<std::int64_t>(v.size());
        for (std::int64_t s : v) ids_in_slot[s].push_back(g.nodes[i]);
    }
    for (auto& [slot, ids] : ids_in_slot) {
        std::sort(ids.begin(), ids.end());
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = i + 1; j < ids.size(); ++j)
                ++g.pair_counts[{ids[i], ids[j]}];
    }
    return g;
}

namespace {

// Bron-Kerbosch with pivoting over vertex index sets.
void bron_kerbosch(std::vector<std::uint32_t>& r, std::vector<std::uint32_t> p,
                   std::vector<std::uint32_t> x,
                   const std::vector<std::vector<char>>& adj,
                   std::vector<std::vector<std::uint32_t>>& out) {
    if (p.empty() && x.empty()) {
        out.push_back(r);
        return;
    }
    // Pivot on the candidate with the most neighbors in p.
    std::uint32_t pivot = 0;
    std::size_t best = 0;
    bool first = true;
    for (const auto& pool : {p, x}) {
        for (std::uint32_t v : pool) {
            std::size_t deg = 0;
            for (std::uint32_t w : p)
                if (adj[v][w]) ++deg;
            if (first || deg > best) {
                pivot = v;
                best = deg;
                first = false;
            }
        }
    }
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t v : p)
        if (!adj[pivot][v]) candidates.push_back(v);
    for (std::uint32_t v : candidates) {
        std::vector<std::uint32_t> p2, x2;
        for (std::uint32_t w : p)
            if (adj[v][w]) p2.push_back(w);
        for (std::uint32_t w : x)
            if (adj[v][w]) x2.push_back(w);
        r.push_back(v);
        bron_kerbosch(r, std::move(p2), std::move(x2), adj, out);
        r.pop_back();
        p.erase(std::find(p.begin(), p.end(), v));
        x.push_back(v);
    }
}

}  // namespace

std::vector<std::vector<std::uint32_t>> algoc_cluster(const MessageStream& stream,
                                                      const AlgoCParams& params) {
    params.validate();
    const CooccurrenceGraph g = build_cooccurrence(stream, params.slot_width, params.min_support);
    if (g.nodes.size() > params.max_nodes)
        throw std::runtime_error("co-occurrence graph has " + std::to_string(g.nodes.size()) +
                                 " nodes, above the clique-enumeration cap of " +
                                 std::to_string(params.max_nodes));

    const std::size_t k = g.nodes.size();
    std::vector<std::vector<char>> adj(k, std::vector<char>(k, 0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            if (g.rho(g.nodes[i], g.nodes[j]) <= params.edge_threshold)
                adj[i][j] = adj[j][i] = 1;

    std::vector<std::uint32_t> r, p(k), x;
    for (std::size_t i = 0; i < k; ++i) p[i] = static_cast<std::uint32_t>(i);
    std::vector<std::vector<std::uint32_t>> cliques;
    if (k > 0) bron_kerbosch(r, std::move(p), std::move(x), adj, cliques);

    for (auto& clique : cliques) {
        for (auto& v : clique) v = g.nodes[v];
        std::sort(clique.begin(), clique.end());
    }
    std::sort(cliques.begin(), cliques.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    });
    return cliques;
}

double jaccard(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
    std::size_t inter = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++inter;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<std::uint32_t> signature_support(std::span<const double> signature,
                                             double prob_floor) {
    if (!(prob_floor >= 0.0)) throw std::invalid_argument("probability floor must be nonnegative");
    std::vector<std::uint32_t> out;
    for (std::size_t m = 0; m < signature.size(); ++m)
        if (signature[m] > prob_floor) out.push_back(static_cast<std::uint32_t>(m));
    return out;
}

}  // namespace logmine
