#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "logmine/corpus.hpp"

namespace logmine {

// --- Generative baseline: events with Beta-distributed timestamps ---------

struct AlgoBParams {
    std::size_t iterations = 1000;
    std::size_t burn_in = 500;
    std::size_t thin = 10;

    void validate() const;
};

struct AlgoBModel {
    std::size_t num_events = 0;
    std::size_t vocab_size = 0;
    std::vector<double> event_probs;              // posterior mean P(e)
    std::vector<std::vector<double>> signatures;  // num_events x vocab_size
    std::vector<double> beta_a, beta_b;           // per-event Beta(a, b) over scaled time
    std::vector<std::uint32_t> assignments;       // final per-message event
};

// Gibbs sampler for the model: event ~ P, message id ~ signature(event),
// timestamp (rescaled to (0,1)) ~ Beta(a_e, b_e). Uniform Dirichlet priors;
// Beta parameters re-fit by method of moments after every sweep.
AlgoBModel algob_fit(const MessageStream& stream, std::size_t num_events,
                     const AlgoBParams& params, std::uint64_t seed);

// --- Co-occurrence clique baseline ----------------------------------------

struct AlgoCParams {
    double slot_width = 1.0;      // time-slot width, stream units
    double edge_threshold = 0.6;  // keep edges with rho <= this
    std::size_t min_support = 5;  // drop ids seen in fewer slots
    std::size_t max_nodes = 2000; // clique enumeration refuses larger graphs

    void validate() const;
};

struct CooccurrenceGraph {
    double slot_width = 1.0;
    std::vector<std::uint32_t> nodes;       // kept message ids, ascending
    std::vector<std::int64_t> slot_counts;  // N_i, aligned with nodes
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::int64_t> pair_counts;  // N_ij, i < j

    // rho = 1 - N_ij / (N_i + N_j - N_ij); 1.0 when the pair never co-occurs.
    double rho(std::uint32_t a, std::uint32_t b) const;
    std::size_t node_index(std::uint32_t id) const;  // nodes.size() when absent
};

CooccurrenceGraph build_cooccurrence(const MessageStream& stream, double slot_width,
                                     std::size_t min_support);

// Events as maximal cliques of the thresholded co-occurrence graph
// (Bron-Kerbosch with pivoting). Cliques come back sorted by size descending,
// then lexicographically; members ascending. Throws when the filtered graph
// exceeds max_nodes.
std::vector<std::vector<std::uint32_t>> algoc_cluster(const MessageStream& stream,
                                                      const AlgoCParams& params);

// Jaccard similarity of two sorted-unique id sets; 0 when both are empty.
double jaccard(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

// Ids with signature probability strictly above prob_floor, ascending.
std::vector<std::uint32_t> signature_support(std::span<const double> signature,
                                             double prob_floor);

}  // namespace logmine
