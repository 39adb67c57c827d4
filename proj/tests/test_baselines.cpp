#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "logmine/baselines.hpp"
#include "logmine/random.hpp"
#include "logmine/synth.hpp"

using namespace logmine;

namespace {

constexpr std::uint64_t kSeed = 20260814ULL;

// One message per listed id in every listed slot, slot width 1.
MessageStream slot_stream(const std::vector<std::vector<std::uint32_t>>& slots) {
    MessageStream s;
    for (std::size_t slot = 0; slot < slots.size(); ++slot)
        for (std::uint32_t id : slots[slot])
            s.push_back({id, static_cast<double>(slot)});
    return s;
}

}  // namespace

TEST_CASE("one-event fit collapses to corpus statistics") {
    MessageStream stream;
    Rng gen(kSeed);
    double t = 0.0;
    for (std::size_t i = 0; i < 200; ++i) {
        stream.push_back({static_cast<std::uint32_t>(gen.below(4)), t});
        t += 0.5 + gen.unit();
    }
    const AlgoBModel model = algob_fit(stream, 1, AlgoBParams{}, kSeed);

    REQUIRE(model.event_probs.size() == 1);
    CHECK(model.event_probs[0] == 1.0);

    std::vector<std::int64_t> counts(4, 0);
    for (const auto& m : stream) ++counts[m.id];
    for (std::size_t id = 0; id < 4; ++id) {
        const double expected =
            (static_cast<double>(counts[id]) + 1.0) / (200.0 + 4.0);
        CHECK(model.signatures[0][id] == doctest::Approx(expected).epsilon(1e-12));
    }

    // The Beta parameters equal the moment fit over all rescaled times.
    const double t0 = stream.front().time;
    const double span = stream.back().time - t0;
    double sum = 0.0, sumsq = 0.0;
    for (const auto& m : stream) {
        const double u = std::clamp((m.time - t0) / span, 1e-6, 1.0 - 1e-6);
        sum += u;
        sumsq += u * u;
    }
    const double mean = sum / 200.0;
    const double var = sumsq / 200.0 - mean * mean;
    const double conc = mean * (1.0 - mean) / var - 1.0;
    CHECK(model.beta_a[0] == doctest::Approx(mean * conc).epsilon(1e-9));
    CHECK(model.beta_b[0] == doctest::Approx((1.0 - mean) * conc).epsilon(1e-9));
}

TEST_CASE("time-disjoint events are recovered within the paper-scale error") {
    SynthSpec spec;
    spec.vocab_size = 4;
    spec.signatures = {{0.25, 0.25, 0.499, 0.001}, {0.25, 0.25, 0.001, 0.499}};
    spec.episodes = {{5000, {1.0, 0.0}, GapLaw::uniform_mean, 1.0},
                     {5000, {0.0, 1.0}, GapLaw::uniform_mean, 1.0}};
    spec.seed = kSeed;
    const SynthStream stream = generate(spec);
    const AlgoBModel model = algob_fit(stream.messages, 2, AlgoBParams{}, kSeed);
    CHECK(max_matched_l1(model.signatures, stream.true_signatures) <= 0.1);
}

TEST_CASE("baseline fitting is deterministic and validates input") {
    MessageStream stream = {{0, 0.0}, {1, 1.0}, {0, 2.0}, {1, 3.0}};
    AlgoBParams quick;
    quick.iterations = 40;
    quick.burn_in = 20;
    quick.thin = 5;
    const AlgoBModel a = algob_fit(stream, 2, quick, kSeed);
    const AlgoBModel b = algob_fit(stream, 2, quick, kSeed);
    CHECK(a.signatures == b.signatures);
    CHECK(a.event_probs == b.event_probs);
    CHECK(a.beta_a == b.beta_a);
    CHECK(a.assignments == b.assignments);

    CHECK_THROWS_AS(algob_fit(MessageStream{}, 1, quick, kSeed), std::invalid_argument);
    CHECK_THROWS_AS(algob_fit(stream, 0, quick, kSeed), std::invalid_argument);
    const MessageStream unsorted = {{0, 2.0}, {0, 1.0}};
    CHECK_THROWS_AS(algob_fit(unsorted, 1, quick, kSeed), std::invalid_argument);
    AlgoBParams bad;
    bad.burn_in = bad.iterations;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("perfect co-occurrence gives distance zero and a single clique") {
    // Ids 0 and 1 appear together in every slot.
    const MessageStream stream =
        slot_stream({{0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}});
    const CooccurrenceGraph graph = build_cooccurrence(stream, 1.0, 5);
    CHECK(graph.rho(0, 1) == 0.0);

    AlgoCParams params;
    params.slot_width = 1.0;
    const auto cliques = algoc_cluster(stream, params);
    REQUIRE(cliques.size() == 1);
    CHECK(cliques[0] == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("ids that never share a slot are maximally distant") {
    const MessageStream stream =
        slot_stream({{0}, {1}, {0}, {1}, {0}, {1}, {0}, {1}, {0}, {1}});
    const CooccurrenceGraph graph = build_cooccurrence(stream, 1.0, 5);
    CHECK(graph.rho(0, 1) == 1.0);

    AlgoCParams params;
    params.slot_width = 1.0;
    const auto cliques = algoc_cluster(stream, params);
    REQUIRE(cliques.size() == 2);
    CHECK(cliques[0] == std::vector<std::uint32_t>{0});
    CHECK(cliques[1] == std::vector<std::uint32_t>{1});
}

TEST_CASE("half-overlapping slot sets land exactly on the formula") {
    // N_0 = 10, N_1 = 10, N_01 = 5: distance 1 - 5/15, above the 0.6 cut.
    std::vector<std::vector<std::uint32_t>> slots;
    for (int i = 0; i < 5; ++i) slots.push_back({0, 1});
    for (int i = 0; i < 5; ++i) slots.push_back({0});
    for (int i = 0; i < 5; ++i) slots.push_back({1});
    const MessageStream stream = slot_stream(slots);
    const CooccurrenceGraph graph = build_cooccurrence(stream, 1.0, 5);
    CHECK(graph.rho(0, 1) == 1.0 - 5.0 / 15.0);
    CHECK(graph.rho(0, 1) == doctest::Approx(2.0 / 3.0));

    AlgoCParams params;
    params.slot_width = 1.0;
    const auto cliques = algoc_cluster(stream, params);
    CHECK(cliques.size() == 2);  // the edge fails the 0.6 threshold
}

TEST_CASE("two independent groups form two cliques") {
    std::vector<std::vector<std::uint32_t>> slots;
    for (int i = 0; i < 6; ++i) slots.push_back(i % 2 ? std::vector<std::uint32_t>{0, 1}
                                                      : std::vector<std::uint32_t>{2, 3});
    const MessageStream stream = slot_stream(slots);
    AlgoCParams params;
    params.slot_width = 1.0;
    params.min_support = 2;
    const auto cliques = algoc_cluster(stream, params);
    REQUIRE(cliques.size() == 2);
    CHECK(cliques[0] == std::vector<std::uint32_t>{0, 1});
    CHECK(cliques[1] == std::vector<std::uint32_t>{2, 3});
}

TEST_CASE("low-support ids are dropped before clique search") {
    std::vector<std::vector<std::uint32_t>> slots;
    for (int i = 0; i < 8; ++i) slots.push_back({0, 1});
    slots.push_back({0, 1, 2});  // id 2 appears once
    const MessageStream stream = slot_stream(slots);
    AlgoCParams params;
    params.slot_width = 1.0;
    params.min_support = 5;
    const auto cliques = algoc_cluster(stream, params);
    REQUIRE(cliques.size() == 1);
    CHECK(cliques[0] == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("clique enumeration refuses oversized graphs") {
    MessageStream stream;
    for (std::uint32_t id = 0; id < 2100; ++id) stream.push_back({id, 0.5});
    AlgoCParams params;
    params.slot_width = 1.0;
    params.min_support = 1;
    CHECK_THROWS_AS(algoc_cluster(stream, params), std::runtime_error);
    params.max_nodes = 2100;
    CHECK_NOTHROW(algoc_cluster(stream, params));
}

TEST_CASE("clustering is invariant under id relabeling") {
    for (std::uint64_t c = 0; c < 50; ++c) {
        Rng rng(mix_seed(kSeed, 0xC11ULL, c));
        const std::size_t ids = 3 + rng.below(5);
        const std::size_t slots = 6 + rng.below(15);
        std::vector<std::vector<std::uint32_t>> incidence(slots);
        for (std::size_t s = 0; s < slots; ++s)
            for (std::size_t i = 0; i < ids; ++i)
                if (rng.unit() < 0.45) incidence[s].push_back(static_cast<std::uint32_t>(i));

        // A random relabeling permutation over the id space.
        std::vector<std::uint32_t> relabel(ids);
        for (std::size_t i = 0; i < ids; ++i) relabel[i] = static_cast<std::uint32_t>(i);
        for (std::size_t i = ids; i > 1; --i)
            std::swap(relabel[i - 1], relabel[rng.below(i)]);

        std::vector<std::vector<std::uint32_t>> renamed(slots);
        for (std::size_t s = 0; s < slots; ++s)
            for (std::uint32_t id : incidence[s]) renamed[s].push_back(relabel[id]);
        for (auto& row : renamed) std::sort(row.begin(), row.end());

        AlgoCParams params;
        params.slot_width = 1.0;
        params.min_support = 1;
        const auto base = algoc_cluster(slot_stream(incidence), params);
        auto mapped = algoc_cluster(slot_stream(renamed), params);

        // Undo the relabeling and compare as sets of sets.
        std::vector<std::uint32_t> inverse(ids);
        for (std::size_t i = 0; i < ids; ++i) inverse[relabel[i]] = static_cast<std::uint32_t>(i);
        for (auto& clique : mapped) {
            for (auto& id : clique) id = inverse[id];
            std::sort(clique.begin(), clique.end());
        }
        auto canon = [](std::vector<std::vector<std::uint32_t>> cs) {
            std::sort(cs.begin(), cs.end());
            return cs;
        };
        CHECK(canon(base) == canon(mapped));
    }
}

TEST_CASE("jaccard similarity on sorted sets") {
    const std::vector<std::uint32_t> a = {1, 2, 3};
    CHECK(jaccard(a, a) == 1.0);
    CHECK(jaccard(a, std::vector<std::uint32_t>{4, 5}) == 0.0);
    CHECK(jaccard(std::vector<std::uint32_t>{1, 2, 3, 4},
                  std::vector<std::uint32_t>{1, 2, 3}) == 0.75);
    CHECK(jaccard(std::vector<std::uint32_t>{}, std::vector<std::uint32_t>{}) == 0.0);
}

TEST_CASE("signature support thresholds strictly") {
    const std::vector<double> sig = {0.5, 0.493, 0.007};
    CHECK(signature_support(sig, 0.007) == std::vector<std::uint32_t>{0, 1});
    CHECK(signature_support(sig, 0.0) == std::vector<std::uint32_t>{0, 1, 2});
    CHECK(signature_support(sig, 0.5).empty());
}

TEST_CASE("co-occurrence parameters validate") {
    AlgoCParams params;
    params.slot_width = 0.0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
    params = AlgoCParams{};
    params.edge_threshold = -0.1;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
    params = AlgoCParams{};
    params.max_nodes = 0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
}
