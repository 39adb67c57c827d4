// Command-line front end: mine events from logs, run the baselines, and
// drive the synthetic experiment harnesses, all with reproducible outputs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "logmine/baselines.hpp"
#include "logmine/changepoint.hpp"
#include "logmine/corpus.hpp"
#include "logmine/events.hpp"
#include "logmine/io.hpp"
#include "logmine/lda.hpp"
#include "logmine/random.hpp"
#include "logmine/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace logmine;

namespace {

constexpr const char* kVersion = "0.1.0";

// Wall-clock per stage, echoed into the manifest.
class StageTimes {
public:
    template <class F>
    auto time(const std::string& name, F&& body) {
        const auto t0 = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
            body();
            finish(name, t0);
        } else {
            auto value = body();
            finish(name, t0);
            return value;
        }
    }

    json to_json() const {
        json arr = json::array();
        for (const auto& [name, secs] : entries_)
            arr.push_back({{"stage", name}, {"seconds", secs}});
        return arr;
    }

private:
    void finish(const std::string& name, std::chrono::steady_clock::time_point t0) {
        const std::chrono::duration<double> d = std::chrono::steady_clock::now() - t0;
        entries_.emplace_back(name, d.count());
    }

    std::vector<std::pair<std::string, double>> entries_;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string digest_file(const std::string& path) {
    const std::string bytes = read_file(path);
    const std::uint64_t h =
        fnv1a64(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json make_manifest(const std::string& command, json config,
                   const std::vector<std::string>& inputs, std::uint64_t seed,
                   const StageTimes& times) {
    json digests = json::object();
    for (const auto& path : inputs) digests[path] = digest_file(path);
    return {{"command", command}, {"version", kVersion},     {"seed", seed},
            {"config", std::move(config)}, {"inputs", digests}, {"timings", times.to_json()}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

// Everything is serialized before the first byte lands on disk, so a failing
// stage never leaves partial outputs behind.
using FileSet = std::vector<std::pair<std::string, std::string>>;

void write_all(const std::string& out_dir, const FileSet& files) {
    fs::create_directories(out_dir);
    for (const auto& [name, content] : files) {
        const fs::path path = fs::path(out_dir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("short write to " + path.string());
    }
}

json sparse_signature_json(std::span<const double> row) {
    std::vector<std::pair<std::uint32_t, double>> sparse;
    for (std::size_t id = 0; id < row.size(); ++id)
        if (row[id] > 1e-12) sparse.push_back({static_cast<std::uint32_t>(id), row[id]});
    std::stable_sort(sparse.begin(), sparse.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    json out = json::array();
    for (const auto& [id, p] : sparse) out.push_back({id, p});
    return out;
}

const TimeRepr kIsoTime = [](double t) { return json(format_iso8601_ms(std::llround(t))); };

// --- Shared ingestion/options ----------------------------------------------

struct PrepOptions {
    std::string input;
    std::string format = "csv";
    bool no_templates = false;
    double template_threshold = 1e-4;
    std::string granularity = "1s";
};

struct Prepared {
    Corpus corpus;
    MessageStream stream;  // rounded times, epoch milliseconds
    double granularity_ms = 1000.0;
    std::size_t skipped = 0;
};

Prepared prepare(const PrepOptions& opts, StageTimes& times) {
    const auto granularity = parse_duration_ms(opts.granularity);
    if (!granularity)
        throw std::invalid_argument("bad --granularity value: " + opts.granularity);

    const IngestResult ingested = times.time("ingest", [&] {
        std::ifstream probe(opts.input);
        if (!probe) throw std::invalid_argument("cannot open input file: " + opts.input);
        probe.close();
        const InputFormat fmt = opts.format == "jsonl" ? InputFormat::jsonl : InputFormat::csv;
        try {
            return ingest_file(opts.input, fmt);
        } catch (const std::exception& e) {
            throw std::invalid_argument(std::string("input error: ") + e.what());
        }
    });

    Prepared prep;
    prep.skipped = ingested.skipped;
    prep.granularity_ms = *granularity;
    prep.corpus = times.time("index", [&] {
        return opts.no_templates ? index_verbatim(ingested.records)
                                 : extract_templates(ingested.records, opts.template_threshold);
    });
    prep.stream = times.time("round",
                             [&] { return round_times(prep.corpus.stream, *granularity); });
    return prep;
}

json prep_config_json(const PrepOptions& opts) {
    return {{"input", opts.input},
            {"format", opts.format},
            {"no_templates", opts.no_templates},
            {"template_threshold", opts.template_threshold},
            {"granularity", opts.granularity}};
}

// --- mine --------------------------------------------------------------------

struct MineOptions {
    PrepOptions prep;
    double alpha = 0.01;
    double delta = 0.1;
    std::string metric = "tv_plus_gap";
    double gap_weight = 1.0;
    double eta = 0.1;
    std::size_t topics = 0;
    std::vector<std::size_t> candidates = {2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::size_t folds = 10;
    std::string fold_strategy = "random";
    std::size_t iterations = 1000;
    std::size_t burn_in = 500;
    std::size_t thin = 10;
    std::uint64_t seed = 0;
    std::string out_dir;
};

int cmd_mine(const MineOptions& o) {
    StageTimes times;
    const Prepared prep = prepare(o.prep, times);

    PipelineConfig cfg;
    cfg.cd.alpha = o.alpha;
    cfg.cd.delta = o.delta;
    cfg.cd.metric = parse_change_metric(o.metric).value();
    cfg.cd.gap_weight = o.gap_weight;
    cfg.eta = o.eta;
    cfg.num_topics = o.topics;
    cfg.topic_candidates = o.candidates;
    cfg.folds = o.folds;
    cfg.fold_strategy =
        o.fold_strategy == "strided" ? FoldStrategy::strided : FoldStrategy::random;
    cfg.lda.iterations = o.iterations;
    cfg.lda.burn_in = o.burn_in;
    cfg.lda.thin = o.thin;
    cfg.seed = o.seed;
    // Detection sees times in granularity units so the gap term of the
    // statistic is O(1) rather than O(milliseconds).
    cfg.detection_time_scale = prep.granularity_ms;

    const PipelineResult result =
        times.time("pipeline", [&] { return run_cdlda(prep.stream, cfg); });

    json config = prep_config_json(o.prep);
    config["alpha"] = o.alpha;
    config["delta"] = o.delta;
    config["metric"] = o.metric;
    config["gap_weight"] = o.gap_weight;
    config["eta"] = o.eta;
    config["topics"] = o.topics;
    config["topic_candidates"] = o.candidates;
    config["folds"] = o.folds;
    config["fold_strategy"] = o.fold_strategy;
    config["iterations"] = o.iterations;
    config["burn_in"] = o.burn_in;
    config["thin"] = o.thin;
    config["seed"] = o.seed;
    config["skipped_records"] = prep.skipped;
    if (result.selection) {
        json scores = json::array();
        for (const auto& [cand, score] : result.selection->scores)
            scores.push_back({{"candidate", cand}, {"mean_held_out_loglik", score}});
        config["selected_topics"] = result.selection->best;
        config["selection_scores"] = scores;
    }
    config["single_episode_fallback"] = result.single_episode_fallback;

    FileSet files = times.time("serialize", [&] {
        FileSet out;
        out.emplace_back("report.json", dump(report_to_json(result.report, kIsoTime, config)));
        out.emplace_back("vocab.json", dump(vocabulary_to_json(prep.corpus.vocab)));
        out.emplace_back("segmentation.json",
                         dump(segmentation_to_json(result.segmentation, prep.stream, kIsoTime)));
        out.emplace_back("model.json", dump(model_to_json(result.model)));
        return out;
    });
    files.emplace_back("manifest.json",
                       dump(make_manifest("mine", config, {o.prep.input}, o.seed, times)));
    write_all(o.out_dir, files);
    return 0;
}

// --- baseline ----------------------------------------------------------------

struct BaselineOptions {
    PrepOptions prep;
    std::string algo;
    std::size_t events = 0;
    std::size_t iterations = 1000;
    std::size_t burn_in = 500;
    std::size_t thin = 10;
    std::string slot_width = "60s";
    double edge_threshold = 0.6;
    std::size_t min_support = 5;
    std::size_t max_nodes = 2000;
    std::uint64_t seed = 0;
    std::string out_dir;
};

int cmd_baseline(const BaselineOptions& o) {
    StageTimes times;
    const Prepared prep = prepare(o.prep, times);

    json config = prep_config_json(o.prep);
    config["algo"] = o.algo;
    config["seed"] = o.seed;
    config["skipped_records"] = prep.skipped;

    json result;
    if (o.algo == "b") {
        if (o.events == 0)
            throw std::invalid_argument("--events is required with --algo b");
        AlgoBParams params;
        params.iterations = o.iterations;
        params.burn_in = o.burn_in;
        params.thin = o.thin;
        config["events"] = o.events;
        config["iterations"] = o.iterations;
        config["burn_in"] = o.burn_in;
        config["thin"] = o.thin;
        const AlgoBModel model =
            times.time("fit", [&] { return algob_fit(prep.stream, o.events, params, o.seed); });
        json sigs = json::array();
        for (const auto& row : model.signatures) sigs.push_back(sparse_signature_json(row));
        json beta = json::array();
        for (std::size_t e = 0; e < model.num_events; ++e)
            beta.push_back({{"a", model.beta_a[e]}, {"b", model.beta_b[e]}});
        result = {{"algo", "b"},
                  {"num_events", model.num_events},
                  {"vocab_size", model.vocab_size},
                  {"seed", o.seed},
                  {"event_probs", model.event_probs},
                  {"signatures", sigs},
                  {"beta", beta}};
    } else {
        const auto slot = parse_duration_ms(o.slot_width);
        if (!slot) throw std::invalid_argument("bad --slot-width value: " + o.slot_width);
        AlgoCParams params;
        params.slot_width = *slot;
        params.edge_threshold = o.edge_threshold;
        params.min_support = o.min_support;
        params.max_nodes = o.max_nodes;
        config["slot_width"] = o.slot_width;
        config["edge_threshold"] = o.edge_threshold;
        config["min_support"] = o.min_support;
        config["max_nodes"] = o.max_nodes;
        const auto cliques =
            times.time("cluster", [&] { return algoc_cluster(prep.stream, params); });
        json rows = json::array();
        for (const auto& clique : cliques) {
            json members = json::array();
            for (std::uint32_t id : clique) {
                const auto& [tmpl, source] = prep.corpus.vocab.entry(id);
                members.push_back({{"id", id}, {"template", tmpl}, {"source", source}});
            }
            rows.push_back({{"ids", clique}, {"members", members}});
        }
        result = {{"algo", "c"},
                  {"slot_width_ms", *slot},
                  {"edge_threshold", o.edge_threshold},
                  {"min_support", o.min_support},
                  {"cliques", rows}};
    }

    FileSet files;
    files.emplace_back("baseline.json", dump(result));
    files.emplace_back("vocab.json", dump(vocabulary_to_json(prep.corpus.vocab)));
    files.emplace_back("manifest.json",
                       dump(make_manifest("baseline", config, {o.prep.input}, o.seed, times)));
    write_all(o.out_dir, files);
    return 0;
}

// --- bench ---------------------------------------------------------------------

struct BenchOptions {
    std::string experiment;
    std::vector<std::size_t> n_values;
    std::size_t trials = 20;
    std::uint64_t seed = 0;
    std::string out_dir;
};

int cmd_bench(const BenchOptions& o) {
    StageTimes times;
    json config = {{"experiment", o.experiment}, {"trials", o.trials}, {"seed", o.seed}};
    FileSet files;

    if (o.experiment == "metrics") {
        const std::size_t n = o.n_values.empty() ? 25000 : o.n_values.front();
        config["n"] = n;
        const std::vector<ChangeMetric> metrics = {
            ChangeMetric::tv_plus_gap, ChangeMetric::l2, ChangeMetric::unbiased_l2,
            ChangeMetric::jensen_shannon, ChangeMetric::hellinger};
        const auto rows = times.time(
            "run", [&] { return run_metric_comparison(n, o.trials, metrics, o.seed); });
        std::ostringstream csv;
        csv << "metric,mean_abs_error,trials,n\n";
        json jrows = json::array();
        for (const auto& row : rows) {
            csv << to_string(row.metric) << ',' << fmt_double(row.mean_abs_error) << ','
                << row.trials << ',' << row.n << '\n';
            jrows.push_back({{"metric", to_string(row.metric)},
                             {"mean_abs_error", row.mean_abs_error},
                             {"trials", row.trials},
                             {"n", row.n}});
        }
        files.emplace_back("bench_metrics.csv", csv.str());
        files.emplace_back("bench_metrics.json", dump(json{{"rows", jrows}}));
    } else if (o.experiment == "scaling") {
        const std::vector<std::size_t> ns =
            o.n_values.empty() ? std::vector<std::size_t>{100000, 1000000, 10000000}
                               : o.n_values;
        config["n_values"] = ns;
        const ScalingResult result =
            times.time("run", [&] { return run_scaling(ns, 50, 3, o.seed); });
        std::ostringstream csv;
        csv << "n,seconds\n";
        json jrows = json::array();
        for (const auto& row : result.rows) {
            csv << row.n << ',' << fmt_double(row.seconds) << '\n';
            jrows.push_back({{"n", row.n}, {"seconds", row.seconds}});
        }
        files.emplace_back("bench_scaling.csv", csv.str());
        files.emplace_back("bench_scaling.json",
                           dump(json{{"rows", jrows}, {"slope", result.slope}}));
    } else if (o.experiment == "samplecomplexity") {
        const std::vector<std::size_t> ns =
            o.n_values.empty() ? std::vector<std::size_t>{1000, 10000, 100000} : o.n_values;
        config["n_values"] = ns;
        config["gamma"] = 0.5;
        config["epsilon"] = 0.01;
        const auto rows = times.time(
            "run", [&] { return run_sample_complexity(ns, o.trials, 0.5, 0.01, o.seed); });
        std::ostringstream csv;
        csv << "n,trials,correct,rate,wilson_low,wilson_high\n";
        json jrows = json::array();
        for (const auto& row : rows) {
            csv << row.n << ',' << row.trials << ',' << row.correct << ','
                << fmt_double(row.rate) << ',' << fmt_double(row.wilson_low) << ','
                << fmt_double(row.wilson_high) << '\n';
            jrows.push_back({{"n", row.n},
                             {"trials", row.trials},
                             {"correct", row.correct},
                             {"rate", row.rate},
                             {"wilson_low", row.wilson_low},
                             {"wilson_high", row.wilson_high}});
        }
        files.emplace_back("bench_samplecomplexity.csv", csv.str());
        files.emplace_back("bench_samplecomplexity.json", dump(json{{"rows", jrows}}));
    } else {  // lda_recovery
        const SynthStream stream = generate(overlap_mixture_spec(o.seed));
        PipelineConfig cfg;
        cfg.cd.alpha = 0.1;
        cfg.cd.delta = 0.5;
        cfg.eta = 0.3;
        cfg.num_topics = 2;
        cfg.seed = o.seed;
        const PipelineResult pipeline =
            times.time("cdlda", [&] { return run_cdlda(stream.messages, cfg); });
        const double cdlda_l1 =
            max_matched_l1(pipeline.model.signatures, stream.true_signatures);

        const AlgoBModel algob = times.time(
            "algob", [&] { return algob_fit(stream.messages, 2, AlgoBParams{}, o.seed); });
        const double algob_l1 = max_matched_l1(algob.signatures, stream.true_signatures);

        double cdlda_secs = 0.0, algob_secs = 0.0;
        for (const auto& entry : times.to_json()) {
            if (entry["stage"] == "cdlda") cdlda_secs = entry["seconds"].get<double>();
            if (entry["stage"] == "algob") algob_secs = entry["seconds"].get<double>();
        }
        std::ostringstream csv;
        csv << "method,max_l1,seconds\n";
        csv << "cdlda," << fmt_double(cdlda_l1) << ',' << fmt_double(cdlda_secs) << '\n';
        csv << "algob," << fmt_double(algob_l1) << ',' << fmt_double(algob_secs) << '\n';
        files.emplace_back("bench_lda_recovery.csv", csv.str());
        json jrows = json::array();
        jrows.push_back({{"method", "cdlda"}, {"max_l1", cdlda_l1}, {"seconds", cdlda_secs}});
        jrows.push_back({{"method", "algob"}, {"max_l1", algob_l1}, {"seconds", algob_secs}});
        files.emplace_back("bench_lda_recovery.json", dump(json{{"rows", jrows}}));
    }

    files.emplace_back("manifest.json",
                       dump(make_manifest("bench", config, {}, o.seed, times)));
    write_all(o.out_dir, files);
    return 0;
}

// --- synth ---------------------------------------------------------------------

struct SynthOptions {
    std::string preset;
    std::size_t n = 25000;
    double gamma = 0.5;
    std::size_t vocab = 50;
    std::size_t changes = 3;
    std::uint64_t seed = 0;
    std::string out_dir;
};

int cmd_synth(const SynthOptions& o) {
    StageTimes times;
    SynthSpec spec;
    if (o.preset == "metrics")
        spec = metric_shift_spec(o.n, o.seed, o.gamma);
    else if (o.preset == "overlap")
        spec = overlap_mixture_spec(o.seed);
    else
        spec = scaling_spec(o.n, o.vocab, o.changes, o.seed);

    const SynthStream stream = times.time("generate", [&] { return generate(spec); });

    const std::string csv = times.time("serialize", [&] {
        std::ostringstream out;
        out << "timestamp,source,text\n";
        for (const auto& m : stream.messages)
            out << std::llround(m.time * 1000.0) << ",synth,m" << m.id << '\n';
        return out.str();
    });

    json truth = {{"preset", o.preset},
                  {"n", stream.messages.size()},
                  {"seed", o.seed},
                  {"changepoints", stream.true_segmentation.changepoints},
                  {"signatures", stream.true_signatures},
                  {"mixtures", stream.episode_mixtures}};

    json config = {{"preset", o.preset}, {"n", o.n},           {"gamma", o.gamma},
                   {"vocab", o.vocab},   {"changes", o.changes}, {"seed", o.seed}};
    FileSet files;
    files.emplace_back("messages.csv", csv);
    files.emplace_back("truth.json", dump(truth));
    files.emplace_back("manifest.json", dump(make_manifest("synth", config, {}, o.seed, times)));
    write_all(o.out_dir, files);
    return 0;
}

// --- validate --------------------------------------------------------------------

// Minimal RFC-4180 walk: every record must carry the same field count.
bool csv_well_formed(const std::string& content, std::string& reason) {
    if (content.empty()) {
        reason = "empty file";
        return false;
    }
    std::size_t fields = 0, expect = 0, records = 0;
    bool quoted = false;
    std::size_t i = 0;
    const std::size_t n = content.size();
    ++fields;
    auto end_record = [&]() {
        ++records;
        if (records == 1)
            expect = fields;
        else if (fields != expect)
            return false;
        fields = 1;
        return true;
    };
    while (i < n) {
        const char c = content[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < n && content[i + 1] == '"')
                    ++i;
                else
                    quoted = false;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            ++fields;
        } else if (c == '\n') {
            if (!end_record()) {
                reason = "inconsistent field count at record " + std::to_string(records + 1);
                return false;
            }
        }
        ++i;
    }
    if (quoted) {
        reason = "unterminated quote";
        return false;
    }
    if (content.back() != '\n' && !end_record()) {
        reason = "inconsistent field count in final record";
        return false;
    }
    return true;
}

bool json_shape_ok(const std::string& name, const json& j, std::string& reason) {
    auto need = [&](bool cond, const char* what) {
        if (!cond) reason = what;
        return cond;
    };
    if (name == "report.json")
        return need(j.is_object() && j.contains("events") && j["events"].is_array() &&
                        j.contains("changepoints") && j.contains("config"),
                    "expected {events, changepoints, config}");
    if (name == "vocab.json") {
        if (!need(j.is_object(), "expected an id -> entry map")) return false;
        for (const auto& [key, value] : j.items()) {
            (void)key;
            if (!need(value.is_object() && value.contains("template") && value.contains("source"),
                      "entries need template and source"))
                return false;
        }
        return true;
    }
    if (name == "manifest.json")
        return need(j.is_object() && j.contains("command") && j.contains("version") &&
                        j.contains("config") && j.contains("inputs") && j.contains("timings"),
                    "expected {command, version, config, inputs, timings}");
    if (name == "segmentation.json")
        return need(j.is_object() && j.contains("n") && j.contains("changepoints") &&
                        j.contains("episodes"),
                    "expected {n, changepoints, episodes}");
    if (name == "model.json")
        return need(j.is_object() && j.contains("num_events") && j.contains("signatures") &&
                        j.contains("theta"),
                    "expected {num_events, signatures, theta}");
    if (name == "baseline.json")
        return need(j.is_object() && j.contains("algo"), "expected {algo, ...}");
    if (name == "truth.json")
        return need(j.is_object() && j.contains("changepoints") && j.contains("signatures"),
                    "expected {changepoints, signatures}");
    return true;  // other JSON: parsing is enough
}

int cmd_validate(const std::vector<std::string>& paths) {
    bool all_ok = true;
    for (const auto& path : paths) {
        std::string reason;
        bool ok = false;
        try {
            const std::string content = read_file(path);
            const std::string name = fs::path(path).filename().string();
            if (name.size() > 5 && name.substr(name.size() - 5) == ".json") {
                const json parsed = json::parse(content, nullptr, false);
                if (parsed.is_discarded())
                    reason = "not valid JSON";
                else
                    ok = json_shape_ok(name, parsed, reason);
            } else if (name.size() > 4 && name.substr(name.size() - 4) == ".csv") {
                ok = csv_well_formed(content, reason);
            } else {
                reason = "unknown artifact type (expected .json or .csv)";
            }
        } catch (const std::exception& e) {
            reason = e.what();
        }
        if (ok) {
            std::printf("ok: %s\n", path.c_str());
        } else {
            std::printf("invalid: %s: %s\n", path.c_str(), reason.c_str());
            all_ok = false;
        }
    }
    return all_ok ? 0 : 2;
}

void add_prep_flags(CLI::App* cmd, PrepOptions& prep) {
    cmd->add_option("--input", prep.input, "input log file")->required();
    cmd->add_option("--format", prep.format, "input format")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_flag("--no-templates", prep.no_templates,
                  "index verbatim text instead of mining templates");
    cmd->add_option("--template-threshold", prep.template_threshold,
                    "bigram probability below which a word is a parameter");
    cmd->add_option("--granularity", prep.granularity,
                    "timestamp rounding granularity (e.g. 250ms, 30s, 5m)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mines latent events from timestamped message logs"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    MineOptions mine;
    auto* cmd_m = app.add_subcommand("mine", "segment a log and fit event signatures");
    add_prep_flags(cmd_m, mine.prep);
    cmd_m->add_option("--alpha", mine.alpha, "minimum episode fraction");
    cmd_m->add_option("--delta", mine.delta, "change-point detection threshold");
    cmd_m->add_option("--metric", mine.metric, "detection metric")
        ->check(CLI::IsMember({"tv_plus_gap", "l1", "l2", "unbiased_l2", "js", "hellinger"}));
    cmd_m->add_option("--gap-weight", mine.gap_weight, "weight of the inter-arrival term");
    cmd_m->add_option("--eta", mine.eta, "mixture threshold for event presence");
    cmd_m->add_option("--topics", mine.topics, "event count (0 cross-validates)");
    cmd_m->add_option("--topic-candidates", mine.candidates, "candidate event counts")
        ->delimiter(',');
    cmd_m->add_option("--folds", mine.folds, "cross-validation folds");
    cmd_m->add_option("--fold-strategy", mine.fold_strategy, "fold assignment")
        ->check(CLI::IsMember({"random", "strided"}));
    cmd_m->add_option("--iterations", mine.iterations, "Gibbs sweeps");
    cmd_m->add_option("--burn-in", mine.burn_in, "sweeps discarded before averaging");
    cmd_m->add_option("--thin", mine.thin, "keep every thin-th sweep");
    cmd_m->add_option("--seed", mine.seed, "RNG seed");
    cmd_m->add_option("--out-dir", mine.out_dir, "output directory")->required();

    BaselineOptions baseline;
    auto* cmd_b = app.add_subcommand("baseline", "run a comparison algorithm");
    add_prep_flags(cmd_b, baseline.prep);
    cmd_b->add_option("--algo", baseline.algo, "baseline algorithm")
        ->required()
        ->check(CLI::IsMember({"b", "c"}));
    cmd_b->add_option("--events", baseline.events, "event count for --algo b");
    cmd_b->add_option("--iterations", baseline.iterations, "Gibbs sweeps for --algo b");
    cmd_b->add_option("--burn-in", baseline.burn_in, "sweeps discarded before averaging");
    cmd_b->add_option("--thin", baseline.thin, "keep every thin-th sweep");
    cmd_b->add_option("--slot-width", baseline.slot_width, "co-occurrence slot width");
    cmd_b->add_option("--edge-threshold", baseline.edge_threshold,
                      "keep edges with rho at or below this");
    cmd_b->add_option("--min-support", baseline.min_support, "minimum slots per id");
    cmd_b->add_option("--max-nodes", baseline.max_nodes, "clique enumeration node cap");
    cmd_b->add_option("--seed", baseline.seed, "RNG seed");
    cmd_b->add_option("--out-dir", baseline.out_dir, "output directory")->required();

    BenchOptions bench;
    auto* cmd_be = app.add_subcommand("bench", "run a synthetic experiment");
    cmd_be->add_option("--experiment", bench.experiment, "which experiment")
        ->required()
        ->check(CLI::IsMember({"metrics", "scaling", "samplecomplexity", "lda_recovery"}));
    cmd_be->add_option("--n", bench.n_values, "stream sizes")->delimiter(',');
    cmd_be->add_option("--trials", bench.trials, "trials per configuration");
    cmd_be->add_option("--seed", bench.seed, "RNG seed");
    cmd_be->add_option("--out-dir", bench.out_dir, "output directory")->required();

    SynthOptions synth;
    auto* cmd_s = app.add_subcommand("synth", "write a synthetic log to disk");
    cmd_s->add_option("--preset", synth.preset, "stream family")
        ->required()
        ->check(CLI::IsMember({"metrics", "overlap", "scaling"}));
    cmd_s->add_option("--n", synth.n, "stream length (metrics/scaling presets)");
    cmd_s->add_option("--gamma", synth.gamma, "change location (metrics preset)");
    cmd_s->add_option("--vocab", synth.vocab, "vocabulary size (scaling preset)");
    cmd_s->add_option("--changes", synth.changes, "change count (scaling preset)");
    cmd_s->add_option("--seed", synth.seed, "RNG seed");
    cmd_s->add_option("--out-dir", synth.out_dir, "output directory")->required();

    std::vector<std::string> validate_paths;
    auto* cmd_v = app.add_subcommand("validate", "check artifacts parse and have sane shapes");
    cmd_v->add_option("paths", validate_paths, "artifact files")->required();

    try {
        app.parse(argc, argv);
        if (cmd_m->parsed()) return cmd_mine(mine);
        if (cmd_b->parsed()) return cmd_baseline(baseline);
        if (cmd_be->parsed()) return cmd_bench(bench);
        if (cmd_s->parsed()) return cmd_synth(synth);
        return cmd_validate(validate_paths);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
