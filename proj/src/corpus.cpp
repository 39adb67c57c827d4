#include "logmine/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "logmine/io.hpp"

namespace logmine {

namespace {

// RFC-4180-ish: quoted fields may hold commas and doubled quotes.
// Returns false on a structurally broken line (unbalanced quote, stray text
// after a closing quote).
bool split_csv(const std::string& line, std::vector<std::string>& out) {
    out.clear();
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (i <= line.size()) {
        if (i == line.size()) {
            if (quoted) return false;
            out.push_back(field);
            break;
        }
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    i += 2;
                } else {
                    quoted = false;
                    ++i;
                    if (i < line.size() && line[i] != ',') return false;
                }
            } else {
                field += c;
                ++i;
            }
        } else if (c == '"') {
            if (!field.empty()) return false;
            quoted = true;
            ++i;
        } else if (c == ',') {
            out.push_back(field);
            field.clear();
            ++i;
        } else {
            field += c;
            ++i;
        }
    }
    return true;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

IngestResult ingest_csv(std::istream& in) {
    IngestResult res;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        strip_cr(line);
        if (!have_header) {
            // Tolerate a UTF-8 BOM on the first line.
            if (line.size() >= 3 && line[0] == '\xef' && line[1] == '\xbb' && line[2] == '\xbf')
                line.erase(0, 3);
            if (line.empty()) continue;
            if (line != "timestamp,source,text")
                throw std::runtime_error("csv header must be exactly \"timestamp,source,text\"");
            have_header = true;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> fields;
        if (!split_csv(line, fields) || fields.size() != 3) {
            ++res.skipped;
            continue;
        }
        auto ts = parse_timestamp_ms(fields[0]);
        if (!ts) {
            ++res.skipped;
            continue;
        }
        res.records.push_back({*ts, std::move(fields[1]), std::move(fields[2])});
    }
    if (!have_header) throw std::runtime_error("csv input is empty (missing header)");
    return res;
}

IngestResult ingest_jsonl(std::istream& in) {
    IngestResult res;
    std::string line;
    while (std::getline(in, line)) {
        strip_cr(line);
        if (line.empty()) continue;
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("ts") ||
            !obj.contains("src") || !obj.contains("msg") || !obj["src"].is_string() ||
            !obj["msg"].is_string()) {
            ++res.skipped;
            continue;
        }
        std::optional<std::int64_t> ts;
        const auto& jts = obj["ts"];
        if (jts.is_number_integer())
            ts = jts.get<std::int64_t>();
        else if (jts.is_number())
            ts = static_cast<std::int64_t>(std::llround(jts.get<double>()));
        else if (jts.is_string())
            ts = parse_timestamp_ms(jts.get<std::string>());
        if (!ts) {
            ++res.skipped;
            continue;
        }
        res.records.push_back({*ts, obj["src"].get<std::string>(), obj["msg"].get<std::string>()});
    }
    return res;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) out.push_back(text.substr(start, i - start));
    }
    return out;
}

MessageStream sorted_by_time(MessageStream stream) {
    std::stable_sort(stream.begin(), stream.end(),
                     [](const TimedMessage& a, const TimedMessage& b) { return a.time < b.time; });
    return stream;
}

}  // namespace

IngestResult ingest(std::istream& in, InputFormat format) {
    return format == InputFormat::csv ? ingest_csv(in) : ingest_jsonl(in);
}

IngestResult ingest_file(const std::string& path, InputFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    return ingest(in, format);
}

bool time_ordered(std::span<const TimedMessage> stream) {
    for (std::size_t i = 1; i < stream.size(); ++i)
        if (stream[i].time < stream[i - 1].time) return false;
    return true;
}

std::size_t vocab_upper_bound(std::span<const TimedMessage> stream) {
    std::uint32_t top = 0;
    bool any = false;
    for (const auto& m : stream) {
        top = std::max(top, m.id);
        any = true;
    }
    return any ? static_cast<std::size_t>(top) + 1 : 0;
}

std::string Vocabulary::key(const std::string& tmpl, const std::string& source) {
    std::string k;
    k.reserve(tmpl.size() + source.size() + 1);
    k += tmpl;
    k += '\x1f';  // unit separator; never produced by whitespace tokenization
    k += source;
    return k;
}

std::uint32_t Vocabulary::intern(const std::string& tmpl, const std::string& source) {
    auto [it, inserted] = index_.try_emplace(key(tmpl, source),
                                             static_cast<std::uint32_t>(entries_.size()));
    if (inserted) entries_.emplace_back(tmpl, source);
    return it->second;
}

std::optional<std::uint32_t> Vocabulary::find(const std::string& tmpl,
                                              const std::string& source) const {
    auto it = index_.find(key(tmpl, source));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const std::pair<std::string, std::string>& Vocabulary::entry(std::uint32_t id) const {
    return entries_.at(id);
}

Corpus extract_templates(const std::vector<RawRecord>& records, double prob_threshold) {
    if (records.empty()) throw std::invalid_argument("template extraction needs records");
    if (!(prob_threshold > 0.0 && prob_threshold < 1.0))
        throw std::invalid_argument("template probability threshold must lie in (0, 1)");

    // Intern words; ids 0/1 are start/end sentinels so boundary words still
    // have two incident bigrams.
    std::unordered_map<std::string, std::uint32_t> word_ids;
    auto word_id = [&](const std::string& w) {
        auto [it, inserted] =
            word_ids.try_emplace(w, static_cast<std::uint32_t>(word_ids.size() + 2));
        (void)inserted;
        return it->second;
    };

    std::vector<std::vector<std::uint32_t>> token_rows;
    token_rows.reserve(records.size());
    std::unordered_map<std::uint64_t, std::int64_t> bigram;
    std::int64_t total_bigrams = 0;
    for (const auto& rec : records) {
        std::vector<std::uint32_t> row;
        for (const auto& w : tokenize(rec.text)) row.push_back(word_id(w));
        std::uint32_t prev = 0;  // start sentinel
        for (std::uint32_t cur : row) {
            ++bigram[(static_cast<std::uint64_t>(prev) << 32) | cur];
            ++total_bigrams;
            prev = cur;
        }
        ++bigram[(static_cast<std::uint64_t>(prev) << 32) | 1u];  // end sentinel
        ++total_bigrams;
        token_rows.push_back(std::move(row));
    }

    // A word survives masking when its most probable incident bigram clears
    // the threshold. Probabilities are relative to all bigrams in the corpus,
    // sentinel pairs included.
    std::vector<std::int64_t> best(word_ids.size() + 2, 0);
    for (const auto& [key, count] : bigram) {
        const std::uint32_t a = static_cast<std::uint32_t>(key >> 32);
        const std::uint32_t b = static_cast<std::uint32_t>(key & 0xffffffffu);
        best[a] = std::max(best[a], count);
        best[b] = std::max(best[b], count);
    }
    std::vector<bool> is_template(word_ids.size() + 2, false);
    for (std::size_t w = 0; w < best.size(); ++w)
        is_template[w] =
            static_cast<double>(best[w]) >= prob_threshold * static_cast<double>(total_bigrams);

    Corpus corpus;
    std::vector<std::string> word_of(word_ids.size() + 2);
    for (const auto& [w, id] : word_ids) word_of[id] = w;
    corpus.stream.reserve(records.size());
    for (std::size_t r = 0; r < records.size(); ++r) {
        std::string tmpl;
        for (std::size_t j = 0; j < token_rows[r].size(); ++j) {
            if (j) tmpl += ' ';
            const std::uint32_t w = token_rows[r][j];
            tmpl += is_template[w] ? word_of[w] : "*";
        }
        const std::uint32_t id = corpus.vocab.intern(tmpl, records[r].source);
        corpus.stream.push_back({id, static_cast<double>(records[r].timestamp_ms)});
    }
    corpus.stream = sorted_by_time(std::move(corpus.stream));
    return corpus;
}

Corpus index_verbatim(const std::vector<RawRecord>& records) {
    if (records.empty()) throw std::invalid_argument("indexing needs records");
    Corpus corpus;
    corpus.stream.reserve(records.size());
    for (const auto& rec : records) {
        const std::uint32_t id = corpus.vocab.intern(rec.text, rec.source);
        corpus.stream.push_back({id, static_cast<double>(rec.timestamp_ms)});
    }
    corpus.stream = sorted_by_time(std::move(corpus.stream));
    return corpus;
}

MessageStream round_times(const MessageStream& stream, double granularity) {
    if (!(granularity > 0.0) || !std::isfinite(granularity))
        throw std::invalid_argument("granularity must be positive and finite");
    MessageStream out = stream;
    for (auto& m : out) {
        double k = std::floor(m.time / granularity);
        // Guard against the quotient rounding across an exact multiple, which
        // would otherwise break idempotence or round upward.
        if ((k + 1.0) * granularity <= m.time)
            k += 1.0;
        else if (k * granularity > m.time)
            k -= 1.0;
        m.time = k * granularity;
    }
    return out;
}

}  // namespace logmine
