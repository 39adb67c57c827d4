#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace logmine {

// One log record as read from disk, before any preprocessing.
struct RawRecord {
    std::int64_t timestamp_ms = 0;  // epoch milliseconds, UTC
    std::string source;
    std::string text;
};

enum class InputFormat { csv, jsonl };

struct IngestResult {
    std::vector<RawRecord> records;  // input order
    std::size_t skipped = 0;         // malformed rows/lines dropped
};

// CSV expects the header "timestamp,source,text"; timestamps are RFC 3339 or
// integer epoch milliseconds. JSONL expects objects with keys ts/src/msg.
// Malformed rows are skipped and counted, never fatal.
IngestResult ingest(std::istream& in, InputFormat format);
IngestResult ingest_file(const std::string& path, InputFormat format);

// A message after template extraction: a small integer id plus a timestamp.
// Streams are kept sorted by time; duplicates (same time) are allowed and
// their relative input order is preserved.
struct TimedMessage {
    std::uint32_t id = 0;
    double time = 0.0;
};

using MessageStream = std::vector<TimedMessage>;

bool time_ordered(std::span<const TimedMessage> stream);

// Smallest array size that can index every id in the stream (max id + 1).
std::size_t vocab_upper_bound(std::span<const TimedMessage> stream);

// Distinct (template, source) pairs, numbered in order of first appearance.
class Vocabulary {
public:
    std::uint32_t intern(const std::string& tmpl, const std::string& source);
    std::optional<std::uint32_t> find(const std::string& tmpl, const std::string& source) const;
    // entry(id) -> {template, source}
    const std::pair<std::string, std::string>& entry(std::uint32_t id) const;
    std::size_t size() const { return entries_.size(); }

private:
    static std::string key(const std::string& tmpl, const std::string& source);
    std::vector<std::pair<std::string, std::string>> entries_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

struct Corpus {
    Vocabulary vocab;
    MessageStream stream;  // time-ordered
};

// Mines message templates from free-form text: every word whose most likely
// incident bigram falls below prob_threshold is treated as a variable
// parameter and masked with "*". Messages then map to ids keyed by
// (masked template, source). Deterministic for a fixed record list.
Corpus extract_templates(const std::vector<RawRecord>& records, double prob_threshold = 1e-4);

// For inputs that already carry stable identifiers (e.g. alarm names):
// no masking, ids keyed by the verbatim (text, source) pair.
Corpus index_verbatim(const std::vector<RawRecord>& records);

// Floors every timestamp to the nearest lower multiple of granularity
// (same units as the stream). Order-preserving and idempotent.
MessageStream round_times(const MessageStream& stream, double granularity);

}  // namespace logmine
