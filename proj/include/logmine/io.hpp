#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include "logmine/changepoint.hpp"
#include "logmine/corpus.hpp"
#include "logmine/events.hpp"
#include "logmine/lda.hpp"

namespace logmine {

// Epoch milliseconds -> "YYYY-MM-DDThh:mm:ss.mmmZ".
std::string format_iso8601_ms(std::int64_t ms);

// RFC 3339 ("2017-02-14T06:15:00Z", fractional seconds and numeric offsets
// accepted) or a plain integer taken as epoch milliseconds.
std::optional<std::int64_t> parse_timestamp_ms(const std::string& text);

// "250ms", "30s", "5m", "1h", or a bare number of milliseconds.
std::optional<double> parse_duration_ms(const std::string& text);

// Maps a stream time to its JSON representation (e.g. an ISO string for real
// logs, a raw number for synthetic data).
using TimeRepr = std::function<nlohmann::json(double)>;

nlohmann::json vocabulary_to_json(const Vocabulary& vocab);
nlohmann::json segmentation_to_json(const Segmentation& seg, const MessageStream& stream,
                                    const TimeRepr& time_repr);
nlohmann::json model_to_json(const TopicModel& model);
// config carries whatever run settings the caller wants echoed; the report's
// eta threshold is always merged in.
nlohmann::json report_to_json(const EventReport& report, const TimeRepr& time_repr,
                              nlohmann::json config = nlohmann::json::object());

}  // namespace logmine
