#include "logmine/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace logmine {

namespace {

// Days since 1970-01-01 from a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

bool all_digits(const std::string& s, std::size_t from, std::size_t to) {
    if (from >= to || to > s.size()) return false;
    for (std::size_t i = from; i < to; ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

int two_digits(const std::string& s, std::size_t at) {
    return (s[at] - '0') * 10 + (s[at + 1] - '0');
}

}  // namespace

std::string format_iso8601_ms(std::int64_t ms) {
    std::int64_t days = ms / 86400000;
    std::int64_t rem = ms % 86400000;
    if (rem < 0) {
        rem += 86400000;
        --days;
    }
    std::int64_t y;
    unsigned mo, d;
    civil_from_days(days, y, mo, d);
    const int h = static_cast<int>(rem / 3600000);
    const int mi = static_cast<int>(rem / 60000 % 60);
    const int s = static_cast<int>(rem / 1000 % 60);
    const int msec = static_cast<int>(rem % 1000);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02d.%03dZ",
                  static_cast<long long>(y), mo, d, h, mi, s, msec);
    return buf;
}

std::optional<std::int64_t> parse_timestamp_ms(const std::string& raw) {
    std::size_t b = 0, e = raw.size();
    while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
    if (b >= e) return std::nullopt;
    const std::string s = raw.substr(b, e - b);

    // Bare integer: epoch milliseconds.
    {
        std::size_t start = (s[0] == '+' || s[0] == '-') ? 1 : 0;
        if (all_digits(s, start, s.size())) {
            errno = 0;
            char* end = nullptr;
            long long v = std::strtoll(s.c_str(), &end, 10);
            if (errno == 0 && end && *end == '\0') return v;
            return std::nullopt;
        }
    }

    // RFC 3339: YYYY-MM-DD[T ]hh:mm:ss[.frac][Z|+hh:mm|-hh:mm|+hhmm|-hhmm]
    if (s.size() < 19) return std::nullopt;
    if (!all_digits(s, 0, 4) || s[4] != '-' || !all_digits(s, 5, 7) || s[7] != '-' ||
        !all_digits(s, 8, 10))
        return std::nullopt;
    if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return std::nullopt;
    if (!all_digits(s, 11, 13) || s[13] != ':' || !all_digits(s, 14, 16) || s[16] != ':' ||
        !all_digits(s, 17, 19))
        return std::nullopt;

    const int year = (s[0] - '0') * 1000 + (s[1] - '0') * 100 + two_digits(s, 2);
    const int month = two_digits(s, 5);
    const int day = two_digits(s, 8);
    const int hour = two_digits(s, 11);
    const int minute = two_digits(s, 14);
    const int second = two_digits(s, 17);
    if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
    if (hour > 23 || minute > 59 || second > 60) return std::nullopt;

    std::size_t pos = 19;
    int msec = 0;
    if (pos < s.size() && s[pos] == '.') {
        std::size_t fs = ++pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == fs) return std::nullopt;
        // Keep millisecond precision; extra digits truncate.
        int scale = 100;
        for (std::size_t i = fs; i < pos && i < fs + 3; ++i) {
            msec += (s[i] - '0') * scale;
            scale /= 10;
        }
    }

    std::int64_t offset_ms = 0;
    if (pos < s.size()) {
        char c = s[pos];
        if (c == 'Z' || c == 'z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            std::size_t o = pos + 1;
            int oh, om;
            if (o + 5 <= s.size() && all_digits(s, o, o + 2) && s[o + 2] == ':' &&
                all_digits(s, o + 3, o + 5)) {
                oh = two_digits(s, o);
                om = two_digits(s, o + 3);
                pos = o + 5;
            } else if (o + 4 <= s.size() && all_digits(s, o, o + 4)) {
                oh = two_digits(s, o);
                om = two_digits(s, o + 2);
                pos = o + 4;
            } else {
                return std::nullopt;
            }
            if (oh > 23 || om > 59) return std::nullopt;
            offset_ms = (static_cast<std::int64_t>(oh) * 60 + om) * 60000;
            if (c == '-') offset_ms = -offset_ms;
        } else {
            return std::nullopt;
        }
    }
    if (pos != s.size()) return std::nullopt;

    const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                              static_cast<unsigned>(day));
    std::int64_t ms = days * 86400000;
    ms += (static_cast<std::int64_t>(hour) * 3600 + minute * 60 + second) * 1000 + msec;
    return ms - offset_ms;  // offset shifts local time back to UTC
}

std::optional<double> parse_duration_ms(const std::string& raw) {
    std::size_t b = 0, e = raw.size();
    while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
    if (b >= e) return std::nullopt;
    const std::string s = raw.substr(b, e - b);

    char* end = nullptr;
    errno = 0;
    double v = std::strtod(s.c_str(), &end);
    if (errno != 0 || end == s.c_str() || !std::isfinite(v)) return std::nullopt;
    std::string unit(end);
    double scale;
    if (unit.empty() || unit == "ms")
        scale = 1.0;
    else if (unit == "s")
        scale = 1000.0;
    else if (unit == "m")
        scale = 60000.0;
    else if (unit == "h")
        scale = 3600000.0;
    else
        return std::nullopt;
    double out = v * scale;
    if (!(out > 0)) return std::nullopt;
    return out;
}

nlohmann::json vocabulary_to_json(const Vocabulary& vocab) {
    nlohmann::json out = nlohmann::json::object();
    for (std::size_t id = 0; id < vocab.size(); ++id) {
        const auto& [tmpl, source] = vocab.entry(static_cast<std::uint32_t>(id));
        out[std::to_string(id)] = {{"template", tmpl}, {"source", source}};
    }
    return out;
}

nlohmann::json segmentation_to_json(const Segmentation& seg, const MessageStream& stream,
                                    const TimeRepr& time_repr) {
    nlohmann::json eps = nlohmann::json::array();
    for (const auto& [lo, hi] : seg.episodes()) {
        eps.push_back({{"first", lo},
                       {"last", hi - 1},
                       {"start", time_repr(stream[lo].time)},
                       {"finish", time_repr(stream[hi - 1].time)}});
    }
    return {{"n", seg.n}, {"changepoints", seg.changepoints}, {"episodes", eps}};
}

nlohmann::json model_to_json(const TopicModel& model) {
    nlohmann::json sigs = nlohmann::json::array();
    for (const auto& row : model.signatures) {
        std::vector<std::pair<std::uint32_t, double>> sparse;
        for (std::size_t id = 0; id < row.size(); ++id)
            if (row[id] > 1e-12) sparse.push_back({static_cast<std::uint32_t>(id), row[id]});
        std::stable_sort(sparse.begin(), sparse.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        nlohmann::json sig = nlohmann::json::array();
        for (const auto& [id, p] : sparse) sig.push_back({id, p});
        sigs.push_back(std::move(sig));
    }
    nlohmann::json theta = nlohmann::json::array();
    for (const auto& row : model.theta) theta.push_back(row);
    return {{"num_events", model.num_topics},
            {"vocab_size", model.vocab_size},
            {"doc_concentration", model.doc_concentration},
            {"word_concentration", model.word_concentration},
            {"seed", model.seed},
            {"signatures", sigs},
            {"theta", theta}};
}

nlohmann::json report_to_json(const EventReport& report, const TimeRepr& time_repr,
                              nlohmann::json config) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& ev : report.events) {
        nlohmann::json sig = nlohmann::json::array();
        for (const auto& [id, p] : ev.signature) sig.push_back({id, p});
        nlohmann::json occ = nlohmann::json::array();
        for (const auto& o : ev.occurrences)
            occ.push_back({time_repr(o.start), time_repr(o.finish)});
        events.push_back({{"id", ev.id},
                          {"signature", sig},
                          {"occurrences", occ},
                          {"active", ev.active}});
    }
    config["eta"] = report.eta;
    return {{"events", events},
            {"changepoints", report.changepoints},
            {"config", std::move(config)}};
}

}  // namespace logmine
