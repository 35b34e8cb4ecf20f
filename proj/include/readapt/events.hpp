#pragma once

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <unistd.h>

#include "readapt/config.hpp"
#include "readapt/feature_graph.hpp"
#include "readapt/planner.hpp"
#include "readapt/student_profile.hpp"

namespace readapt {

enum class EventKind {
    profile_created,
    session_planned,
    result_submitted,
    feature_opened,
    feature_reopened,
    rollback_applied,
};

constexpr std::string_view to_string(EventKind k) noexcept {
    switch (k) {
    case EventKind::profile_created: return "profile_created";
    case EventKind::session_planned: return "session_planned";
    case EventKind::result_submitted: return "result_submitted";
    case EventKind::feature_opened: return "feature_opened";
    case EventKind::feature_reopened: return "feature_reopened";
    case EventKind::rollback_applied: return "rollback_applied";
    }
    return "unknown";
}

inline EventKind event_kind_from_string(std::string_view s) {
    if (s == "profile_created") return EventKind::profile_created;
    if (s == "session_planned") return EventKind::session_planned;
    if (s == "result_submitted") return EventKind::result_submitted;
    if (s == "feature_opened") return EventKind::feature_opened;
    if (s == "feature_reopened") return EventKind::feature_reopened;
    if (s == "rollback_applied") return EventKind::rollback_applied;
    fail(ErrorCode::corrupt_log, "unknown event kind \"" + std::string(s) + "\"");
}

inline std::string format_timestamp(std::int64_t unix_millis) {
    std::time_t secs = static_cast<std::time_t>(unix_millis / 1000);
    int millis = static_cast<int>(unix_millis % 1000);
    if (millis < 0) {
        millis += 1000;
        secs -= 1;
    }
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[80];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, millis);
    return buf;
}

inline std::int64_t parse_timestamp(const std::string& iso) {
    std::tm tm{};
    int millis = 0;
    if (std::sscanf(iso.c_str(), "%d-%d-%dT%d:%d:%d.%dZ", &tm.tm_year, &tm.tm_mon, &tm.tm_mday,
                    &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &millis) != 7)
        fail(ErrorCode::corrupt_log, "bad timestamp \"" + iso + "\"");
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    return static_cast<std::int64_t>(timegm(&tm)) * 1000 + millis;
}

/// One append-only log record. Sequence numbers are dense per student;
/// payload shape depends on the kind.
struct EventRecord {
    std::int64_t sequence_no = 0;
    std::int64_t timestamp_ms = 0;
    EventKind kind = EventKind::profile_created;
    jsonx::json payload;
};

inline jsonx::json to_json(const EventRecord& e) {
    return {{"sequence_no", e.sequence_no},
            {"timestamp", format_timestamp(e.timestamp_ms)},
            {"kind", std::string(to_string(e.kind))},
            {"payload", e.payload}};
}

inline EventRecord event_from_json(const jsonx::json& obj) {
    using namespace jsonx;
    as_object(obj, "event record");
    check_keys(obj, {"sequence_no", "timestamp", "kind", "payload"}, "event record");
    EventRecord e;
    e.sequence_no = req_int(obj, "sequence_no", "event record");
    e.timestamp_ms = parse_timestamp(req_string(obj, "timestamp", "event record"));
    e.kind = event_kind_from_string(req_string(obj, "kind", "event record"));
    e.payload = require(obj, "payload", "event record");
    return e;
}

/// Append-only JSON Lines writer; one file per student. Appends are a single
/// write so a batch of records lands atomically or not at all.
class EventLogWriter {
public:
    EventLogWriter(std::filesystem::path path, bool fsync_on_append)
        : path_(std::move(path)), fsync_(fsync_on_append) {
        file_ = std::fopen(path_.c_str(), "ab");
        if (file_ == nullptr)
            fail(ErrorCode::io_error, "cannot open event log " + path_.string());
    }

    ~EventLogWriter() {
        if (file_ != nullptr)
            std::fclose(file_);
    }

    EventLogWriter(const EventLogWriter&) = delete;
    EventLogWriter& operator=(const EventLogWriter&) = delete;

    void append(std::span<const EventRecord> records) {
        std::string buf;
        for (const EventRecord& r : records) {
            buf += to_json(r).dump();
            buf += '\n';
        }
        if (std::fwrite(buf.data(), 1, buf.size(), file_) != buf.size())
            fail(ErrorCode::io_error, "short write on event log " + path_.string());
        if (std::fflush(file_) != 0)
            fail(ErrorCode::io_error, "flush failed on event log " + path_.string());
        if (fsync_)
            ::fsync(fileno(file_));
    }

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    bool fsync_;
    std::FILE* file_ = nullptr;
};

/// Read a JSON Lines event log; CorruptLog names the first bad line.
inline std::vector<EventRecord> read_event_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::io_error, "cannot read event log " + path.string());
    std::vector<EventRecord> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        jsonx::json obj = jsonx::json::parse(line, nullptr, false);
        if (obj.is_discarded())
            fail(ErrorCode::corrupt_log, path.string() + ": line " + std::to_string(line_no) +
                                             " is not valid JSON");
        try {
            out.push_back(event_from_json(obj));
        } catch (const DomainError& e) {
            fail(ErrorCode::corrupt_log, path.string() + ": line " + std::to_string(line_no) +
                                             ": " + e.what());
        }
    }
    return out;
}

/// Pure reducer: fold a student's event stream back into a profile. Only
/// profile_created and result_submitted change state; planning and the
/// derived notification events are informational. Replaying a log through
/// this function reproduces the live profile exactly.
inline StudentProfile replay_events(
    std::span<const EventRecord> events,
    const std::function<const FeatureGraph&(const std::string&)>& graph_for,
    const AdaptationConfig& cfg) {
    StudentProfile profile;
    bool created = false;
    for (const EventRecord& e : events) {
        switch (e.kind) {
        case EventKind::profile_created: {
            using namespace jsonx;
            std::string graph_id = req_id(e.payload, "graph_id", "profile_created");
            int age = static_cast<int>(req_int(e.payload, "age_level", "profile_created"));
            std::string student_id = req_id(e.payload, "student_id", "profile_created");
            profile = instantiate_profile(graph_for(graph_id), student_id, age, cfg.scale);
            created = true;
            break;
        }
        case EventKind::result_submitted: {
            if (!created)
                fail(ErrorCode::corrupt_log, "result_submitted before profile_created");
            SessionResult r = session_result_from_json(
                jsonx::require(e.payload, "result", "result_submitted"));
            submit_result(profile, graph_for(profile.graph_id), r, cfg);
            break;
        }
        default:
            break;
        }
    }
    if (!created)
        fail(ErrorCode::corrupt_log, "event stream has no profile_created record");
    return profile;
}

} // namespace readapt
