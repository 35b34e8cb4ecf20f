#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "readapt/json_util.hpp"

namespace readapt {

/// Bounds and thresholds of the mastery scale. The defaults encode the
/// production tuning: a 0..10 scale, new features starting at 5, dependents
/// unlocking at 75% of maximum, and drops capped at 1 per session.
struct MasteryScale {
    double min = 0.0;
    double max = 10.0;
    double init_open = 5.0;
    double pass_threshold = 7.5;
    double snap_threshold = 9.5;
    double max_drop_per_session = 1.0;
};

/// Exponential moving average parameters. `window` absent means recursive
/// mode: only the previous mastery value carries history. A finite window
/// recomputes the average over the last `window` session scores instead.
struct EmaConfig {
    double alpha = 0.6;
    std::optional<int> window; // nullopt = recursive
};

/// Every tunable of the session planner and the re-evaluator.
struct AdaptationConfig {
    EmaConfig ema;
    MasteryScale scale;
    int reopen_gap_sessions = 10;
    int recent_window_sessions = 3;
    double fail_score_threshold = 5.0;
    double stagnation_delta = 1.0;
    int content_batch_size = 7;
    std::uint64_t selection_seed = 0;
};

inline void validate(const MasteryScale& s) {
    if (!(s.min < s.max))
        fail(ErrorCode::invalid_config, "scale: min must be below max");
    if (!(s.min <= s.init_open && s.init_open <= s.pass_threshold &&
          s.pass_threshold <= s.snap_threshold && s.snap_threshold <= s.max))
        fail(ErrorCode::invalid_config,
             "scale: expected min <= init_open <= pass_threshold <= snap_threshold <= max");
    if (!(s.max_drop_per_session > 0))
        fail(ErrorCode::invalid_config, "scale: max_drop_per_session must be positive");
}

inline void validate(const EmaConfig& e) {
    if (!(e.alpha > 0.0 && e.alpha <= 1.0))
        fail(ErrorCode::invalid_config, "ema: alpha must be in (0, 1]");
    if (e.window && *e.window < 1)
        fail(ErrorCode::invalid_config, "ema: window must be >= 1 when finite");
}

inline void validate(const AdaptationConfig& c) {
    validate(c.scale);
    validate(c.ema);
    if (c.reopen_gap_sessions < 1)
        fail(ErrorCode::invalid_config, "reopen_gap_sessions must be >= 1");
    if (c.recent_window_sessions < 1)
        fail(ErrorCode::invalid_config, "recent_window_sessions must be >= 1");
    if (c.content_batch_size < 1)
        fail(ErrorCode::invalid_config, "content_batch_size must be >= 1");
    if (c.fail_score_threshold < c.scale.min || c.fail_score_threshold > c.scale.max)
        fail(ErrorCode::invalid_config, "fail_score_threshold must lie within the mastery scale");
    if (c.stagnation_delta <= 0)
        fail(ErrorCode::invalid_config, "stagnation_delta must be positive");
}

inline MasteryScale mastery_scale_from_json(const jsonx::json& obj) {
    using namespace jsonx;
    as_object(obj, "scale");
    check_keys(obj,
               {"min", "max", "init_open", "pass_threshold", "snap_threshold",
                "max_drop_per_session"},
               "scale");
    MasteryScale s;
    s.min = opt_double(obj, "min", s.min, "scale");
    s.max = opt_double(obj, "max", s.max, "scale");
    s.init_open = opt_double(obj, "init_open", s.init_open, "scale");
    s.pass_threshold = opt_double(obj, "pass_threshold", s.pass_threshold, "scale");
    s.snap_threshold = opt_double(obj, "snap_threshold", s.snap_threshold, "scale");
    s.max_drop_per_session =
        opt_double(obj, "max_drop_per_session", s.max_drop_per_session, "scale");
    return s;
}

inline EmaConfig ema_config_from_json(const jsonx::json& obj) {
    using namespace jsonx;
    as_object(obj, "ema");
    check_keys(obj, {"alpha", "window"}, "ema");
    EmaConfig e;
    e.alpha = opt_double(obj, "alpha", e.alpha, "ema");
    if (const json* w = find(obj, "window")) {
        if (w->is_string()) {
            if (w->get<std::string>() != "recursive")
                fail(ErrorCode::invalid_config, "ema: window must be an integer or \"recursive\"");
            e.window.reset();
        } else if (w->is_number_integer() || w->is_number_unsigned()) {
            e.window = static_cast<int>(w->get<std::int64_t>());
        } else {
            fail(ErrorCode::invalid_config, "ema: window must be an integer or \"recursive\"");
        }
    }
    return e;
}

/// Parse an adaptation-config document. Absent fields keep their defaults;
/// unknown fields are rejected.
inline AdaptationConfig adaptation_config_from_json(const jsonx::json& obj) {
    using namespace jsonx;
    as_object(obj, "config");
    check_keys(obj,
               {"ema", "scale", "reopen_gap_sessions", "recent_window_sessions",
                "fail_score_threshold", "stagnation_delta", "content_batch_size",
                "selection_seed"},
               "config");
    AdaptationConfig c;
    if (const json* e = find(obj, "ema"))
        c.ema = ema_config_from_json(*e);
    if (const json* s = find(obj, "scale"))
        c.scale = mastery_scale_from_json(*s);
    c.reopen_gap_sessions =
        static_cast<int>(opt_int(obj, "reopen_gap_sessions", c.reopen_gap_sessions, "config"));
    c.recent_window_sessions = static_cast<int>(
        opt_int(obj, "recent_window_sessions", c.recent_window_sessions, "config"));
    c.fail_score_threshold =
        opt_double(obj, "fail_score_threshold", c.fail_score_threshold, "config");
    c.stagnation_delta = opt_double(obj, "stagnation_delta", c.stagnation_delta, "config");
    c.content_batch_size =
        static_cast<int>(opt_int(obj, "content_batch_size", c.content_batch_size, "config"));
    if (const json* seed = find(obj, "selection_seed")) {
        if (!seed->is_number_integer() && !seed->is_number_unsigned())
            fail(ErrorCode::invalid_config, "config: selection_seed must be an integer");
        c.selection_seed = seed->is_number_unsigned() ? seed->get<std::uint64_t>()
                                                      : static_cast<std::uint64_t>(
                                                            seed->get<std::int64_t>());
    }
    validate(c);
    return c;
}

inline AdaptationConfig adaptation_config_from_bytes(std::string_view bytes) {
    return adaptation_config_from_json(jsonx::parse_bytes(bytes, "config"));
}

inline jsonx::json to_json(const MasteryScale& s) {
    return {{"min", s.min},
            {"max", s.max},
            {"init_open", s.init_open},
            {"pass_threshold", s.pass_threshold},
            {"snap_threshold", s.snap_threshold},
            {"max_drop_per_session", s.max_drop_per_session}};
}

inline jsonx::json to_json(const EmaConfig& e) {
    jsonx::json obj{{"alpha", e.alpha}};
    if (e.window)
        obj["window"] = *e.window;
    else
        obj["window"] = "recursive";
    return obj;
}

inline jsonx::json to_json(const AdaptationConfig& c) {
    return {{"ema", to_json(c.ema)},
            {"scale", to_json(c.scale)},
            {"reopen_gap_sessions", c.reopen_gap_sessions},
            {"recent_window_sessions", c.recent_window_sessions},
            {"fail_score_threshold", c.fail_score_threshold},
            {"stagnation_delta", c.stagnation_delta},
            {"content_batch_size", c.content_batch_size},
            {"selection_seed", c.selection_seed}};
}

} // namespace readapt
