#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "readapt/config.hpp"
#include "readapt/feature_graph.hpp"
#include "readapt/hash.hpp"
#include "readapt/lexicon.hpp"
#include "readapt/mastery.hpp"
#include "readapt/student_profile.hpp"

namespace readapt {

enum class GameType { accuracy, automaticity };

constexpr std::string_view to_string(GameType g) noexcept {
    return g == GameType::accuracy ? "accuracy" : "automaticity";
}

inline GameType game_type_from_string(std::string_view s) {
    if (s == "accuracy") return GameType::accuracy;
    if (s == "automaticity") return GameType::automaticity;
    fail(ErrorCode::malformed_document, "unknown game type \"" + std::string(s) + "\"");
}

/// Stable identifiers for the planner rules, recorded in every plan so the
/// event log can be analyzed rule by rule.
namespace rules {
inline constexpr const char* reopen = "R3:reopen";
inline constexpr const char* recent_failure_demotion = "R1:recent-failure-demotion";
inline constexpr const char* ease_order = "R2:ease-order";
inline constexpr const char* accuracy_first = "G1:accuracy-first";
inline constexpr const char* automaticity_progression = "G2:automaticity-progression";
inline constexpr const char* content_filter = "C1:feature-content-filter";
inline constexpr const char* content_fallback = "C2:content-fallback";
} // namespace rules

struct Candidate {
    std::string feature_id;
    std::vector<std::string> rule_trace;
};

/// What the planner hands a game client for one session.
struct SessionPlan {
    std::string student_id;
    int session_ordinal = 0; // the session this plan is for (counter + 1)
    std::string feature_id;
    GameType game_type = GameType::accuracy;
    std::vector<LexiconEntry> content;
    std::vector<std::string> rule_trace;
};

/// What a game client reports back after playing.
struct SessionResult {
    std::string feature_id;
    std::vector<bool> items; // per-item correctness, in play order
};

/// Every effect of one submitted result, for the client and the event log.
struct SessionOutcome {
    std::string feature_id;
    int session_ordinal = 0;
    GameType game_type = GameType::accuracy;
    SessionScore score;
    double new_mastery = 0.0;
    FeatureStatus status_after = FeatureStatus::open;
    std::vector<std::string> newly_opened;
    std::vector<std::string> rollback_applied;
};

namespace detail {

inline int staleness(const StudentProfile& profile, const FeatureState& st) {
    // Never-played features count as last used at session 0, so knowledge
    // assumed from the student's age also comes up for reinforcement.
    return profile.session_counter - st.last_used_session.value_or(0);
}

inline bool reopen_eligible(const StudentProfile& profile, const FeatureState& st,
                            const AdaptationConfig& cfg) {
    return st.status == FeatureStatus::mastered &&
           staleness(profile, st) >= cfg.reopen_gap_sessions;
}

inline bool recently_failed(const StudentProfile& profile, const FeatureState& st,
                            const AdaptationConfig& cfg) {
    if (!st.last_used_session || !st.last_score)
        return false;
    return profile.session_counter - *st.last_used_session <= cfg.recent_window_sessions &&
           *st.last_score < cfg.fail_score_threshold;
}

} // namespace detail

/// The priority pipeline over playable features:
///   R3 first resurfaces mastered features that have sat unused for the
///   reopen gap (stalest first), then open features are ordered by the
///   teaching sequence (R2: difficulty_rank, use_count, id), with features
///   that failed recently moved to the tail (R1).
inline std::vector<Candidate> candidate_features(const StudentProfile& profile,
                                                 const FeatureGraph& graph,
                                                 const AdaptationConfig& cfg) {
    std::vector<std::string> reopen;
    std::vector<std::string> fresh;
    std::vector<std::string> demoted;
    for (const auto& [id, st] : profile.states) {
        if (detail::reopen_eligible(profile, st, cfg))
            reopen.push_back(id);
        else if (st.status == FeatureStatus::open)
            (detail::recently_failed(profile, st, cfg) ? demoted : fresh).push_back(id);
    }

    std::sort(reopen.begin(), reopen.end(), [&](const std::string& a, const std::string& b) {
        int sa = detail::staleness(profile, profile.states.at(a));
        int sb = detail::staleness(profile, profile.states.at(b));
        if (sa != sb)
            return sa > sb;
        return a < b;
    });
    auto ease = [&](const std::string& a, const std::string& b) {
        const Feature& fa = graph.feature(a);
        const Feature& fb = graph.feature(b);
        if (fa.difficulty_rank != fb.difficulty_rank)
            return fa.difficulty_rank < fb.difficulty_rank;
        int ua = profile.states.at(a).use_count;
        int ub = profile.states.at(b).use_count;
        if (ua != ub)
            return ua < ub;
        return a < b;
    };
    std::sort(fresh.begin(), fresh.end(), ease);
    std::sort(demoted.begin(), demoted.end(), ease);

    std::vector<Candidate> out;
    out.reserve(reopen.size() + fresh.size() + demoted.size());
    for (std::string& id : reopen)
        out.push_back({std::move(id), {rules::reopen}});
    for (std::string& id : fresh)
        out.push_back({std::move(id), {rules::ease_order}});
    for (std::string& id : demoted)
        out.push_back({std::move(id), {rules::recent_failure_demotion, rules::ease_order}});

    if (out.empty())
        fail(ErrorCode::no_playable_feature,
             "student " + profile.student_id + " has nothing open and nothing reopenable");
    return out;
}

/// First exposure to a feature practises accuracy; every later session
/// stimulates automaticity.
inline GameType select_game_type(const FeatureState& state) {
    return state.use_count == 0 ? GameType::accuracy : GameType::automaticity;
}

/// Deterministic seeded pick of up to `n` entries exercising the feature:
/// the sorted match list is Fisher-Yates shuffled with the seed, then cut.
inline std::vector<LexiconEntry> select_content(const Lexicon& lexicon,
                                                const std::string& feature_id, int n,
                                                std::uint64_t seed) {
    if (n < 1)
        fail(ErrorCode::invalid_config, "content selection needs n >= 1");
    std::vector<std::string> ids = lexicon.entries_for_feature(feature_id);
    if (ids.empty())
        fail(ErrorCode::no_content_for_feature,
             "no lexicon entries exercise feature \"" + feature_id + "\"");

    // xorshift64* over the seed; pinned here so selections never depend on
    // library-specific distribution code.
    std::uint64_t state = seed != 0 ? seed : 0x9e3779b97f4a7c15ULL;
    auto next = [&state]() {
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        return state * 0x2545f4914f6cdd1dULL;
    };
    for (std::size_t i = ids.size() - 1; i > 0; --i)
        std::swap(ids[i], ids[next() % (i + 1)]);

    if (ids.size() > static_cast<std::size_t>(n))
        ids.resize(static_cast<std::size_t>(n));
    std::vector<LexiconEntry> out;
    out.reserve(ids.size());
    for (const std::string& id : ids)
        out.push_back(lexicon.entry(id));
    return out;
}

/// Seed for one plan's content pick: varies per student and per session while
/// staying reproducible for a fixed configuration.
inline std::uint64_t content_seed(const AdaptationConfig& cfg, const std::string& student_id,
                                  int session_ordinal) {
    std::uint64_t h = detail::fnv1a64(detail::fnv_offset, cfg.selection_seed);
    h = detail::fnv1a64(h, student_id);
    h = detail::fnv1a64(h, static_cast<std::uint64_t>(session_ordinal));
    return h;
}

/// Build the next session: walk the candidate pipeline, pick the first
/// feature with content, choose the game type, and select a batch of entries.
/// Planning is read-only; nothing in the profile changes until a result is
/// submitted.
inline SessionPlan plan_session(const StudentProfile& profile, const FeatureGraph& graph,
                                const Lexicon& lexicon, const AdaptationConfig& cfg) {
    std::vector<Candidate> candidates = candidate_features(profile, graph, cfg);
    int ordinal = profile.session_counter + 1;
    std::uint64_t seed = content_seed(cfg, profile.student_id, ordinal);

    bool skipped_for_content = false;
    for (Candidate& cand : candidates) {
        std::vector<LexiconEntry> content;
        try {
            content = select_content(lexicon, cand.feature_id, cfg.content_batch_size, seed);
        } catch (const DomainError& e) {
            if (e.code() == ErrorCode::no_content_for_feature) {
                skipped_for_content = true;
                continue;
            }
            throw;
        }
        const FeatureState& st = profile.states.at(cand.feature_id);
        SessionPlan plan;
        plan.student_id = profile.student_id;
        plan.session_ordinal = ordinal;
        plan.feature_id = cand.feature_id;
        plan.game_type = select_game_type(st);
        plan.content = std::move(content);
        plan.rule_trace = std::move(cand.rule_trace);
        if (skipped_for_content)
            plan.rule_trace.push_back(rules::content_fallback);
        plan.rule_trace.push_back(plan.game_type == GameType::accuracy
                                      ? rules::accuracy_first
                                      : rules::automaticity_progression);
        plan.rule_trace.push_back(rules::content_filter);
        return plan;
    }
    fail(ErrorCode::no_content_for_feature,
         "no playable feature of student " + profile.student_id + " has lexicon content");
}

/// Apply one session result to the profile. Steps, in contract order:
/// count the session, score it, update mastery, record usage, roll back on
/// stagnation, propagate unlocks, then settle the feature's status.
inline SessionOutcome submit_result(StudentProfile& profile, const FeatureGraph& graph,
                                    const SessionResult& result, const AdaptationConfig& cfg) {
    graph.feature(result.feature_id); // throws UnknownFeature
    FeatureState& st = profile.states.at(result.feature_id);
    bool playable = st.status == FeatureStatus::open ||
                    detail::reopen_eligible(profile, st, cfg);
    if (!playable)
        fail(ErrorCode::feature_not_open,
             "feature \"" + result.feature_id + "\" is " + std::string(to_string(st.status)) +
                 " and not playable for student " + profile.student_id);
    if (result.items.empty())
        fail(ErrorCode::empty_session, "a session result must contain at least one item");

    SessionOutcome outcome;
    outcome.feature_id = result.feature_id;
    outcome.game_type = select_game_type(st);

    profile.session_counter += 1;
    outcome.session_ordinal = profile.session_counter;

    outcome.score = score_session(result.items);

    double entered = st.mastery;
    if (cfg.ema.window)
        st.mastery = update_mastery_windowed(st.score_history, entered, outcome.score, cfg.ema,
                                             cfg.scale);
    else
        st.mastery = update_mastery(entered, outcome.score, cfg.ema, cfg.scale);

    st.use_count += 1;
    st.last_used_session = profile.session_counter;
    st.last_score = outcome.score.value;
    st.stagnation_window.push_back({entered, st.mastery});
    if (st.stagnation_window.size() > 2)
        st.stagnation_window.erase(st.stagnation_window.begin());
    if (cfg.ema.window && *cfg.ema.window > 1) {
        st.score_history.push_back({entered, outcome.score.value});
        while (st.score_history.size() > static_cast<std::size_t>(*cfg.ema.window - 1))
            st.score_history.erase(st.score_history.begin());
    }

    if (detect_stagnation(st))
        outcome.rollback_applied = apply_stagnation_rollback(profile, graph, result.feature_id,
                                                             cfg.stagnation_delta, cfg.scale);

    outcome.newly_opened = apply_unlocks(profile, graph, cfg.scale);

    if (st.mastery >= cfg.scale.pass_threshold && st.status == FeatureStatus::open &&
        st.mastery == cfg.scale.max)
        st.status = FeatureStatus::mastered;

    outcome.new_mastery = st.mastery;
    outcome.status_after = st.status;
    return outcome;
}

inline jsonx::json to_json(const SessionPlan& plan) {
    jsonx::json content = jsonx::json::array();
    for (const LexiconEntry& e : plan.content)
        content.push_back({{"entry_id", e.entry_id},
                           {"text", e.text},
                           {"kind", std::string(to_string(e.kind))}});
    return {{"student_id", plan.student_id},
            {"session_ordinal", plan.session_ordinal},
            {"feature_id", plan.feature_id},
            {"game_type", std::string(to_string(plan.game_type))},
            {"content", std::move(content)},
            {"rule_trace", plan.rule_trace}};
}

inline jsonx::json to_json(const SessionOutcome& o) {
    return {{"feature_id", o.feature_id},
            {"session_ordinal", o.session_ordinal},
            {"game_type", std::string(to_string(o.game_type))},
            {"score", o.score.value},
            {"had_errors", o.score.had_errors},
            {"new_mastery", o.new_mastery},
            {"status", std::string(to_string(o.status_after))},
            {"newly_opened", o.newly_opened},
            {"rollback_applied", o.rollback_applied}};
}

inline SessionResult session_result_from_json(const jsonx::json& doc) {
    using namespace jsonx;
    as_object(doc, "session result");
    check_keys(doc, {"feature_id", "items"}, "session result");
    SessionResult r;
    r.feature_id = req_id(doc, "feature_id", "session result");
    const json& items = as_array(require(doc, "items", "session result"), "session result.items");
    for (const json& item : items) {
        as_object(item, "session result item");
        check_keys(item, {"correct"}, "session result item");
        r.items.push_back(req_bool(item, "correct", "session result item"));
    }
    return r;
}

inline jsonx::json to_json(const SessionResult& r) {
    jsonx::json items = jsonx::json::array();
    for (bool ok : r.items)
        items.push_back({{"correct", ok}});
    return {{"feature_id", r.feature_id}, {"items", std::move(items)}};
}

} // namespace readapt
