#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "readapt/config.hpp"
#include "readapt/feature_graph.hpp"

namespace readapt {

enum class FeatureStatus { locked, open, mastered };

constexpr std::string_view to_string(FeatureStatus s) noexcept {
    switch (s) {
    case FeatureStatus::locked: return "locked";
    case FeatureStatus::open: return "open";
    case FeatureStatus::mastered: return "mastered";
    }
    return "locked";
}

inline FeatureStatus feature_status_from_string(std::string_view s) {
    if (s == "locked") return FeatureStatus::locked;
    if (s == "open") return FeatureStatus::open;
    if (s == "mastered") return FeatureStatus::mastered;
    fail(ErrorCode::malformed_document, "unknown feature status \"" + std::string(s) + "\"");
}

/// Mastery recorded around one play of a feature: the value the student
/// entered the session with and the value they left with.
struct MasterySample {
    double entered = 0.0;
    double exited = 0.0;
};

/// Session score paired with the mastery the session started from; feeds the
/// finite-window EMA mode.
struct ScoreSample {
    double entered = 0.0;
    double score = 0.0;
};

struct FeatureState {
    double mastery = 0.0;
    FeatureStatus status = FeatureStatus::locked;
    int use_count = 0;
    std::optional<int> last_used_session; // present iff use_count > 0
    std::optional<double> last_score;
    std::vector<MasterySample> stagnation_window; // the last <= 2 plays
    std::vector<ScoreSample> score_history;       // last window-1 plays, finite EMA mode only
};

/// The graph instantiated for one student. A profile is a unit of mutation:
/// callers serialize all operations on one profile (single writer).
struct StudentProfile {
    std::string student_id;
    int age_level = 0;
    std::string graph_id;
    int session_counter = 0; // total games played by this student
    std::map<std::string, FeatureState> states;
};

/// Create the initial profile for a student of the given age: features below
/// the student's age level count as already mastered, features whose
/// prerequisites are all covered that way start open at init_open, and
/// everything else starts locked at the scale minimum.
inline StudentProfile instantiate_profile(const FeatureGraph& graph, std::string student_id,
                                          int age_level, const MasteryScale& scale) {
    StudentProfile profile;
    profile.student_id = std::move(student_id);
    profile.age_level = age_level;
    profile.graph_id = graph.graph_id();
    for (const std::string& id : graph.teaching_order()) {
        const Feature& f = graph.feature(id);
        FeatureState st;
        if (f.min_age_level < age_level) {
            st.mastery = scale.max;
            st.status = FeatureStatus::mastered;
        } else {
            bool prereqs_mastered = true;
            for (const std::string& p : graph.direct_prerequisites(id)) {
                if (profile.states.at(p).status != FeatureStatus::mastered) {
                    prereqs_mastered = false;
                    break;
                }
            }
            if (prereqs_mastered) {
                st.mastery = scale.init_open;
                st.status = FeatureStatus::open;
            } else {
                st.mastery = scale.min;
                st.status = FeatureStatus::locked;
            }
        }
        profile.states.emplace(id, st);
    }
    return profile;
}

/// Open every locked feature whose direct prerequisites all sit at or above
/// the pass threshold. Runs to a fixed point, never closes anything, and is
/// idempotent. Returns the newly opened ids sorted by (difficulty_rank, id).
inline std::vector<std::string> apply_unlocks(StudentProfile& profile, const FeatureGraph& graph,
                                              const MasteryScale& scale) {
    std::vector<std::string> opened;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [id, st] : profile.states) {
            if (st.status != FeatureStatus::locked)
                continue;
            bool ready = true;
            for (const std::string& p : graph.direct_prerequisites(id)) {
                if (profile.states.at(p).mastery < scale.pass_threshold) {
                    ready = false;
                    break;
                }
            }
            if (ready) {
                st.status = FeatureStatus::open;
                st.mastery = scale.init_open;
                opened.push_back(id);
                changed = true;
            }
        }
    }
    graph.sort_by_rank(opened);
    return opened;
}

inline jsonx::json to_json(const FeatureState& st) {
    jsonx::json obj{{"mastery", st.mastery},
                    {"status", std::string(to_string(st.status))},
                    {"use_count", st.use_count}};
    if (st.last_used_session)
        obj["last_used_session"] = *st.last_used_session;
    if (st.last_score)
        obj["last_score"] = *st.last_score;
    if (!st.stagnation_window.empty()) {
        jsonx::json win = jsonx::json::array();
        for (const MasterySample& s : st.stagnation_window)
            win.push_back({{"entered", s.entered}, {"exited", s.exited}});
        obj["recent_masteries"] = std::move(win);
    }
    if (!st.score_history.empty()) {
        jsonx::json hist = jsonx::json::array();
        for (const ScoreSample& s : st.score_history)
            hist.push_back({{"entered", s.entered}, {"score", s.score}});
        obj["recent_scores"] = std::move(hist);
    }
    return obj;
}

inline jsonx::json to_json(const StudentProfile& p) {
    jsonx::json states = jsonx::json::object();
    for (const auto& [id, st] : p.states)
        states[id] = to_json(st);
    return {{"student_id", p.student_id},
            {"age_level", p.age_level},
            {"graph_id", p.graph_id},
            {"session_counter", p.session_counter},
            {"states", std::move(states)}};
}

inline FeatureState feature_state_from_json(const jsonx::json& obj) {
    using namespace jsonx;
    as_object(obj, "feature state");
    check_keys(obj,
               {"mastery", "status", "use_count", "last_used_session", "last_score",
                "recent_masteries", "recent_scores"},
               "feature state");
    FeatureState st;
    st.mastery = req_double(obj, "mastery", "feature state");
    st.status = feature_status_from_string(req_string(obj, "status", "feature state"));
    st.use_count = static_cast<int>(req_int(obj, "use_count", "feature state"));
    if (find(obj, "last_used_session"))
        st.last_used_session = static_cast<int>(req_int(obj, "last_used_session", "feature state"));
    if (find(obj, "last_score"))
        st.last_score = req_double(obj, "last_score", "feature state");
    if (const json* win = find(obj, "recent_masteries")) {
        for (const json& s : as_array(*win, "recent_masteries"))
            st.stagnation_window.push_back({req_double(s, "entered", "recent_masteries"),
                                            req_double(s, "exited", "recent_masteries")});
    }
    if (const json* hist = find(obj, "recent_scores")) {
        for (const json& s : as_array(*hist, "recent_scores"))
            st.score_history.push_back({req_double(s, "entered", "recent_scores"),
                                        req_double(s, "score", "recent_scores")});
    }
    return st;
}

inline StudentProfile profile_from_json(const jsonx::json& obj) {
    using namespace jsonx;
    as_object(obj, "profile");
    check_keys(obj, {"student_id", "age_level", "graph_id", "session_counter", "states"},
               "profile");
    StudentProfile p;
    p.student_id = req_id(obj, "student_id", "profile");
    p.age_level = static_cast<int>(req_int(obj, "age_level", "profile"));
    p.graph_id = req_id(obj, "graph_id", "profile");
    p.session_counter = static_cast<int>(req_int(obj, "session_counter", "profile"));
    const json& states = as_object(require(obj, "states", "profile"), "profile.states");
    for (auto it = states.begin(); it != states.end(); ++it)
        p.states.emplace(it.key(), feature_state_from_json(it.value()));
    return p;
}

} // namespace readapt
