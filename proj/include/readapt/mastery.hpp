#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "readapt/config.hpp"
#include "readapt/student_profile.hpp"

namespace readapt {

/// Outcome of one game session, reduced to a scalar on the mastery scale.
struct SessionScore {
    double value = 0.0;   // 10 * correct / total
    bool had_errors = false;
};

/// Score a list of per-item outcomes. Empty sessions are rejected; a perfect
/// list is exactly the scale maximum, so value == 10 iff had_errors == false.
inline SessionScore score_session(const std::vector<bool>& items) {
    if (items.empty())
        fail(ErrorCode::empty_session, "a session must contain at least one item");
    int correct = 0;
    for (bool ok : items)
        correct += ok ? 1 : 0;
    SessionScore s;
    s.value = 10.0 * static_cast<double>(correct) / static_cast<double>(items.size());
    s.had_errors = correct != static_cast<int>(items.size());
    return s;
}

namespace detail {

/// Clamp-and-snap shared by both EMA modes: drops are limited to
/// max_drop_per_session, raw values at or above the snap threshold become the
/// maximum, everything stays inside the scale.
inline double settle_mastery(double raw, double prev, const MasteryScale& scale) {
    double result;
    if (raw < prev)
        result = std::max(raw, prev - scale.max_drop_per_session);
    else if (raw >= scale.snap_threshold)
        result = scale.max;
    else
        result = raw;
    return std::clamp(result, scale.min, scale.max);
}

} // namespace detail

/// Recursive EMA step: the previous mastery value carries all history.
inline double update_mastery(double prev, const SessionScore& score, const EmaConfig& ema,
                             const MasteryScale& scale) {
    double raw = ema.alpha * score.value + (1.0 - ema.alpha) * prev;
    return detail::settle_mastery(raw, prev, scale);
}

/// Finite-window EMA step: the average is rebuilt over the last `window`
/// session scores (the current one included), seeded with the mastery the
/// student entered the window with. `history` holds the most recent
/// window - 1 plays, oldest first. With window = 1 the history is empty and
/// this reduces exactly to the recursive step.
inline double update_mastery_windowed(std::span<const ScoreSample> history, double prev,
                                      const SessionScore& score, const EmaConfig& ema,
                                      const MasteryScale& scale) {
    double ema_value = history.empty() ? prev : history.front().entered;
    for (const ScoreSample& s : history)
        ema_value = ema.alpha * s.score + (1.0 - ema.alpha) * ema_value;
    double raw = ema.alpha * score.value + (1.0 - ema.alpha) * ema_value;
    return detail::settle_mastery(raw, prev, scale);
}

/// A feature stagnates when its last two plays show no net improvement:
/// the newer exit value is no better than the older exit value, and no better
/// than the mastery the student entered the older play with.
inline bool detect_stagnation(const FeatureState& state) {
    if (state.use_count < 2 || state.stagnation_window.size() < 2)
        return false;
    const MasterySample& older = state.stagnation_window[state.stagnation_window.size() - 2];
    const MasterySample& newer = state.stagnation_window[state.stagnation_window.size() - 1];
    return newer.exited <= older.exited && newer.exited <= older.entered;
}

/// Remedial rollback: reduce the stagnating feature and each of its direct
/// prerequisites by `delta` (floored at the scale minimum), reopen mastered
/// prerequisites, and clear the feature's stagnation window so the rule needs
/// a fresh pair of plays to fire again. Returns the affected ids sorted by
/// (difficulty_rank, id).
inline std::vector<std::string> apply_stagnation_rollback(StudentProfile& profile,
                                                          const FeatureGraph& graph,
                                                          const std::string& feature_id,
                                                          double delta,
                                                          const MasteryScale& scale) {
    auto it = profile.states.find(feature_id);
    if (it == profile.states.end())
        fail(ErrorCode::unknown_feature, "no state for feature \"" + feature_id + "\"");

    std::vector<std::string> affected{feature_id};
    const std::vector<std::string>& prereqs = graph.direct_prerequisites(feature_id);
    affected.insert(affected.end(), prereqs.begin(), prereqs.end());

    for (const std::string& id : affected) {
        FeatureState& st = profile.states.at(id);
        st.mastery = std::max(scale.min, st.mastery - delta);
    }
    for (const std::string& p : prereqs) {
        FeatureState& st = profile.states.at(p);
        if (st.status == FeatureStatus::mastered)
            st.status = FeatureStatus::open;
    }
    it->second.stagnation_window.clear();

    graph.sort_by_rank(affected);
    return affected;
}

} // namespace readapt
