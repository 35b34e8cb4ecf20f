#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "readapt/engine.hpp"
#include "readapt/events.hpp"
#include "readapt/hash.hpp"
#include "readapt/planner.hpp"

namespace readapt {

/// Logistic response model: the chance of answering one item correctly is
/// sigmoid(ability + learning_rate * prior plays of the feature
///         - difficulty_scale * difficulty_rank).
struct SyntheticStudentSpec {
    double ability = 0.0;
    double learning_rate = 0.0;
    double difficulty_scale = 1.0;
    double skip_prob = 0.0; // chance a fetched plan is abandoned unsubmitted
    std::uint64_t seed = 1;
    int age_level = 0;
    int sessions = 1;
};

inline void validate(const SyntheticStudentSpec& s) {
    if (s.sessions < 1)
        fail(ErrorCode::invalid_config, "sessions must be >= 1");
    if (s.learning_rate < 0.0)
        fail(ErrorCode::invalid_config, "learning_rate must be >= 0");
    if (!(s.skip_prob >= 0.0 && s.skip_prob <= 1.0))
        fail(ErrorCode::invalid_config, "skip_prob must lie in [0, 1]");
    if (s.age_level < 0)
        fail(ErrorCode::invalid_age, "age_level must be non-negative");
}

struct TrajectoryRow {
    int session_ordinal = 0;
    std::string feature_id;
    GameType game_type = GameType::accuracy;
    double score = 0.0;
    double mastery_after = 0.0;
    bool operator==(const TrajectoryRow&) const = default;
};

/// Everything a run reports. Every field is recomputable from the event log
/// alone; analyze_log on a run's own log must reproduce the report exactly.
struct SimulationReport {
    std::string student_id;
    int sessions_played = 0;
    std::map<std::string, int> sessions_to_unlock; // ordinal when opened; 0 = from the start
    std::map<std::string, int> sessions_to_max;    // plays of the feature until first mastered
    std::vector<TrajectoryRow> trajectory;
    int max_repetition_streak = 0; // longest run of consecutive ordinals planned on one feature
    int rollback_count = 0;
    std::string event_log;
    bool operator==(const SimulationReport&) const = default;
};

inline jsonx::json to_json(const SimulationReport& r) {
    jsonx::json traj = jsonx::json::array();
    for (const TrajectoryRow& row : r.trajectory)
        traj.push_back({{"session_ordinal", row.session_ordinal},
                        {"feature_id", row.feature_id},
                        {"game_type", std::string(to_string(row.game_type))},
                        {"score", row.score},
                        {"mastery_after", row.mastery_after}});
    return {{"student_id", r.student_id},
            {"sessions_played", r.sessions_played},
            {"sessions_to_unlock", r.sessions_to_unlock},
            {"sessions_to_max", r.sessions_to_max},
            {"max_repetition_streak", r.max_repetition_streak},
            {"rollback_count", r.rollback_count},
            {"event_log", r.event_log},
            {"trajectory", std::move(traj)}};
}

inline SessionPlan plan_from_json(const jsonx::json& doc) {
    using namespace jsonx;
    as_object(doc, "session plan");
    SessionPlan p;
    p.student_id = req_string(doc, "student_id", "session plan");
    p.session_ordinal = static_cast<int>(req_int(doc, "session_ordinal", "session plan"));
    p.feature_id = req_string(doc, "feature_id", "session plan");
    p.game_type = game_type_from_string(req_string(doc, "game_type", "session plan"));
    for (const json& e : as_array(require(doc, "content", "session plan"), "plan content")) {
        LexiconEntry entry;
        entry.entry_id = req_string(e, "entry_id", "plan entry");
        entry.text = req_string(e, "text", "plan entry");
        entry.kind = req_string(e, "kind", "plan entry") == "sentence" ? EntryKind::sentence
                                                                       : EntryKind::word;
        p.content.push_back(std::move(entry));
    }
    for (const json& s :
         as_array(require(doc, "rule_trace", "session plan"), "plan rule_trace")) {
        if (!s.is_string())
            fail(ErrorCode::malformed_document, "rule_trace must hold strings");
        p.rule_trace.push_back(s.get<std::string>());
    }
    return p;
}

inline SessionOutcome outcome_from_json(const jsonx::json& doc) {
    using namespace jsonx;
    as_object(doc, "session outcome");
    SessionOutcome o;
    o.feature_id = req_string(doc, "feature_id", "session outcome");
    o.session_ordinal = static_cast<int>(req_int(doc, "session_ordinal", "session outcome"));
    o.game_type = game_type_from_string(req_string(doc, "game_type", "session outcome"));
    o.score.value = req_double(doc, "score", "session outcome");
    o.score.had_errors = req_bool(doc, "had_errors", "session outcome");
    o.new_mastery = req_double(doc, "new_mastery", "session outcome");
    o.status_after = feature_status_from_string(req_string(doc, "status", "session outcome"));
    for (const json& s :
         as_array(require(doc, "newly_opened", "session outcome"), "outcome newly_opened"))
        o.newly_opened.push_back(s.get<std::string>());
    for (const json& s : as_array(require(doc, "rollback_applied", "session outcome"),
                                  "outcome rollback_applied"))
        o.rollback_applied.push_back(s.get<std::string>());
    return o;
}

/// Where a simulated student sends its requests: straight into an Engine or
/// over HTTP to a running service. One student per caller thread.
class SessionBackend {
public:
    virtual ~SessionBackend() = default;
    virtual void register_model(const jsonx::json& graph_doc, const jsonx::json& lexicon_doc) = 0;
    virtual std::string create_student(const std::string& graph_id, int age_level) = 0;
    virtual jsonx::json student_snapshot(const std::string& student_id) = 0;
    virtual SessionPlan plan(const std::string& student_id) = 0;
    virtual SessionOutcome submit(const std::string& student_id, const SessionResult& r) = 0;
    virtual std::vector<EventRecord> events(const std::string& student_id) = 0;
};

class EngineBackend : public SessionBackend {
public:
    explicit EngineBackend(Engine& engine) : engine_(engine) {}

    void register_model(const jsonx::json& g, const jsonx::json& l) override {
        engine_.register_model(g, l);
    }
    std::string create_student(const std::string& graph_id, int age_level) override {
        return engine_.create_student(graph_id, age_level);
    }
    jsonx::json student_snapshot(const std::string& id) override {
        return engine_.student_snapshot(id);
    }
    SessionPlan plan(const std::string& id) override { return engine_.plan_next_session(id); }
    SessionOutcome submit(const std::string& id, const SessionResult& r) override {
        return engine_.submit_result(id, r);
    }
    std::vector<EventRecord> events(const std::string& id) override {
        return engine_.events_since(id, 0);
    }

private:
    Engine& engine_;
};

class HttpBackend : public SessionBackend {
public:
    explicit HttpBackend(const std::string& base_url) : client_(base_url) {
        client_.set_connection_timeout(10, 0);
        client_.set_read_timeout(60, 0);
        client_.set_write_timeout(60, 0);
    }

    void register_model(const jsonx::json& g, const jsonx::json& l) override {
        post("/models", {{"graph", g}, {"lexicon", l}});
    }
    std::string create_student(const std::string& graph_id, int age_level) override {
        jsonx::json body = post("/students", {{"graph_id", graph_id}, {"age_level", age_level}});
        return jsonx::req_string(body, "student_id", "create-student response");
    }
    jsonx::json student_snapshot(const std::string& id) override { return get("/students/" + id); }
    SessionPlan plan(const std::string& id) override {
        return plan_from_json(get("/students/" + id + "/next-session"));
    }
    SessionOutcome submit(const std::string& id, const SessionResult& r) override {
        return outcome_from_json(post("/students/" + id + "/results", to_json(r)));
    }
    std::vector<EventRecord> events(const std::string& id) override {
        jsonx::json body = get("/students/" + id + "/events?since=0");
        std::vector<EventRecord> out;
        for (const jsonx::json& e : jsonx::as_array(body, "events response"))
            out.push_back(event_from_json(e));
        return out;
    }

private:
    jsonx::json get(const std::string& path) { return unwrap(client_.Get(path)); }

    jsonx::json post(const std::string& path, const jsonx::json& body) {
        return unwrap(client_.Post(path, body.dump(), "application/json"));
    }

    jsonx::json unwrap(httplib::Result res) {
        if (!res)
            fail(ErrorCode::io_error,
                 "HTTP request failed: " + httplib::to_string(res.error()));
        jsonx::json body = jsonx::parse_bytes(res->body, "service response");
        if (res->status >= 400) {
            const jsonx::json& err = jsonx::require(body, "error", "service error response");
            fail(error_code_from_string(
                     jsonx::req_string(err, "code", "service error response")),
                 jsonx::req_string(err, "message", "service error response"));
        }
        return body;
    }

    httplib::Client client_;
};

enum class FixtureShape { chain, diamond, wide, random_dag };

inline FixtureShape fixture_shape_from_string(std::string_view s) {
    if (s == "chain") return FixtureShape::chain;
    if (s == "diamond") return FixtureShape::diamond;
    if (s == "wide") return FixtureShape::wide;
    if (s == "random") return FixtureShape::random_dag;
    fail(ErrorCode::invalid_shape_parameters, "unknown fixture shape \"" + std::string(s) + "\"");
}

constexpr std::string_view to_string(FixtureShape s) noexcept {
    switch (s) {
    case FixtureShape::chain: return "chain";
    case FixtureShape::diamond: return "diamond";
    case FixtureShape::wide: return "wide";
    case FixtureShape::random_dag: return "random";
    }
    return "?";
}

struct FixtureDocs {
    jsonx::json graph;
    jsonx::json lexicon;
};

namespace detail {

inline std::uint64_t chain_hash(std::uint64_t seed, std::string_view tag) {
    return fnv1a64(fnv1a64(fnv1a64(fnv_offset, std::uint64_t{0}), seed), tag);
}

inline double item_draw(std::uint64_t seed, const std::string& feature_id, int use_count,
                        int item_idx) {
    std::uint64_t h = chain_hash(seed, "item");
    h = fnv1a64(h, feature_id);
    h = fnv1a64(h, static_cast<std::uint64_t>(use_count));
    h = fnv1a64(h, static_cast<std::uint64_t>(item_idx));
    return to_unit_interval(h);
}

inline double skip_draw(std::uint64_t seed, int session_idx) {
    return to_unit_interval(
        fnv1a64(chain_hash(seed, "skip"), static_cast<std::uint64_t>(session_idx)));
}

inline std::string pseudo_word(std::uint64_t& h) {
    static constexpr char consonants[] = "bdfgklmnprstvz";
    static constexpr char vowels[] = "aeiou";
    auto step = [&h] {
        h = fnv1a64(h, std::uint64_t{0x9e37});
        return h;
    };
    int syllables = 2 + (to_unit_interval(step()) < 0.35 ? 1 : 0);
    std::string w;
    for (int s = 0; s < syllables; ++s) {
        w += consonants[step() % 14];
        w += vowels[step() % 5];
    }
    return w;
}

inline std::map<std::string, int> ranks_from_graph_doc(const jsonx::json& graph_doc) {
    std::map<std::string, int> ranks;
    for (const jsonx::json& f :
         jsonx::as_array(jsonx::require(graph_doc, "features", "graph document"), "features"))
        ranks[jsonx::req_string(f, "id", "feature")] =
            static_cast<int>(jsonx::req_int(f, "difficulty_rank", "feature"));
    return ranks;
}

/// Tracks "longest run of consecutive planned ordinals on one feature".
/// Re-plans of the same ordinal collapse into one planned session.
struct StreakTracker {
    int last_ordinal = -1;
    std::string last_feature;
    int current = 0;
    int best = 0;

    void observe(int ordinal, const std::string& feature_id) {
        if (ordinal == last_ordinal)
            return;
        current = feature_id == last_feature ? current + 1 : 1;
        last_feature = feature_id;
        last_ordinal = ordinal;
        best = std::max(best, current);
    }
};

/// The plan→play→submit loop for one already-created student. Fills every
/// report field except event_log.
inline SimulationReport play_student(SessionBackend& backend, const std::string& student_id,
                                     const std::map<std::string, int>& ranks,
                                     const SyntheticStudentSpec& spec) {
    SimulationReport rep;
    rep.student_id = student_id;

    jsonx::json snapshot = backend.student_snapshot(student_id);
    const jsonx::json& states =
        jsonx::as_object(jsonx::require(snapshot, "states", "student snapshot"), "states");
    for (auto it = states.begin(); it != states.end(); ++it) {
        FeatureStatus status = feature_status_from_string(
            jsonx::req_string(it.value(), "status", "state of " + it.key()));
        if (status != FeatureStatus::locked)
            rep.sessions_to_unlock.emplace(it.key(), 0);
    }

    StreakTracker streak;
    std::map<std::string, int> plays;
    for (int i = 0; i < spec.sessions; ++i) {
        SessionPlan plan;
        try {
            plan = backend.plan(student_id);
        } catch (const DomainError& e) {
            if (e.code() == ErrorCode::no_playable_feature)
                break; // nothing left to practise; the run ends early
            throw;
        }
        streak.observe(plan.session_ordinal, plan.feature_id);
        rep.max_repetition_streak = streak.best;

        if (spec.skip_prob > 0.0 && skip_draw(spec.seed, i) < spec.skip_prob)
            continue;

        auto rank_it = ranks.find(plan.feature_id);
        if (rank_it == ranks.end())
            fail(ErrorCode::unknown_feature,
                 "plan names feature \"" + plan.feature_id + "\" missing from the graph");
        int use_count = plays[plan.feature_id];
        double logit = spec.ability + spec.learning_rate * use_count -
                       spec.difficulty_scale * rank_it->second;
        double p = 1.0 / (1.0 + std::exp(-logit));

        SessionResult result;
        result.feature_id = plan.feature_id;
        for (int j = 0; j < static_cast<int>(plan.content.size()); ++j)
            result.items.push_back(item_draw(spec.seed, plan.feature_id, use_count, j) < p);

        SessionOutcome outcome = backend.submit(student_id, result);
        plays[plan.feature_id] += 1;
        rep.sessions_played += 1;
        rep.trajectory.push_back({outcome.session_ordinal, outcome.feature_id,
                                  outcome.game_type, outcome.score.value,
                                  outcome.new_mastery});
        if (!outcome.rollback_applied.empty())
            rep.rollback_count += 1;
        for (const std::string& fid : outcome.newly_opened)
            rep.sessions_to_unlock.emplace(fid, outcome.session_ordinal);
        if (outcome.status_after == FeatureStatus::mastered)
            rep.sessions_to_max.emplace(outcome.feature_id, plays[outcome.feature_id]);
    }
    return rep;
}

} // namespace detail

/// Registers the model unless the backend already has it.
inline void ensure_model(SessionBackend& backend, const jsonx::json& graph_doc,
                         const jsonx::json& lexicon_doc) {
    try {
        backend.register_model(graph_doc, lexicon_doc);
    } catch (const DomainError& e) {
        if (e.code() != ErrorCode::duplicate_model)
            throw;
    }
}

inline void write_trajectory_csv(const SimulationReport& rep,
                                 const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out)
        fail(ErrorCode::io_error, "cannot write " + file.string());
    out << "session,feature_id,game_type,score,mastery_after\n";
    for (const TrajectoryRow& row : rep.trajectory)
        out << row.session_ordinal << ',' << row.feature_id << ',' << to_string(row.game_type)
            << ',' << jsonx::json(row.score).dump() << ','
            << jsonx::json(row.mastery_after).dump() << '\n';
}

inline void write_report_json(const SimulationReport& rep, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out)
        fail(ErrorCode::io_error, "cannot write " + file.string());
    out << to_json(rep).dump(2) << '\n';
}

/// Writes events.jsonl, trajectory.csv, and report.json for one finished run
/// and points report.event_log at the written log.
inline void write_simulation_outputs(SessionBackend& backend, const std::string& student_id,
                                     SimulationReport& rep,
                                     const std::filesystem::path& out_dir,
                                     const std::string& suffix) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    fs::path events_path = out_dir / ("events" + suffix + ".jsonl");
    {
        std::ofstream out(events_path);
        if (!out)
            fail(ErrorCode::io_error, "cannot write " + events_path.string());
        for (const EventRecord& e : backend.events(student_id))
            out << to_json(e).dump() << '\n';
    }
    rep.event_log = events_path.string();

    write_trajectory_csv(rep, out_dir / ("trajectory" + suffix + ".csv"));
    write_report_json(rep, out_dir / ("report" + suffix + ".json"));
}

/// One synthetic student through the full loop. Deterministic for a fixed
/// spec and a fresh backend. Pass an out_dir to also write the three result
/// files; an empty path skips them.
inline SimulationReport simulate(SessionBackend& backend, const jsonx::json& graph_doc,
                                 const jsonx::json& lexicon_doc,
                                 const SyntheticStudentSpec& spec,
                                 const std::filesystem::path& out_dir = {}) {
    validate(spec);
    ensure_model(backend, graph_doc, lexicon_doc);
    std::string graph_id = jsonx::req_string(graph_doc, "graph_id", "graph document");
    std::string student_id = backend.create_student(graph_id, spec.age_level);
    std::map<std::string, int> ranks = detail::ranks_from_graph_doc(graph_doc);
    SimulationReport rep = detail::play_student(backend, student_id, ranks, spec);
    if (!out_dir.empty())
        write_simulation_outputs(backend, student_id, rep, out_dir, "");
    return rep;
}

/// A cohort: students are created up front (so ids are stable), then play
/// concurrently, one worker per student. Per-student seeds derive from the
/// base seed. Output files get a per-student suffix.
inline std::vector<SimulationReport> simulate_cohort(SessionBackend& backend,
                                                     const jsonx::json& graph_doc,
                                                     const jsonx::json& lexicon_doc,
                                                     const SyntheticStudentSpec& base,
                                                     int n_students,
                                                     const std::filesystem::path& out_dir = {}) {
    validate(base);
    if (n_students < 1)
        fail(ErrorCode::invalid_config, "a cohort needs at least one student");
    ensure_model(backend, graph_doc, lexicon_doc);
    std::string graph_id = jsonx::req_string(graph_doc, "graph_id", "graph document");
    std::map<std::string, int> ranks = detail::ranks_from_graph_doc(graph_doc);

    std::vector<std::string> ids;
    for (int i = 0; i < n_students; ++i)
        ids.push_back(backend.create_student(graph_id, base.age_level));

    std::vector<SimulationReport> reports(ids.size());
    std::vector<std::exception_ptr> failures(ids.size());
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        workers.emplace_back([&, i] {
            try {
                SyntheticStudentSpec spec = base;
                spec.seed = detail::fnv1a64(detail::chain_hash(base.seed, "student"),
                                            static_cast<std::uint64_t>(i));
                reports[i] = detail::play_student(backend, ids[i], ranks, spec);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        });
    }
    for (std::thread& t : workers)
        t.join();
    for (const std::exception_ptr& p : failures)
        if (p)
            std::rethrow_exception(p);

    if (!out_dir.empty())
        for (std::size_t i = 0; i < ids.size(); ++i)
            write_simulation_outputs(backend, ids[i], reports[i], out_dir, "-" + ids[i]);
    return reports;
}

/// Rebuild a SimulationReport from an event log alone. On a log produced by
/// simulate this equals the in-run report field for field.
inline SimulationReport analyze_log(const std::filesystem::path& path) {
    std::vector<EventRecord> events = read_event_log(path);
    SimulationReport rep;
    rep.event_log = path.string();

    detail::StreakTracker streak;
    std::map<std::string, int> plays;
    for (const EventRecord& e : events) {
        try {
            switch (e.kind) {
            case EventKind::profile_created: {
                rep.student_id = jsonx::req_string(e.payload, "student_id", "profile_created");
                const jsonx::json& init = jsonx::as_object(
                    jsonx::require(e.payload, "initial_states", "profile_created"),
                    "initial_states");
                for (auto it = init.begin(); it != init.end(); ++it) {
                    FeatureStatus status = feature_status_from_string(
                        jsonx::req_string(it.value(), "status", "initial state"));
                    if (status != FeatureStatus::locked)
                        rep.sessions_to_unlock.emplace(it.key(), 0);
                }
                break;
            }
            case EventKind::session_planned: {
                const jsonx::json& plan =
                    jsonx::require(e.payload, "plan", "session_planned");
                streak.observe(
                    static_cast<int>(jsonx::req_int(plan, "session_ordinal", "plan")),
                    jsonx::req_string(plan, "feature_id", "plan"));
                rep.max_repetition_streak = streak.best;
                break;
            }
            case EventKind::result_submitted: {
                SessionOutcome o = outcome_from_json(
                    jsonx::require(e.payload, "outcome", "result_submitted"));
                rep.sessions_played += 1;
                rep.trajectory.push_back({o.session_ordinal, o.feature_id, o.game_type,
                                          o.score.value, o.new_mastery});
                int& count = plays[o.feature_id];
                count += 1;
                if (o.status_after == FeatureStatus::mastered)
                    rep.sessions_to_max.emplace(o.feature_id, count);
                break;
            }
            case EventKind::feature_opened:
                rep.sessions_to_unlock.emplace(
                    jsonx::req_string(e.payload, "feature_id", "feature_opened"),
                    static_cast<int>(
                        jsonx::req_int(e.payload, "session_ordinal", "feature_opened")));
                break;
            case EventKind::rollback_applied:
                rep.rollback_count += 1;
                break;
            case EventKind::feature_reopened:
                break;
            }
        } catch (const DomainError& err) {
            if (err.code() == ErrorCode::corrupt_log)
                throw;
            fail(ErrorCode::corrupt_log, path.string() + ": event " +
                                             std::to_string(e.sequence_no) + ": " + err.what());
        }
    }
    return rep;
}

inline FixtureDocs generate_fixture(int n_features, FixtureShape shape, int entries_per_feature,
                                    std::uint64_t seed, double edge_prob = 0.5) {
    if (n_features < 1 || n_features > 999)
        fail(ErrorCode::invalid_shape_parameters, "n_features must lie in [1, 999]");
    if (entries_per_feature < 1 || n_features * entries_per_feature > 99999)
        fail(ErrorCode::invalid_shape_parameters,
             "entries_per_feature must be >= 1 and yield at most 99999 entries");
    if (shape == FixtureShape::wide && n_features < 2)
        fail(ErrorCode::invalid_shape_parameters, "wide needs a sink plus at least one root");
    if (shape == FixtureShape::diamond && n_features < 3)
        fail(ErrorCode::invalid_shape_parameters,
             "diamond needs a source, a sink, and at least one middle feature");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
        fail(ErrorCode::invalid_shape_parameters, "edge_prob must lie in [0, 1]");

    auto feature_name = [](int i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "f%03d", i);
        return std::string(buf);
    };

    jsonx::json features = jsonx::json::array();
    for (int i = 0; i < n_features; ++i)
        features.push_back(
            {{"id", feature_name(i)},
             {"label", "synthetic pattern " + feature_name(i)},
             {"category", i % 4 == 3 ? "syntactic" : "phonological"},
             {"difficulty_rank", i},
             {"min_age_level", i + 1}});

    jsonx::json edges = jsonx::json::array();
    switch (shape) {
    case FixtureShape::chain:
        for (int i = 0; i + 1 < n_features; ++i)
            edges.push_back({feature_name(i), feature_name(i + 1)});
        break;
    case FixtureShape::diamond:
        for (int m = 1; m + 1 < n_features; ++m) {
            edges.push_back({feature_name(0), feature_name(m)});
            edges.push_back({feature_name(m), feature_name(n_features - 1)});
        }
        break;
    case FixtureShape::wide:
        for (int i = 0; i + 1 < n_features; ++i)
            edges.push_back({feature_name(i), feature_name(n_features - 1)});
        break;
    case FixtureShape::random_dag:
        for (int i = 0; i < n_features; ++i) {
            for (int j = i + 1; j < n_features; ++j) {
                std::uint64_t h = detail::chain_hash(seed, "edge");
                h = detail::fnv1a64(h, static_cast<std::uint64_t>(i));
                h = detail::fnv1a64(h, static_cast<std::uint64_t>(j));
                if (detail::to_unit_interval(h) < edge_prob)
                    edges.push_back({feature_name(i), feature_name(j)});
            }
        }
        break;
    }

    char count_buf[16];
    std::snprintf(count_buf, sizeof count_buf, "%03d", n_features);
    std::string stem = std::string(to_string(shape)) + "-" + count_buf + "-s" +
                       std::to_string(seed);

    FixtureDocs docs;
    docs.graph = {{"graph_id", "fx-" + stem}, {"features", std::move(features)},
                  {"edges", std::move(edges)}};

    jsonx::json entries = jsonx::json::array();
    int k = 0;
    for (int i = 0; i < n_features; ++i) {
        for (int t = 0; t < entries_per_feature; ++t, ++k) {
            char id_buf[16];
            std::snprintf(id_buf, sizeof id_buf, "w%05d", k);
            std::uint64_t h =
                detail::fnv1a64(detail::chain_hash(seed, "text"), static_cast<std::uint64_t>(k));
            bool sentence = k % 5 == 4;
            std::string text = detail::pseudo_word(h);
            if (sentence) {
                text += " " + detail::pseudo_word(h);
                text += " " + detail::pseudo_word(h);
            }
            jsonx::json fids = jsonx::json::array({feature_name(i)});
            if (i > 0 && detail::to_unit_interval(detail::fnv1a64(h, "extra")) < 0.25)
                fids.push_back(feature_name(i - 1));
            entries.push_back({{"entry_id", std::string(id_buf)},
                               {"text", std::move(text)},
                               {"kind", sentence ? "sentence" : "word"},
                               {"feature_ids", std::move(fids)}});
        }
    }
    docs.lexicon = {{"lexicon_id", "lx-" + stem}, {"entries", std::move(entries)}};
    return docs;
}

inline void write_fixture(const FixtureDocs& docs, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto write_doc = [&](const fs::path& file, const jsonx::json& doc) {
        std::ofstream out(file);
        if (!out)
            fail(ErrorCode::io_error, "cannot write " + file.string());
        out << doc.dump(2) << '\n';
    };
    write_doc(out_dir / "graph.json", docs.graph);
    write_doc(out_dir / "lexicon.json", docs.lexicon);
}

} // namespace readapt
