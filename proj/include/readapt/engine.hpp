#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "readapt/config.hpp"
#include "readapt/events.hpp"
#include "readapt/feature_graph.hpp"
#include "readapt/lexicon.hpp"
#include "readapt/planner.hpp"
#include "readapt/student_profile.hpp"

namespace readapt {

struct EngineOptions {
    std::filesystem::path data_dir;
    AdaptationConfig config;
    bool fsync_on_append = false;
    /// Unix-millis clock; injectable so batch runs can stamp logical time and
    /// stay byte-reproducible.
    std::function<std::int64_t()> clock = [] {
        using namespace std::chrono;
        return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
    };
};

/// Registry of immutable models plus event-sourced student profiles.
///
/// Requests for distinct students run concurrently; operations on one student
/// serialize behind that student's mutex. Every mutation is computed on a
/// scratch copy first and committed together with its log append, so a failed
/// request leaves both the profile and the log untouched. On startup the
/// engine restores itself by replaying the logs found in its data directory.
class Engine {
public:
    explicit Engine(EngineOptions options) : opt_(std::move(options)) {
        namespace fs = std::filesystem;
        fs::create_directories(models_dir());
        fs::create_directories(students_dir());
        recover();
    }

    const AdaptationConfig& config() const noexcept { return opt_.config; }

    /// Register a graph + lexicon pair. The pair is immutable afterwards and
    /// persisted so a restarted engine can replay its students.
    std::pair<std::string, std::string> register_model(const jsonx::json& graph_doc,
                                                       const jsonx::json& lexicon_doc) {
        FeatureGraph graph = FeatureGraph::from_document(graph_doc);
        Lexicon lexicon = Lexicon::from_document(lexicon_doc, graph);
        std::string graph_id = graph.graph_id();
        std::string lexicon_id = lexicon.lexicon_id();

        std::unique_lock lock(registry_mu_);
        if (models_.count(graph_id))
            fail(ErrorCode::duplicate_model, "graph \"" + graph_id + "\" is already registered");
        for (const auto& [gid, model] : models_) {
            if (model->lexicon.lexicon_id() == lexicon_id)
                fail(ErrorCode::duplicate_model,
                     "lexicon \"" + lexicon_id + "\" is already registered");
        }

        std::filesystem::path file = models_dir() / (sanitize(graph_id) + ".json");
        std::ofstream out(file);
        if (!out)
            fail(ErrorCode::io_error, "cannot write model file " + file.string());
        out << jsonx::json{{"graph", graph_doc}, {"lexicon", lexicon_doc}}.dump() << '\n';
        out.close();

        auto model = std::make_shared<Model>(Model{std::move(graph), std::move(lexicon)});
        models_.emplace(graph_id, std::move(model));
        return {graph_id, lexicon_id};
    }

    std::string create_student(const std::string& graph_id, int age_level) {
        if (age_level < 0)
            fail(ErrorCode::invalid_age, "age_level must be non-negative");
        std::shared_ptr<const Model> model = model_for(graph_id);

        std::unique_lock lock(registry_mu_);
        std::string student_id = next_student_id();
        auto rec = std::make_unique<StudentRec>();
        rec->model = model;
        rec->profile =
            instantiate_profile(model->graph, student_id, age_level, opt_.config.scale);
        rec->log = std::make_unique<EventLogWriter>(student_log_path(student_id),
                                                    opt_.fsync_on_append);

        jsonx::json initial_states = jsonx::json::object();
        for (const auto& [fid, st] : rec->profile.states)
            initial_states[fid] = {{"mastery", st.mastery},
                                   {"status", std::string(to_string(st.status))}};
        EventRecord created;
        created.sequence_no = ++rec->last_seq;
        created.timestamp_ms = opt_.clock();
        created.kind = EventKind::profile_created;
        created.payload = {{"student_id", student_id},
                           {"graph_id", graph_id},
                           {"age_level", age_level},
                           {"initial_states", std::move(initial_states)}};
        rec->log->append({&created, 1});
        rec->events.push_back(std::move(created));

        students_.emplace(student_id, std::move(rec));
        return student_id;
    }

    jsonx::json student_snapshot(const std::string& student_id) const {
        StudentRec& rec = student(student_id);
        std::scoped_lock lock(rec.mu);
        return to_json(rec.profile);
    }

    /// Plan the next session and record it. The profile itself is unchanged:
    /// plans are recorded, not reserved, and a newer plan supersedes silently.
    SessionPlan plan_next_session(const std::string& student_id) {
        StudentRec& rec = student(student_id);
        std::scoped_lock lock(rec.mu);
        SessionPlan plan =
            plan_session(rec.profile, rec.model->graph, rec.model->lexicon, opt_.config);

        std::vector<EventRecord> batch;
        EventRecord planned;
        planned.sequence_no = rec.last_seq + 1;
        planned.timestamp_ms = opt_.clock();
        planned.kind = EventKind::session_planned;
        planned.payload = {{"plan", to_json(plan)}};
        batch.push_back(std::move(planned));

        const FeatureState& st = rec.profile.states.at(plan.feature_id);
        if (st.status == FeatureStatus::mastered) {
            EventRecord reopened;
            reopened.sequence_no = rec.last_seq + 2;
            reopened.timestamp_ms = opt_.clock();
            reopened.kind = EventKind::feature_reopened;
            reopened.payload = {{"feature_id", plan.feature_id},
                                {"session_ordinal", plan.session_ordinal},
                                {"staleness", detail::staleness(rec.profile, st)}};
            batch.push_back(std::move(reopened));
        }

        rec.log->append(batch);
        for (EventRecord& e : batch) {
            rec.last_seq = e.sequence_no;
            rec.events.push_back(std::move(e));
        }
        return plan;
    }

    /// Apply a session result atomically: the outcome is computed on a copy,
    /// all events append in one write, then the profile commits.
    SessionOutcome submit_result(const std::string& student_id, const SessionResult& result) {
        StudentRec& rec = student(student_id);
        std::scoped_lock lock(rec.mu);

        StudentProfile scratch = rec.profile;
        SessionOutcome outcome =
            readapt::submit_result(scratch, rec.model->graph, result, opt_.config);

        std::vector<EventRecord> batch;
        std::int64_t seq = rec.last_seq;
        EventRecord submitted;
        submitted.sequence_no = ++seq;
        submitted.timestamp_ms = opt_.clock();
        submitted.kind = EventKind::result_submitted;
        submitted.payload = {{"result", to_json(result)}, {"outcome", to_json(outcome)}};
        batch.push_back(std::move(submitted));

        if (!outcome.rollback_applied.empty()) {
            EventRecord rollback;
            rollback.sequence_no = ++seq;
            rollback.timestamp_ms = opt_.clock();
            rollback.kind = EventKind::rollback_applied;
            rollback.payload = {{"feature_id", result.feature_id},
                                {"affected", outcome.rollback_applied},
                                {"delta", opt_.config.stagnation_delta},
                                {"session_ordinal", outcome.session_ordinal}};
            batch.push_back(std::move(rollback));
        }
        for (const std::string& fid : outcome.newly_opened) {
            EventRecord opened;
            opened.sequence_no = ++seq;
            opened.timestamp_ms = opt_.clock();
            opened.kind = EventKind::feature_opened;
            opened.payload = {{"feature_id", fid},
                              {"session_ordinal", outcome.session_ordinal}};
            batch.push_back(std::move(opened));
        }

        rec.log->append(batch);
        rec.last_seq = seq;
        for (EventRecord& e : batch)
            rec.events.push_back(std::move(e));
        rec.profile = std::move(scratch);
        return outcome;
    }

    /// Events with sequence_no > since, in order.
    std::vector<EventRecord> events_since(const std::string& student_id,
                                          std::int64_t since) const {
        StudentRec& rec = student(student_id);
        std::scoped_lock lock(rec.mu);
        std::vector<EventRecord> out;
        for (const EventRecord& e : rec.events) {
            if (e.sequence_no > since)
                out.push_back(e);
        }
        return out;
    }

    std::filesystem::path student_log_path(const std::string& student_id) const {
        return students_dir() / (student_id + ".jsonl");
    }

    const FeatureGraph& graph(const std::string& graph_id) const {
        return model_for(graph_id)->graph;
    }

    std::vector<std::string> student_ids() const {
        std::shared_lock lock(registry_mu_);
        std::vector<std::string> out;
        for (const auto& [id, rec] : students_)
            out.push_back(id);
        return out;
    }

private:
    struct Model {
        FeatureGraph graph;
        Lexicon lexicon;
    };

    struct StudentRec {
        mutable std::mutex mu;
        std::shared_ptr<const Model> model;
        StudentProfile profile;
        std::int64_t last_seq = 0;
        std::vector<EventRecord> events;
        std::unique_ptr<EventLogWriter> log;
    };

    std::filesystem::path models_dir() const { return opt_.data_dir / "models"; }
    std::filesystem::path students_dir() const { return opt_.data_dir / "students"; }

    static std::string sanitize(const std::string& id) {
        std::string out;
        for (char c : id) {
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')
                out += c;
            else {
                char buf[4];
                std::snprintf(buf, sizeof buf, "%%%02x", static_cast<unsigned char>(c));
                out += buf;
            }
        }
        return out;
    }

    std::shared_ptr<const Model> model_for(const std::string& graph_id) const {
        std::shared_lock lock(registry_mu_);
        auto it = models_.find(graph_id);
        if (it == models_.end())
            fail(ErrorCode::unknown_graph, "no registered graph \"" + graph_id + "\"");
        return it->second;
    }

    StudentRec& student(const std::string& student_id) const {
        std::shared_lock lock(registry_mu_);
        auto it = students_.find(student_id);
        if (it == students_.end())
            fail(ErrorCode::unknown_student, "no student \"" + student_id + "\"");
        return *it->second;
    }

    std::string next_student_id() {
        char buf[16];
        std::snprintf(buf, sizeof buf, "s%06d", ++student_counter_);
        return buf;
    }

    void recover() {
        namespace fs = std::filesystem;
        std::vector<fs::path> model_files;
        for (const auto& entry : fs::directory_iterator(models_dir()))
            if (entry.is_regular_file())
                model_files.push_back(entry.path());
        std::sort(model_files.begin(), model_files.end());
        for (const fs::path& file : model_files) {
            std::ifstream in(file);
            std::string bytes((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
            jsonx::json doc = jsonx::parse_bytes(bytes, file.string());
            FeatureGraph graph =
                FeatureGraph::from_document(jsonx::require(doc, "graph", file.string()));
            Lexicon lexicon = Lexicon::from_document(
                jsonx::require(doc, "lexicon", file.string()), graph);
            std::string graph_id = graph.graph_id();
            models_.emplace(graph_id,
                            std::make_shared<Model>(Model{std::move(graph), std::move(lexicon)}));
        }

        std::vector<fs::path> logs;
        for (const auto& entry : fs::directory_iterator(students_dir()))
            if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
                logs.push_back(entry.path());
        std::sort(logs.begin(), logs.end());
        for (const fs::path& file : logs) {
            std::vector<EventRecord> events = read_event_log(file);
            if (events.empty())
                continue;
            std::string student_id = file.stem().string();
            auto rec = std::make_unique<StudentRec>();
            rec->profile = replay_events(
                events,
                [this](const std::string& gid) -> const FeatureGraph& {
                    auto it = models_.find(gid);
                    if (it == models_.end())
                        fail(ErrorCode::unknown_graph,
                             "event log references unregistered graph \"" + gid + "\"");
                    return it->second->graph;
                },
                opt_.config);
            rec->model = models_.at(rec->profile.graph_id);
            rec->last_seq = events.back().sequence_no;
            rec->events = std::move(events);
            rec->log = std::make_unique<EventLogWriter>(file, opt_.fsync_on_append);
            if (student_id.size() > 1 && student_id[0] == 's')
                student_counter_ = std::max(student_counter_,
                                            std::atoi(student_id.c_str() + 1));
            students_.emplace(student_id, std::move(rec));
        }
    }

    EngineOptions opt_;
    mutable std::shared_mutex registry_mu_;
    std::map<std::string, std::shared_ptr<const Model>> models_;
    std::map<std::string, std::unique_ptr<StudentRec>> students_;
    int student_counter_ = 0;
};

} // namespace readapt
