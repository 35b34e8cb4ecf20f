#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include <httplib.h>

#include "readapt/engine.hpp"
#include "readapt/json_util.hpp"

namespace readapt {

namespace detail {

inline int http_status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::unknown_graph:
    case ErrorCode::unknown_student:
    case ErrorCode::unknown_feature:
        return 404;
    case ErrorCode::duplicate_model:
    case ErrorCode::no_playable_feature:
    case ErrorCode::no_content_for_feature:
    case ErrorCode::feature_not_open:
        return 409;
    case ErrorCode::empty_session:
    case ErrorCode::invalid_age:
        return 422;
    case ErrorCode::io_error:
        return 500;
    default:
        return 400;
    }
}

inline void send_json(httplib::Response& res, int status, const jsonx::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
    send_json(res, http_status_for(code),
              {{"error", {{"code", to_string(code)}, {"message", message}}}});
}

} // namespace detail

/// Wires an Engine to HTTP routes. The returned server is not yet listening;
/// callers start it with listen()/listen_after_bind().
class Service {
public:
    explicit Service(Engine& engine) : engine_(engine) { install_routes(); }

    httplib::Server& server() { return server_; }

private:
    template <typename Fn>
    void guarded(httplib::Response& res, Fn&& fn) {
        try {
            fn();
        } catch (const DomainError& e) {
            detail::send_error(res, e.code(), e.what());
        } catch (const std::exception& e) {
            detail::send_error(res, ErrorCode::io_error, e.what());
        }
    }

    void install_routes() {
        server_.Post("/models", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                jsonx::json body = jsonx::parse_bytes(req.body, "request body");
                jsonx::check_keys(jsonx::as_object(body, "request body"),
                                  {"graph", "lexicon"}, "request body");
                auto [graph_id, lexicon_id] = engine_.register_model(
                    jsonx::require(body, "graph", "request body"),
                    jsonx::require(body, "lexicon", "request body"));
                detail::send_json(res, 201,
                                  {{"graph_id", graph_id}, {"lexicon_id", lexicon_id}});
            });
        });

        server_.Post("/students", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                jsonx::json body = jsonx::parse_bytes(req.body, "request body");
                const auto& obj = jsonx::as_object(body, "request body");
                jsonx::check_keys(obj, {"graph_id", "age_level"}, "request body");
                std::string graph_id = jsonx::req_string(body, "graph_id", "request body");
                int age_level =
                    static_cast<int>(jsonx::req_int(body, "age_level", "request body"));
                std::string student_id = engine_.create_student(graph_id, age_level);
                detail::send_json(res, 201, {{"student_id", student_id}});
            });
        });

        // Specific student routes go first; the bare snapshot route would
        // otherwise swallow them.
        server_.Get("/students/([^/]+)/next-session",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        guarded(res, [&] {
                            SessionPlan plan = engine_.plan_next_session(req.matches[1]);
                            detail::send_json(res, 200, to_json(plan));
                        });
                    });

        server_.Get("/students/([^/]+)/events",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        guarded(res, [&] {
                            std::int64_t since = 0;
                            if (req.has_param("since")) {
                                try {
                                    since = std::stoll(req.get_param_value("since"));
                                } catch (const std::exception&) {
                                    fail(ErrorCode::malformed_document,
                                         "since must be an integer");
                                }
                            }
                            jsonx::json body = jsonx::json::array();
                            for (const EventRecord& e :
                                 engine_.events_since(req.matches[1], since))
                                body.push_back(to_json(e));
                            detail::send_json(res, 200, body);
                        });
                    });

        server_.Post("/students/([^/]+)/results",
                     [this](const httplib::Request& req, httplib::Response& res) {
                         guarded(res, [&] {
                             jsonx::json body = jsonx::parse_bytes(req.body, "request body");
                             SessionResult result = session_result_from_json(body);
                             SessionOutcome outcome =
                                 engine_.submit_result(req.matches[1], result);
                             detail::send_json(res, 200, to_json(outcome));
                         });
                     });

        server_.Get("/students/([^/]+)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        guarded(res, [&] {
                            detail::send_json(res, 200,
                                              engine_.student_snapshot(req.matches[1]));
                        });
                    });
    }

    Engine& engine_;
    httplib::Server server_;
};

} // namespace readapt
