#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace readapt {

/// Typed failure classes surfaced by every operation. The HTTP layer and the
/// CLI map these to status codes / exit codes; tests assert on them.
enum class ErrorCode {
    malformed_document,
    duplicate_feature_id,
    unknown_feature_in_edge,
    cycle_detected,
    unknown_feature,
    unknown_graph,
    unknown_student,
    duplicate_model,
    duplicate_entry_id,
    unknown_feature_reference,
    invalid_config,
    invalid_age,
    empty_session,
    feature_not_open,
    no_playable_feature,
    no_content_for_feature,
    invalid_shape_parameters,
    corrupt_log,
    io_error,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::malformed_document: return "MalformedDocument";
    case ErrorCode::duplicate_feature_id: return "DuplicateFeatureId";
    case ErrorCode::unknown_feature_in_edge: return "UnknownFeatureInEdge";
    case ErrorCode::cycle_detected: return "CycleDetected";
    case ErrorCode::unknown_feature: return "UnknownFeature";
    case ErrorCode::unknown_graph: return "UnknownGraph";
    case ErrorCode::unknown_student: return "UnknownStudent";
    case ErrorCode::duplicate_model: return "DuplicateModel";
    case ErrorCode::duplicate_entry_id: return "DuplicateEntryId";
    case ErrorCode::unknown_feature_reference: return "UnknownFeatureReference";
    case ErrorCode::invalid_config: return "InvalidConfig";
    case ErrorCode::invalid_age: return "InvalidAge";
    case ErrorCode::empty_session: return "EmptySession";
    case ErrorCode::feature_not_open: return "FeatureNotOpen";
    case ErrorCode::no_playable_feature: return "NoPlayableFeature";
    case ErrorCode::no_content_for_feature: return "NoContentForFeature";
    case ErrorCode::invalid_shape_parameters: return "InvalidShapeParameters";
    case ErrorCode::corrupt_log: return "CorruptLog";
    case ErrorCode::io_error: return "IoError";
    }
    return "UnknownError";
}

/// Inverse of to_string; io_error for anything unrecognized so remote errors
/// stay errors.
inline ErrorCode error_code_from_string(std::string_view name) noexcept {
    for (int i = 0; i <= static_cast<int>(ErrorCode::io_error); ++i) {
        auto code = static_cast<ErrorCode>(i);
        if (to_string(code) == name)
            return code;
    }
    return ErrorCode::io_error;
}

class DomainError : public std::runtime_error {
public:
    DomainError(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw DomainError(code, message);
}

} // namespace readapt
