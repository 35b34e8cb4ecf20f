#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "readapt/errors.hpp"

namespace readapt::jsonx {

using nlohmann::json;

inline std::string ctx_str(std::string_view ctx) { return std::string(ctx); }

/// Parse raw bytes; MalformedDocument on syntax errors.
inline json parse_bytes(std::string_view bytes, std::string_view what) {
    json doc = json::parse(bytes, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded())
        fail(ErrorCode::malformed_document, ctx_str(what) + ": not valid JSON");
    return doc;
}

inline const json& as_object(const json& value, std::string_view ctx) {
    if (!value.is_object())
        fail(ErrorCode::malformed_document, ctx_str(ctx) + ": expected a JSON object");
    return value;
}

inline const json& as_array(const json& value, std::string_view ctx) {
    if (!value.is_array())
        fail(ErrorCode::malformed_document, ctx_str(ctx) + ": expected a JSON array");
    return value;
}

/// Strict mode: any key outside `allowed` is an authoring error.
inline void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                       std::string_view ctx) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (auto k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known)
            fail(ErrorCode::malformed_document,
                 ctx_str(ctx) + ": unknown key \"" + it.key() + "\"");
    }
}

inline const json* find(const json& obj, std::string_view key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null())
        return nullptr;
    return &*it;
}

inline const json& require(const json& obj, std::string_view key, std::string_view ctx) {
    const json* v = find(obj, key);
    if (v == nullptr)
        fail(ErrorCode::malformed_document,
             ctx_str(ctx) + ": missing required key \"" + ctx_str(key) + "\"");
    return *v;
}

inline std::string req_string(const json& obj, std::string_view key, std::string_view ctx) {
    const json& v = require(obj, key, ctx);
    if (!v.is_string())
        fail(ErrorCode::malformed_document,
             ctx_str(ctx) + ": \"" + ctx_str(key) + "\" must be a string");
    return v.get<std::string>();
}

/// Non-empty string, for identifiers.
inline std::string req_id(const json& obj, std::string_view key, std::string_view ctx) {
    std::string s = req_string(obj, key, ctx);
    if (s.empty())
        fail(ErrorCode::malformed_document,
             ctx_str(ctx) + ": \"" + ctx_str(key) + "\" must be non-empty");
    return s;
}

inline std::int64_t req_int(const json& obj, std::string_view key, std::string_view ctx) {
    const json& v = require(obj, key, ctx);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        fail(ErrorCode::malformed_document,
             ctx_str(ctx) + ": \"" + ctx_str(key) + "\" must be an integer");
    return v.get<std::int64_t>();
}

inline double req_double(const json& obj, std::string_view key, std::string_view ctx) {
    const json& v = require(obj, key, ctx);
    if (!v.is_number())
        fail(ErrorCode::malformed_document,
             ctx_str(ctx) + ": \"" + ctx_str(key) + "\" must be a number");
    return v.get<double>();
}

inline bool req_bool(const json& obj, std::string_view key, std::string_view ctx) {
    const json& v = require(obj, key, ctx);
    if (!v.is_boolean())
        fail(ErrorCode::malformed_document,
             ctx_str(ctx) + ": \"" + ctx_str(key) + "\" must be a boolean");
    return v.get<bool>();
}

inline std::int64_t opt_int(const json& obj, std::string_view key, std::int64_t fallback,
                            std::string_view ctx) {
    return find(obj, key) ? req_int(obj, key, ctx) : fallback;
}

inline double opt_double(const json& obj, std::string_view key, double fallback,
                         std::string_view ctx) {
    return find(obj, key) ? req_double(obj, key, ctx) : fallback;
}

inline bool opt_bool(const json& obj, std::string_view key, bool fallback, std::string_view ctx) {
    return find(obj, key) ? req_bool(obj, key, ctx) : fallback;
}

inline std::string opt_string(const json& obj, std::string_view key, std::string fallback,
                              std::string_view ctx) {
    return find(obj, key) ? req_string(obj, key, ctx) : std::move(fallback);
}

} // namespace readapt::jsonx
