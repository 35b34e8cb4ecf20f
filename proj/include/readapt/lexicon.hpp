#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "readapt/feature_graph.hpp"
#include "readapt/json_util.hpp"

namespace readapt {

enum class EntryKind { word, sentence };

constexpr std::string_view to_string(EntryKind k) noexcept {
    return k == EntryKind::word ? "word" : "sentence";
}

/// A word or sentence annotated with the features it exercises.
struct LexiconEntry {
    std::string entry_id;
    std::string text;
    EntryKind kind = EntryKind::word;
    std::vector<std::string> feature_ids; // sorted, unique, non-empty
};

/// Feature-indexed content store. Immutable after load; freely shared.
class Lexicon {
public:
    static Lexicon from_bytes(std::string_view bytes, const FeatureGraph& graph) {
        return from_document(jsonx::parse_bytes(bytes, "lexicon document"), graph);
    }

    static Lexicon from_document(const jsonx::json& doc, const FeatureGraph& graph) {
        using namespace jsonx;
        as_object(doc, "lexicon document");
        check_keys(doc, {"lexicon_id", "entries"}, "lexicon document");
        Lexicon lex;
        lex.lexicon_id_ = req_id(doc, "lexicon_id", "lexicon document");

        const json& entries = as_array(require(doc, "entries", "lexicon document"), "entries");
        for (const json& e : entries) {
            LexiconEntry entry = parse_entry(e, graph);
            std::string id = entry.entry_id;
            if (!lex.entries_.emplace(id, std::move(entry)).second)
                fail(ErrorCode::duplicate_entry_id, "entry \"" + id + "\" declared twice");
        }
        lex.build_index();
        return lex;
    }

    const std::string& lexicon_id() const noexcept { return lexicon_id_; }
    const std::map<std::string, LexiconEntry>& entries() const noexcept { return entries_; }

    const LexiconEntry& entry(const std::string& id) const {
        auto it = entries_.find(id);
        if (it == entries_.end())
            fail(ErrorCode::malformed_document, "no entry \"" + id + "\" in lexicon");
        return it->second;
    }

    /// Entry ids annotated with `feature_id`, sorted. Unknown features yield
    /// the empty set; scarcity is the planner's problem, not an error here.
    const std::vector<std::string>& entries_for_feature(const std::string& feature_id) const {
        static const std::vector<std::string> empty;
        auto it = index_.find(feature_id);
        return it == index_.end() ? empty : it->second;
    }

    const std::map<std::string, std::vector<std::string>>& index() const noexcept {
        return index_;
    }

private:
    static LexiconEntry parse_entry(const jsonx::json& e, const FeatureGraph& graph) {
        using namespace jsonx;
        as_object(e, "entry");
        check_keys(e, {"entry_id", "text", "kind", "feature_ids"}, "entry");
        LexiconEntry entry;
        entry.entry_id = req_id(e, "entry_id", "entry");
        const std::string ctx = "entry \"" + entry.entry_id + "\"";
        entry.text = req_string(e, "text", ctx);
        if (entry.text.empty())
            fail(ErrorCode::malformed_document, ctx + ": text must be non-empty");
        std::string kind = req_string(e, "kind", ctx);
        if (kind == "word")
            entry.kind = EntryKind::word;
        else if (kind == "sentence")
            entry.kind = EntryKind::sentence;
        else
            fail(ErrorCode::malformed_document, ctx + ": kind must be \"word\" or \"sentence\"");

        const json& fids = as_array(require(e, "feature_ids", ctx), ctx + ".feature_ids");
        if (fids.empty())
            fail(ErrorCode::malformed_document, ctx + ": feature_ids must be non-empty");
        std::set<std::string> unique;
        for (const json& fid : fids) {
            if (!fid.is_string())
                fail(ErrorCode::malformed_document, ctx + ": feature_ids must be strings");
            std::string f = fid.get<std::string>();
            if (!graph.contains(f))
                fail(ErrorCode::unknown_feature_reference,
                     ctx + " references unknown feature \"" + f + "\"");
            if (!unique.insert(f).second)
                fail(ErrorCode::malformed_document,
                     ctx + ": feature \"" + f + "\" tagged twice");
        }
        entry.feature_ids.assign(unique.begin(), unique.end());
        return entry;
    }

    void build_index() {
        for (const auto& [id, entry] : entries_) {
            for (const std::string& f : entry.feature_ids)
                index_[f].push_back(id);
        }
        // std::map iteration already yields sorted entry ids per feature.
    }

    std::string lexicon_id_;
    std::map<std::string, LexiconEntry> entries_;
    std::map<std::string, std::vector<std::string>> index_;
};

inline jsonx::json to_json(const LexiconEntry& e) {
    return {{"entry_id", e.entry_id},
            {"text", e.text},
            {"kind", std::string(to_string(e.kind))},
            {"feature_ids", e.feature_ids}};
}

} // namespace readapt
