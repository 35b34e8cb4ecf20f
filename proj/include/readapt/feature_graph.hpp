#pragma once

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "readapt/json_util.hpp"

namespace readapt {

enum class FeatureCategory { phonological, syntactic };

constexpr std::string_view to_string(FeatureCategory c) noexcept {
    return c == FeatureCategory::phonological ? "phonological" : "syntactic";
}

/// One atomic language characteristic of the teaching sequence.
struct Feature {
    std::string id;
    std::string label;
    FeatureCategory category = FeatureCategory::phonological;
    int difficulty_rank = 0; // position in the teaching sequence, lower = earlier
    int min_age_level = 0;   // school year at which the feature is first taught
};

/// The language + teaching model: features plus prerequisite edges.
/// Immutable once constructed; all invariants are enforced at load time, so
/// instances can be shared across threads freely.
class FeatureGraph {
public:
    using Edge = std::pair<std::string, std::string>; // prerequisite -> dependent

    static FeatureGraph from_bytes(std::string_view bytes) {
        return from_document(jsonx::parse_bytes(bytes, "graph document"));
    }

    static FeatureGraph from_document(const jsonx::json& doc) {
        using namespace jsonx;
        as_object(doc, "graph document");
        check_keys(doc, {"graph_id", "features", "edges"}, "graph document");
        FeatureGraph g;
        g.graph_id_ = req_id(doc, "graph_id", "graph document");

        const json& features = as_array(require(doc, "features", "graph document"), "features");
        for (const json& f : features) {
            Feature feat = parse_feature(f);
            auto [it, inserted] = g.features_.emplace(feat.id, std::move(feat));
            if (!inserted)
                fail(ErrorCode::duplicate_feature_id, "feature \"" + it->first + "\" declared twice");
        }

        const json& edges = as_array(require(doc, "edges", "graph document"), "edges");
        std::set<Edge> seen;
        for (const json& e : edges) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
                fail(ErrorCode::malformed_document,
                     "edges: each edge must be a [prerequisite_id, dependent_id] pair");
            Edge edge{e[0].get<std::string>(), e[1].get<std::string>()};
            for (const std::string& endpoint : {edge.first, edge.second}) {
                if (!g.features_.count(endpoint))
                    fail(ErrorCode::unknown_feature_in_edge,
                         "edge [" + edge.first + ", " + edge.second +
                             "] names undeclared feature \"" + endpoint + "\"");
            }
            if (edge.first == edge.second)
                fail(ErrorCode::cycle_detected,
                     "cycle: " + edge.first + " -> " + edge.second);
            if (!seen.insert(edge).second)
                fail(ErrorCode::malformed_document,
                     "duplicate edge [" + edge.first + ", " + edge.second + "]");
            g.edges_.push_back(std::move(edge));
        }

        g.build_adjacency();
        g.teaching_order_ = g.compute_teaching_order(); // throws CycleDetected on cycles
        return g;
    }

    const std::string& graph_id() const noexcept { return graph_id_; }
    std::size_t size() const noexcept { return features_.size(); }
    bool contains(const std::string& id) const { return features_.count(id) > 0; }

    const Feature& feature(const std::string& id) const {
        auto it = features_.find(id);
        if (it == features_.end())
            fail(ErrorCode::unknown_feature, "no feature \"" + id + "\" in graph " + graph_id_);
        return it->second;
    }

    /// Keyed by id; iteration order is deterministic (lexicographic).
    const std::map<std::string, Feature>& features() const noexcept { return features_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    /// Immediate prerequisites, sorted by (difficulty_rank, id).
    const std::vector<std::string>& direct_prerequisites(const std::string& id) const {
        feature(id);
        return prereqs_.at(id);
    }

    /// Immediate dependents, sorted by (difficulty_rank, id).
    const std::vector<std::string>& direct_dependents(const std::string& id) const {
        feature(id);
        return dependents_.at(id);
    }

    /// Full ancestor closure of `id`, sorted by (difficulty_rank, id).
    std::vector<std::string> transitive_prerequisites(const std::string& id) const {
        feature(id);
        std::set<std::string> visited;
        std::vector<std::string> stack{id};
        while (!stack.empty()) {
            std::string cur = std::move(stack.back());
            stack.pop_back();
            for (const std::string& p : prereqs_.at(cur)) {
                if (visited.insert(p).second)
                    stack.push_back(p);
            }
        }
        std::vector<std::string> out(visited.begin(), visited.end());
        sort_by_rank(out);
        return out;
    }

    std::vector<std::string> prerequisites_of(const std::string& id, bool transitive) const {
        return transitive ? transitive_prerequisites(id) : direct_prerequisites(id);
    }

    /// A topological order over all features; ties broken by ascending
    /// difficulty_rank, then id. Computed once at load.
    const std::vector<std::string>& teaching_order() const noexcept { return teaching_order_; }

    void sort_by_rank(std::vector<std::string>& ids) const {
        std::sort(ids.begin(), ids.end(), [this](const std::string& a, const std::string& b) {
            const Feature& fa = features_.at(a);
            const Feature& fb = features_.at(b);
            if (fa.difficulty_rank != fb.difficulty_rank)
                return fa.difficulty_rank < fb.difficulty_rank;
            return a < b;
        });
    }

private:
    static Feature parse_feature(const jsonx::json& f) {
        using namespace jsonx;
        as_object(f, "feature");
        check_keys(f, {"id", "label", "category", "difficulty_rank", "min_age_level"}, "feature");
        Feature feat;
        feat.id = req_id(f, "id", "feature");
        const std::string ctx = "feature \"" + feat.id + "\"";
        feat.label = req_string(f, "label", ctx);
        std::string cat = req_string(f, "category", ctx);
        if (cat == "phonological")
            feat.category = FeatureCategory::phonological;
        else if (cat == "syntactic")
            feat.category = FeatureCategory::syntactic;
        else
            fail(ErrorCode::malformed_document,
                 ctx + ": category must be \"phonological\" or \"syntactic\"");
        std::int64_t rank = req_int(f, "difficulty_rank", ctx);
        if (rank < 0)
            fail(ErrorCode::malformed_document, ctx + ": difficulty_rank must be non-negative");
        feat.difficulty_rank = static_cast<int>(rank);
        std::int64_t age = req_int(f, "min_age_level", ctx);
        if (age < 0)
            fail(ErrorCode::malformed_document, ctx + ": min_age_level must be non-negative");
        feat.min_age_level = static_cast<int>(age);
        return feat;
    }

    void build_adjacency() {
        for (const auto& [id, f] : features_) {
            prereqs_[id];
            dependents_[id];
        }
        for (const Edge& e : edges_) {
            prereqs_[e.second].push_back(e.first);
            dependents_[e.first].push_back(e.second);
        }
        for (auto& [id, v] : prereqs_)
            sort_by_rank(v);
        for (auto& [id, v] : dependents_)
            sort_by_rank(v);
    }

    std::vector<std::string> compute_teaching_order() const {
        // Kahn's algorithm with a (rank, id) min-heap for deterministic ties.
        std::map<std::string, int> indegree;
        for (const auto& [id, f] : features_)
            indegree[id] = static_cast<int>(prereqs_.at(id).size());

        auto cmp = [this](const std::string& a, const std::string& b) {
            const Feature& fa = features_.at(a);
            const Feature& fb = features_.at(b);
            if (fa.difficulty_rank != fb.difficulty_rank)
                return fa.difficulty_rank > fb.difficulty_rank;
            return a > b; // invert for a min-heap
        };
        std::priority_queue<std::string, std::vector<std::string>, decltype(cmp)> ready(cmp);
        for (const auto& [id, deg] : indegree) {
            if (deg == 0)
                ready.push(id);
        }

        std::vector<std::string> order;
        order.reserve(features_.size());
        while (!ready.empty()) {
            std::string id = ready.top();
            ready.pop();
            order.push_back(id);
            for (const std::string& dep : dependents_.at(id)) {
                if (--indegree[dep] == 0)
                    ready.push(dep);
            }
        }
        if (order.size() != features_.size())
            fail(ErrorCode::cycle_detected, "cycle: " + find_cycle(indegree));
        return order;
    }

    /// Locate one concrete cycle among the nodes Kahn's algorithm left behind.
    std::string find_cycle(const std::map<std::string, int>& indegree) const {
        std::set<std::string> remaining;
        for (const auto& [id, deg] : indegree) {
            if (deg > 0)
                remaining.insert(id);
        }
        // Walk prerequisite links inside the remainder until a node repeats.
        std::vector<std::string> path;
        std::map<std::string, std::size_t> pos;
        std::string cur = *remaining.begin();
        while (!pos.count(cur)) {
            pos[cur] = path.size();
            path.push_back(cur);
            for (const std::string& p : prereqs_.at(cur)) {
                if (remaining.count(p)) {
                    cur = p;
                    break;
                }
            }
        }
        std::string out = cur;
        for (std::size_t i = path.size(); i-- > pos[cur];)
            out += " -> " + path[i];
        return out;
    }

    std::string graph_id_;
    std::map<std::string, Feature> features_;
    std::vector<Edge> edges_;
    std::map<std::string, std::vector<std::string>> prereqs_;
    std::map<std::string, std::vector<std::string>> dependents_;
    std::vector<std::string> teaching_order_;
};

} // namespace readapt
