#pragma once

#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <readapt/readapt.hpp>

namespace testsup {

using readapt::jsonx::json;

/// Self-deleting scratch directory for fixture and log files.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

/// Runs fn and returns the DomainError code it throws; fails the test when
/// nothing is thrown.
template <typename Fn>
readapt::ErrorCode error_of(Fn&& fn) {
    try {
        fn();
    } catch (const readapt::DomainError& e) {
        return e.code();
    }
    throw std::runtime_error("expected a DomainError, got none");
}

json feature_json(const std::string& id, int rank, int min_age = 1,
                  const std::string& category = "phonological");

json graph_doc(const std::string& graph_id, std::vector<json> features,
               const std::vector<std::pair<std::string, std::string>>& edges);

/// a(rank 0, age 1) -> b(rank 1, age 2) -> c(rank 2, age 3).
json chain_doc();

/// a -> {b, c} -> d, all ranks 0.
json diamond_doc();

/// A lexicon with `per_feature` word entries tagged per feature of the graph.
json lexicon_doc_for(const json& graph_document, int per_feature,
                     const std::string& lexicon_id = "lex");

/// Brute-force restatement of the unlock rule, independent of apply_unlocks.
std::vector<std::string> oracle_unlocks(const readapt::StudentProfile& profile,
                                        const readapt::FeatureGraph& graph,
                                        const readapt::MasteryScale& scale);

/// Random DAG document over a shuffled topological order; n in [1, max_nodes].
/// Built here from scratch so library fixtures have an independent check.
json random_dag_doc(std::mt19937_64& rng, int max_nodes);

/// Random but internally consistent profile over the graph: masteries in
/// range, locked features at minimum, plausible use counts.
readapt::StudentProfile random_profile(std::mt19937_64& rng, const readapt::FeatureGraph& graph,
                                       const readapt::MasteryScale& scale);

} // namespace testsup
