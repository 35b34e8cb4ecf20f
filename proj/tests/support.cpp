#include "support.hpp"

#include <cstdlib>
#include <cstring>

namespace testsup {

TempDir::TempDir() {
    char buf[] = "/tmp/readapt-test-XXXXXX";
    if (::mkdtemp(buf) == nullptr)
        throw std::runtime_error("mkdtemp failed");
    path_ = buf;
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

json feature_json(const std::string& id, int rank, int min_age, const std::string& category) {
    return {{"id", id},
            {"label", "feature " + id},
            {"category", category},
            {"difficulty_rank", rank},
            {"min_age_level", min_age}};
}

json graph_doc(const std::string& graph_id, std::vector<json> features,
               const std::vector<std::pair<std::string, std::string>>& edges) {
    json edge_array = json::array();
    for (const auto& [p, d] : edges)
        edge_array.push_back({p, d});
    return {{"graph_id", graph_id},
            {"features", std::move(features)},
            {"edges", std::move(edge_array)}};
}

json chain_doc() {
    return graph_doc("chain3",
                     {feature_json("a", 0, 1), feature_json("b", 1, 2), feature_json("c", 2, 3)},
                     {{"a", "b"}, {"b", "c"}});
}

json diamond_doc() {
    return graph_doc("diamond4",
                     {feature_json("a", 0), feature_json("b", 0), feature_json("c", 0),
                      feature_json("d", 0)},
                     {{"a", "b"}, {"a", "c"}, {"b", "d"}, {"c", "d"}});
}

json lexicon_doc_for(const json& graph_document, int per_feature,
                     const std::string& lexicon_id) {
    json entries = json::array();
    int k = 0;
    for (const json& f : graph_document.at("features")) {
        std::string fid = f.at("id").get<std::string>();
        for (int i = 0; i < per_feature; ++i, ++k) {
            char id_buf[16];
            std::snprintf(id_buf, sizeof id_buf, "w%04d", k);
            entries.push_back({{"entry_id", std::string(id_buf)},
                               {"text", "tok" + std::to_string(k)},
                               {"kind", "word"},
                               {"feature_ids", json::array({fid})}});
        }
    }
    return {{"lexicon_id", lexicon_id}, {"entries", std::move(entries)}};
}

std::vector<std::string> oracle_unlocks(const readapt::StudentProfile& profile,
                                        const readapt::FeatureGraph& graph,
                                        const readapt::MasteryScale& scale) {
    // Fixpoint restated over the raw edge list. Opened features take
    // init_open, which can cascade when init_open equals the pass threshold.
    std::map<std::string, double> mastery;
    std::set<std::string> locked;
    for (const auto& [id, st] : profile.states) {
        mastery[id] = st.mastery;
        if (st.status == readapt::FeatureStatus::locked)
            locked.insert(id);
    }
    std::vector<std::string> out;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = locked.begin(); it != locked.end();) {
            bool ready = true;
            for (const auto& [p, d] : graph.edges()) {
                if (d == *it && mastery.at(p) < scale.pass_threshold)
                    ready = false;
            }
            if (ready) {
                mastery[*it] = scale.init_open;
                out.push_back(*it);
                it = locked.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
    }
    std::sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
        int ra = graph.feature(a).difficulty_rank;
        int rb = graph.feature(b).difficulty_rank;
        return ra != rb ? ra < rb : a < b;
    });
    return out;
}

json random_dag_doc(std::mt19937_64& rng, int max_nodes) {
    int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_nodes));
    std::vector<json> features;
    for (int i = 0; i < n; ++i) {
        char id_buf[8];
        std::snprintf(id_buf, sizeof id_buf, "n%02d", i);
        int rank = static_cast<int>(rng() % 6); // ties on purpose
        features.push_back(feature_json(id_buf, rank, 1 + static_cast<int>(rng() % 4)));
    }
    std::vector<std::pair<std::string, std::string>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng() % 100 < 35)
                edges.emplace_back(features[i].at("id").get<std::string>(),
                                   features[j].at("id").get<std::string>());
        }
    }
    return graph_doc("rnd" + std::to_string(rng() % 100000), std::move(features), edges);
}

readapt::StudentProfile random_profile(std::mt19937_64& rng, const readapt::FeatureGraph& graph,
                                       const readapt::MasteryScale& scale) {
    using readapt::FeatureStatus;
    readapt::StudentProfile p;
    p.student_id = "rand";
    p.graph_id = graph.graph_id();
    p.session_counter = static_cast<int>(rng() % 40);
    for (const auto& [id, f] : graph.features()) {
        readapt::FeatureState st;
        switch (rng() % 3) {
        case 0:
            st.status = FeatureStatus::locked;
            st.mastery = scale.min;
            break;
        case 1:
            st.status = FeatureStatus::open;
            st.mastery = scale.min + (scale.max - scale.min) *
                                         (static_cast<double>(rng() % 1000) / 999.0);
            break;
        default:
            st.status = FeatureStatus::mastered;
            st.mastery = scale.max;
            break;
        }
        if (st.status != FeatureStatus::locked && rng() % 2 == 0) {
            st.use_count = 1 + static_cast<int>(rng() % 5);
            if (p.session_counter > 0)
                st.last_used_session = 1 + static_cast<int>(
                                               rng() % static_cast<std::uint64_t>(
                                                           p.session_counter));
            else
                st.last_used_session = 0;
            st.last_score = 10.0 * (static_cast<double>(rng() % 1000) / 999.0);
        }
        p.states.emplace(id, st);
    }
    return p;
}

} // namespace testsup
