#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace readapt;
using testsup::error_of;
using json = jsonx::json;
using Catch::Matchers::WithinAbs;

namespace {

json entry_json(const std::string& id, const std::string& text, const std::string& kind,
                std::vector<std::string> fids) {
    return {{"entry_id", id}, {"text", text}, {"kind", kind}, {"feature_ids", fids}};
}

std::vector<std::string> ids_of(const std::vector<Candidate>& cands) {
    std::vector<std::string> out;
    for (const Candidate& c : cands)
        out.push_back(c.feature_id);
    return out;
}

// Restatement of the library shuffle so a silent generator change shows up.
std::vector<std::string> shuffle_cut_oracle(std::vector<std::string> ids, int n,
                                            std::uint64_t seed) {
    std::uint64_t state = seed != 0 ? seed : 0x9e3779b97f4a7c15ULL;
    auto next = [&state] {
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        return state * 0x2545f4914f6cdd1dULL;
    };
    for (std::size_t i = ids.size() - 1; i > 0; --i)
        std::swap(ids[i], ids[next() % (i + 1)]);
    if (ids.size() > static_cast<std::size_t>(n))
        ids.resize(static_cast<std::size_t>(n));
    return ids;
}

} // namespace

TEST_CASE("open features are ordered by rank, use count, then id", "[planner]") {
    AdaptationConfig cfg;
    json doc = testsup::graph_doc(
        "flat", {testsup::feature_json("a", 0), testsup::feature_json("b", 1)}, {});
    FeatureGraph g = FeatureGraph::from_document(doc);
    StudentProfile p = instantiate_profile(g, "s1", 1, cfg.scale);

    auto cands = candidate_features(p, g, cfg);
    CHECK(ids_of(cands) == std::vector<std::string>{"a", "b"});
    CHECK(cands[0].rule_trace == std::vector<std::string>{rules::ease_order});

    SECTION("lower use count wins inside a rank") {
        json tie = testsup::graph_doc(
            "tie", {testsup::feature_json("a", 0), testsup::feature_json("b", 0)}, {});
        FeatureGraph h = FeatureGraph::from_document(tie);
        StudentProfile q = instantiate_profile(h, "s1", 1, cfg.scale);
        q.session_counter = 8;
        q.states.at("a").use_count = 2;
        q.states.at("a").last_used_session = 2; // outside the recent window
        q.states.at("a").last_score = 8.0;
        CHECK(ids_of(candidate_features(q, h, cfg)) == std::vector<std::string>{"b", "a"});
    }
}

TEST_CASE("mastered features resurface after the reopen gap", "[planner]") {
    AdaptationConfig cfg;
    FeatureGraph g = FeatureGraph::from_document(testsup::chain_doc());
    StudentProfile p = instantiate_profile(g, "s1", 9, cfg.scale); // everything mastered
    p.states.at("a").use_count = 1;
    p.states.at("b").use_count = 1;
    p.states.at("c").use_count = 1;

    SECTION("inside the gap nothing is playable") {
        p.session_counter = 9;
        for (auto& [id, st] : p.states)
            st.last_used_session = 0;
        CHECK(error_of([&] { candidate_features(p, g, cfg); }) ==
              ErrorCode::no_playable_feature);
    }
    SECTION("at the gap the stalest feature leads") {
        p.session_counter = 20;
        p.states.at("a").last_used_session = 10; // staleness 10, exactly at the gap
        p.states.at("b").last_used_session = 5;  // staleness 15
        p.states.at("c").last_used_session = 12; // staleness 8, too fresh
        auto cands = candidate_features(p, g, cfg);
        CHECK(ids_of(cands) == std::vector<std::string>{"b", "a"});
        CHECK(cands[0].rule_trace == std::vector<std::string>{rules::reopen});
    }
    SECTION("never-played mastered features count from session zero") {
        // Knowledge assumed from the age level comes up for reinforcement too.
        p.session_counter = cfg.reopen_gap_sessions;
        for (auto& [id, st] : p.states) {
            st.use_count = 0;
            st.last_used_session.reset();
        }
        auto cands = candidate_features(p, g, cfg);
        CHECK(ids_of(cands) == std::vector<std::string>{"a", "b", "c"}); // staleness ties -> id
    }
    SECTION("reopened work precedes open work") {
        p.session_counter = 20;
        p.states.at("a").last_used_session = 1; // staleness 19
        p.states.at("b").status = FeatureStatus::open;
        p.states.at("b").mastery = 6.0;
        p.states.at("b").last_used_session = 20;
        p.states.at("b").last_score = 6.0;
        p.states.at("c").last_used_session = 15; // staleness 5, not eligible
        CHECK(ids_of(candidate_features(p, g, cfg)) == std::vector<std::string>{"a", "b"});
    }
}

TEST_CASE("recent failures are demoted to the tail", "[planner]") {
    AdaptationConfig cfg;
    json doc = testsup::graph_doc(
        "flat", {testsup::feature_json("a", 0), testsup::feature_json("b", 1)}, {});
    FeatureGraph g = FeatureGraph::from_document(doc);
    StudentProfile p = instantiate_profile(g, "s1", 1, cfg.scale);
    p.session_counter = 5;
    p.states.at("a").use_count = 1;
    p.states.at("a").last_used_session = 5;
    p.states.at("a").last_score = 3.0;

    auto cands = candidate_features(p, g, cfg);
    CHECK(ids_of(cands) == std::vector<std::string>{"b", "a"});
    CHECK(cands[1].rule_trace ==
          std::vector<std::string>{rules::recent_failure_demotion, rules::ease_order});

    SECTION("the recent window is inclusive") {
        p.states.at("a").last_used_session = 2; // exactly recent_window_sessions ago
        CHECK(ids_of(candidate_features(p, g, cfg)) == std::vector<std::string>{"b", "a"});
        p.states.at("a").last_used_session = 1; // one session older
        CHECK(ids_of(candidate_features(p, g, cfg)) == std::vector<std::string>{"a", "b"});
    }
    SECTION("a score at the threshold is not a failure") {
        p.states.at("a").last_score = 5.0;
        CHECK(ids_of(candidate_features(p, g, cfg)) == std::vector<std::string>{"a", "b"});
    }
}

TEST_CASE("candidates cover exactly the playable features in rule order", "[planner]") {
    AdaptationConfig cfg;
    std::mt19937_64 rng(271828);
    for (int trial = 0; trial < 100; ++trial) {
        FeatureGraph g = FeatureGraph::from_document(testsup::random_dag_doc(rng, 15));
        StudentProfile p = testsup::random_profile(rng, g, cfg.scale);

        // Oracle: rebuild the three bands from the rule text.
        std::vector<std::string> reopen, fresh, demoted;
        for (const auto& [id, st] : p.states) {
            int staleness = p.session_counter - st.last_used_session.value_or(0);
            if (st.status == FeatureStatus::mastered && staleness >= cfg.reopen_gap_sessions) {
                reopen.push_back(id);
            } else if (st.status == FeatureStatus::open) {
                bool failed = st.last_used_session && st.last_score &&
                              p.session_counter - *st.last_used_session <=
                                  cfg.recent_window_sessions &&
                              *st.last_score < cfg.fail_score_threshold;
                (failed ? demoted : fresh).push_back(id);
            }
        }
        std::sort(reopen.begin(), reopen.end(), [&](const auto& a, const auto& b) {
            int sa = p.session_counter - p.states.at(a).last_used_session.value_or(0);
            int sb = p.session_counter - p.states.at(b).last_used_session.value_or(0);
            return sa != sb ? sa > sb : a < b;
        });
        auto ease = [&](const std::string& a, const std::string& b) {
            int ra = g.feature(a).difficulty_rank, rb = g.feature(b).difficulty_rank;
            if (ra != rb)
                return ra < rb;
            int ua = p.states.at(a).use_count, ub = p.states.at(b).use_count;
            return ua != ub ? ua < ub : a < b;
        };
        std::sort(fresh.begin(), fresh.end(), ease);
        std::sort(demoted.begin(), demoted.end(), ease);
        std::vector<std::string> want = reopen;
        want.insert(want.end(), fresh.begin(), fresh.end());
        want.insert(want.end(), demoted.begin(), demoted.end());

        if (want.empty()) {
            CHECK(error_of([&] { candidate_features(p, g, cfg); }) ==
                  ErrorCode::no_playable_feature);
            continue;
        }
        auto cands = candidate_features(p, g, cfg);
        CHECK(ids_of(cands) == want);
        for (const Candidate& c : cands) {
            REQUIRE_FALSE(c.rule_trace.empty());
            if (p.states.at(c.feature_id).status == FeatureStatus::mastered)
                CHECK(c.rule_trace.front() == rules::reopen);
            else
                CHECK(c.rule_trace.back() == rules::ease_order);
        }
    }
}

TEST_CASE("first play practises accuracy, every later play automaticity", "[planner]") {
    FeatureState st;
    st.use_count = 0;
    CHECK(select_game_type(st) == GameType::accuracy);
    st.use_count = 1;
    CHECK(select_game_type(st) == GameType::automaticity);
    st.use_count = 100;
    CHECK(select_game_type(st) == GameType::automaticity);
}

TEST_CASE("content selection is a seeded shuffle and cut", "[planner]") {
    FeatureGraph g = FeatureGraph::from_document(testsup::chain_doc());
    Lexicon lex = Lexicon::from_document(testsup::lexicon_doc_for(testsup::chain_doc(), 10), g);
    const std::vector<std::string>& pool = lex.entries_for_feature("a");
    REQUIRE(pool.size() == 10);

    SECTION("picks n distinct entries from the feature's pool") {
        auto picked = select_content(lex, "a", 3, 7);
        REQUIRE(picked.size() == 3);
        std::set<std::string> seen;
        for (const LexiconEntry& e : picked) {
            CHECK(std::find(pool.begin(), pool.end(), e.entry_id) != pool.end());
            CHECK(seen.insert(e.entry_id).second);
        }
    }
    SECTION("matches the pinned generator") {
        for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0x9e3779b97f4a7c15ULL}) {
            auto picked = select_content(lex, "a", 4, seed);
            auto want = shuffle_cut_oracle(pool, 4, seed);
            REQUIRE(picked.size() == want.size());
            for (std::size_t i = 0; i < want.size(); ++i)
                CHECK(picked[i].entry_id == want[i]);
        }
    }
    SECTION("seed zero is remapped, not degenerate") {
        auto z = select_content(lex, "a", 5, 0);
        auto r = select_content(lex, "a", 5, 0x9e3779b97f4a7c15ULL);
        REQUIRE(z.size() == r.size());
        for (std::size_t i = 0; i < z.size(); ++i)
            CHECK(z[i].entry_id == r[i].entry_id);
    }
    SECTION("undersupply returns the whole pool, shuffled") {
        auto picked = select_content(lex, "a", 25, 3);
        REQUIRE(picked.size() == 10);
        std::set<std::string> seen;
        for (const LexiconEntry& e : picked)
            seen.insert(e.entry_id);
        CHECK(seen == std::set<std::string>(pool.begin(), pool.end()));
    }
    SECTION("same seed same pick, and the pick is stable across calls") {
        auto a1 = select_content(lex, "a", 6, 99);
        auto a2 = select_content(lex, "a", 6, 99);
        REQUIRE(a1.size() == a2.size());
        for (std::size_t i = 0; i < a1.size(); ++i)
            CHECK(a1[i].entry_id == a2[i].entry_id);
    }
    SECTION("errors") {
        CHECK(error_of([&] { select_content(lex, "a", 0, 1); }) == ErrorCode::invalid_config);
        CHECK(error_of([&] { select_content(lex, "ghost", 3, 1); }) ==
              ErrorCode::no_content_for_feature);
    }
}

TEST_CASE("content seeds vary per student and session but are stable", "[planner]") {
    AdaptationConfig cfg;
    CHECK(content_seed(cfg, "s1", 1) == content_seed(cfg, "s1", 1));
    CHECK(content_seed(cfg, "s1", 1) != content_seed(cfg, "s1", 2));
    CHECK(content_seed(cfg, "s1", 1) != content_seed(cfg, "s2", 1));
    AdaptationConfig other;
    other.selection_seed = 1;
    CHECK(content_seed(cfg, "s1", 1) != content_seed(other, "s1", 1));
}

TEST_CASE("planning is read-only and repeatable", "[planner]") {
    AdaptationConfig cfg;
    FeatureGraph g = FeatureGraph::from_document(testsup::chain_doc());
    Lexicon lex = Lexicon::from_document(testsup::lexicon_doc_for(testsup::chain_doc(), 8), g);
    StudentProfile p = instantiate_profile(g, "s1", 2, cfg.scale);
    json before = to_json(p);

    SessionPlan plan1 = plan_session(p, g, lex, cfg);
    SessionPlan plan2 = plan_session(p, g, lex, cfg);
    CHECK(to_json(plan1) == to_json(plan2));
    CHECK(to_json(p) == before);

    CHECK(plan1.student_id == "s1");
    CHECK(plan1.session_ordinal == 1);
    CHECK(plan1.feature_id == "b"); // the only open feature
    CHECK(plan1.game_type == GameType::accuracy);
    CHECK(plan1.content.size() == 7); // default batch size
    CHECK(plan1.rule_trace ==
          std::vector<std::string>{rules::ease_order, rules::accuracy_first,
                                   rules::content_filter});

    SECTION("the serialized plan carries only presentation fields per entry") {
        json doc = to_json(plan1);
        CHECK(doc["feature_id"] == "b");
        CHECK(doc["game_type"] == "accuracy");
        for (const json& e : doc["content"]) {
            CHECK(e.contains("entry_id"));
            CHECK(e.contains("text"));
            CHECK(e.contains("kind"));
            CHECK_FALSE(e.contains("feature_ids"));
        }
    }
    SECTION("a played feature plans automaticity") {
        p.states.at("b").use_count = 4;
        p.states.at("b").last_used_session = 1;
        p.states.at("b").last_score = 9.0;
        p.session_counter = 6;
        SessionPlan plan = plan_session(p, g, lex, cfg);
        CHECK(plan.game_type == GameType::automaticity);
        CHECK(plan.session_ordinal == 7);
        CHECK(plan.rule_trace ==
              std::vector<std::string>{rules::ease_order, rules::automaticity_progression,
                                       rules::content_filter});
    }
}

TEST_CASE("planning falls over to the next feature when content is missing", "[planner]") {
    AdaptationConfig cfg;
    json doc = testsup::graph_doc(
        "flat", {testsup::feature_json("a", 0), testsup::feature_json("b", 1)}, {});
    FeatureGraph g = FeatureGraph::from_document(doc);
    json lex_doc = {{"lexicon_id", "lx"},
                    {"entries", json::array({entry_json("w1", "sun", "word", {"b"}),
                                             entry_json("w2", "moon", "word", {"b"})})}};
    Lexicon lex = Lexicon::from_document(lex_doc, g);
    StudentProfile p = instantiate_profile(g, "s1", 1, cfg.scale);

    SessionPlan plan = plan_session(p, g, lex, cfg);
    CHECK(plan.feature_id == "b");
    CHECK(plan.rule_trace ==
          std::vector<std::string>{rules::ease_order, rules::content_fallback,
                                   rules::accuracy_first, rules::content_filter});

    SECTION("nothing with content anywhere is an error") {
        Lexicon empty = Lexicon::from_document(
            json{{"lexicon_id", "none"}, {"entries", json::array()}}, g);
        CHECK(error_of([&] { plan_session(p, g, empty, cfg); }) ==
              ErrorCode::no_content_for_feature);
    }
    SECTION("a fully locked profile reports no playable feature instead") {
        for (auto& [id, st] : p.states) {
            st.status = FeatureStatus::locked;
            st.mastery = 0.0;
        }
        CHECK(error_of([&] { plan_session(p, g, lex, cfg); }) ==
              ErrorCode::no_playable_feature);
    }
}

TEST_CASE("submitting a result walks the full update pipeline", "[planner]") {
    AdaptationConfig cfg;
    FeatureGraph g = FeatureGraph::from_document(testsup::chain_doc());
    StudentProfile p = instantiate_profile(g, "s1", 2, cfg.scale);
    REQUIRE(p.states.at("b").status == FeatureStatus::open);

    SessionResult perfect{"b", {true, true, true, true}};
    SessionOutcome o1 = submit_result(p, g, perfect, cfg);

    CHECK(o1.feature_id == "b");
    CHECK(o1.session_ordinal == 1);
    CHECK(o1.game_type == GameType::accuracy); // decided before the play is counted
    CHECK(o1.score.value == 10.0);
    CHECK_FALSE(o1.score.had_errors);
    CHECK_THAT(o1.new_mastery, WithinAbs(8.0, 1e-9));
    CHECK(o1.status_after == FeatureStatus::open);
    CHECK(o1.newly_opened == std::vector<std::string>{"c"}); // 8.0 passes 7.5
    CHECK(o1.rollback_applied.empty());

    CHECK(p.session_counter == 1);
    CHECK(p.states.at("b").use_count == 1);
    CHECK(p.states.at("b").last_used_session == 1);
    CHECK(p.states.at("b").last_score == 10.0);
    CHECK(p.states.at("c").status == FeatureStatus::open);
    CHECK(p.states.at("c").mastery == 5.0);

    SessionOutcome o2 = submit_result(p, g, perfect, cfg);
    CHECK(o2.game_type == GameType::automaticity);
    CHECK_THAT(o2.new_mastery, WithinAbs(9.2, 1e-9));
    CHECK(o2.status_after == FeatureStatus::open);
    CHECK(o2.newly_opened.empty()); // c is already open

    SessionOutcome o3 = submit_result(p, g, perfect, cfg);
    CHECK(o3.new_mastery == 10.0); // raw 9.68 snaps to the maximum
    CHECK(o3.status_after == FeatureStatus::mastered);
    CHECK(p.states.at("b").status == FeatureStatus::mastered);

    SECTION("a freshly mastered feature is out of play until it goes stale") {
        CHECK(error_of([&] { submit_result(p, g, perfect, cfg); }) ==
              ErrorCode::feature_not_open);
        CHECK(p.session_counter == 3); // the failed submit did not count
    }
}

TEST_CASE("replaying a stale mastered feature updates mastery in place", "[planner]") {
    AdaptationConfig cfg;
    FeatureGraph g = FeatureGraph::from_document(testsup::chain_doc());
    StudentProfile p = instantiate_profile(g, "s1", 1, cfg.scale);
    p.states.at("a") = {10.0, FeatureStatus::mastered, 1, 1, 10.0, {}, {}};
    p.session_counter = 15; // staleness 14, well past the gap

    SessionResult flop{"a", {false, false, false, false}};
    SessionOutcome o = submit_result(p, g, flop, cfg);
    CHECK(o.session_ordinal == 16);
    CHECK(o.game_type == GameType::automaticity);
    CHECK(o.new_mastery == 9.0); // raw 4.0 clamped by the drop cap
    CHECK(o.status_after == FeatureStatus::mastered); // status is not demoted here
    CHECK(o.newly_opened == std::vector<std::string>{"b"}); // a still passes 7.5

    SECTION("within the gap the same feature is rejected") {
        p.states.at("a").last_used_session = 16;
        CHECK(error_of([&] { submit_result(p, g, flop, cfg); }) ==
              ErrorCode::feature_not_open);
    }
}

TEST_CASE("submit rejects unknown, locked, and empty plays", "[planner]") {
    AdaptationConfig cfg;
    FeatureGraph g = FeatureGraph::from_document(testsup::chain_doc());
    StudentProfile p = instantiate_profile(g, "s1", 2, cfg.scale);
    json before = to_json(p);

    CHECK(error_of([&] { submit_result(p, g, {"ghost", {true}}, cfg); }) ==
          ErrorCode::unknown_feature);
    CHECK(error_of([&] { submit_result(p, g, {"c", {true}}, cfg); }) ==
          ErrorCode::feature_not_open); // locked
    CHECK(error_of([&] { submit_result(p, g, {"b", {}}, cfg); }) == ErrorCode::empty_session);

    // Failed submissions leave no trace.
    CHECK(to_json(p) == before);
}

TEST_CASE("two flat sessions roll the feature and its prerequisites back", "[planner]") {
    AdaptationConfig cfg;
    FeatureGraph g = FeatureGraph::from_document(testsup::chain_doc());
    StudentProfile p = instantiate_profile(g, "s1", 2, cfg.scale);
    // a mastered at 10 by age, b open at 5, c locked.

    SessionResult flat{"b", {true, true, false, false}}; // score 5.0, a fixed point
    SessionOutcome o1 = submit_result(p, g, flat, cfg);
    CHECK(o1.new_mastery == 5.0);
    CHECK(o1.rollback_applied.empty()); // one play is not a trend

    SessionOutcome o2 = submit_result(p, g, flat, cfg);
    CHECK(o2.rollback_applied == std::vector<std::string>{"a", "b"});
    CHECK(o2.new_mastery == 4.0);                          // 5.0 - stagnation_delta
    CHECK(p.states.at("a").mastery == 9.0);                // direct prerequisite lowered
    CHECK(p.states.at("a").status == FeatureStatus::open); // and reopened
    CHECK(p.states.at("b").status == FeatureStatus::open);
    CHECK(p.states.at("c").mastery == 0.0); // not a direct prerequisite of b
    CHECK(p.states.at("b").stagnation_window.empty());

    // The rule needs a fresh pair of plays before it can fire again.
    SessionResult flat4{"b", {true, true, false, false, false}}; // score 4.0, new fixed point
    SessionOutcome o3 = submit_result(p, g, flat4, cfg);
    CHECK(o3.rollback_applied.empty());
    CHECK(o3.new_mastery == 4.0);

    SessionOutcome o4 = submit_result(p, g, flat4, cfg);
    CHECK(o4.rollback_applied == std::vector<std::string>{"a", "b"});
    CHECK(p.states.at("a").mastery == 8.0);
    CHECK(o4.new_mastery == 3.0);
}

TEST_CASE("plans and results serialize to their wire forms", "[planner]") {
    SECTION("outcome document shape") {
        SessionOutcome o;
        o.feature_id = "b";
        o.session_ordinal = 3;
        o.game_type = GameType::automaticity;
        o.score = {7.5, true};
        o.new_mastery = 6.5;
        o.status_after = FeatureStatus::open;
        o.newly_opened = {"c"};
        json doc = to_json(o);
        CHECK(doc == json{{"feature_id", "b"},
                          {"session_ordinal", 3},
                          {"game_type", "automaticity"},
                          {"score", 7.5},
                          {"had_errors", true},
                          {"new_mastery", 6.5},
                          {"status", "open"},
                          {"newly_opened", json::array({"c"})},
                          {"rollback_applied", json::array()}});
    }
    SECTION("result documents round-trip") {
        SessionResult r{"b", {true, false, true}};
        SessionResult back = session_result_from_json(to_json(r));
        CHECK(back.feature_id == "b");
        CHECK(back.items == std::vector<bool>{true, false, true});
    }
    SECTION("malformed result documents are rejected") {
        auto expect_malformed = [](json doc) {
            CHECK(error_of([&] { session_result_from_json(doc); }) ==
                  ErrorCode::malformed_document);
        };
        expect_malformed({{"feature_id", "b"}});                                  // no items
        expect_malformed({{"feature_id", "b"}, {"items", json::array({json::object()})}});
        expect_malformed({{"feature_id", "b"},
                          {"items", json::array({{{"correct", 1}}})}});           // not a bool
        expect_malformed({{"feature_id", "b"},
                          {"items", json::array()},
                          {"mode", "fast"}});                                     // unknown key
        expect_malformed({{"feature_id", ""}, {"items", json::array()}});         // empty id
    }
}
