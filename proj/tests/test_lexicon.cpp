#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace readapt;
using testsup::error_of;
using json = jsonx::json;

namespace {

json entry_json(const std::string& id, const std::string& text, const std::string& kind,
                std::vector<std::string> fids) {
    return {{"entry_id", id}, {"text", text}, {"kind", kind}, {"feature_ids", fids}};
}

} // namespace

TEST_CASE("lexicon parsing indexes entries per feature", "[lexicon]") {
    FeatureGraph g = FeatureGraph::from_document(testsup::chain_doc());
    json doc = {{"lexicon_id", "lex1"},
                {"entries",
                 json::array({entry_json("w1", "sun", "word", {"a"}),
                              entry_json("w2", "moon", "word", {"a", "b"}),
                              entry_json("s1", "the sun rises", "sentence", {"b", "c"})})}};
    Lexicon lex = Lexicon::from_document(doc, g);

    CHECK(lex.lexicon_id() == "lex1");
    CHECK(lex.entries().size() == 3);
    CHECK(lex.entry("w2").text == "moon");
    CHECK(lex.entry("s1").kind == EntryKind::sentence);
    CHECK(lex.entry("w1").kind == EntryKind::word);

    // Index lists entry ids per feature, sorted.
    CHECK(lex.entries_for_feature("a") == std::vector<std::string>{"w1", "w2"});
    CHECK(lex.entries_for_feature("b") == std::vector<std::string>{"s1", "w2"});
    CHECK(lex.entries_for_feature("c") == std::vector<std::string>{"s1"});
    CHECK(lex.entries_for_feature("ghost").empty());

    CHECK(error_of([&] { lex.entry("nope"); }) == ErrorCode::malformed_document);
}

TEST_CASE("lexicon accepts bytes and an empty entry list", "[lexicon]") {
    FeatureGraph g = FeatureGraph::from_document(testsup::chain_doc());
    json doc = {{"lexicon_id", "empty"}, {"entries", json::array()}};
    Lexicon lex = Lexicon::from_bytes(doc.dump(), g);
    CHECK(lex.entries().empty());
    CHECK(lex.index().empty());

    CHECK(error_of([&] { Lexicon::from_bytes("{", g); }) == ErrorCode::malformed_document);
}

TEST_CASE("lexicon rejects defective documents", "[lexicon]") {
    FeatureGraph g = FeatureGraph::from_document(testsup::chain_doc());
    auto with_entries = [](json entries) {
        return json{{"lexicon_id", "lx"}, {"entries", std::move(entries)}};
    };

    SECTION("duplicate entry id") {
        json doc = with_entries(json::array({entry_json("w1", "sun", "word", {"a"}),
                                             entry_json("w1", "moon", "word", {"b"})}));
        CHECK(error_of([&] { Lexicon::from_document(doc, g); }) ==
              ErrorCode::duplicate_entry_id);
    }
    SECTION("reference to a feature outside the graph") {
        json doc = with_entries(json::array({entry_json("w1", "sun", "word", {"zz"})}));
        try {
            Lexicon::from_document(doc, g);
            FAIL("expected unknown_feature_reference");
        } catch (const DomainError& e) {
            CHECK(e.code() == ErrorCode::unknown_feature_reference);
            std::string msg = e.what();
            CHECK(msg.find("w1") != std::string::npos);
            CHECK(msg.find("zz") != std::string::npos);
        }
    }
    SECTION("empty text") {
        json doc = with_entries(json::array({entry_json("w1", "", "word", {"a"})}));
        CHECK(error_of([&] { Lexicon::from_document(doc, g); }) ==
              ErrorCode::malformed_document);
    }
    SECTION("empty feature_ids") {
        json doc = with_entries(json::array({entry_json("w1", "sun", "word", {})}));
        CHECK(error_of([&] { Lexicon::from_document(doc, g); }) ==
              ErrorCode::malformed_document);
    }
    SECTION("feature tagged twice on one entry") {
        json doc = with_entries(json::array({entry_json("w1", "sun", "word", {"a", "a"})}));
        CHECK(error_of([&] { Lexicon::from_document(doc, g); }) ==
              ErrorCode::malformed_document);
    }
    SECTION("unknown kind") {
        json doc = with_entries(json::array({entry_json("w1", "sun", "picture", {"a"})}));
        CHECK(error_of([&] { Lexicon::from_document(doc, g); }) ==
              ErrorCode::malformed_document);
    }
    SECTION("unknown entry key") {
        json entry = entry_json("w1", "sun", "word", {"a"});
        entry["tags"] = json::array();
        json doc = with_entries(json::array({entry}));
        CHECK(error_of([&] { Lexicon::from_document(doc, g); }) ==
              ErrorCode::malformed_document);
    }
    SECTION("unknown top-level key") {
        json doc = with_entries(json::array());
        doc["version"] = 2;
        CHECK(error_of([&] { Lexicon::from_document(doc, g); }) ==
              ErrorCode::malformed_document);
    }
}

TEST_CASE("feature_ids are stored sorted and unique", "[lexicon]") {
    FeatureGraph g = FeatureGraph::from_document(testsup::chain_doc());
    json doc = {{"lexicon_id", "lx"},
                {"entries", json::array({entry_json("w1", "sun", "word", {"c", "a", "b"})})}};
    Lexicon lex = Lexicon::from_document(doc, g);
    CHECK(lex.entry("w1").feature_ids == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("index matches a brute-force rebuild on random lexica", "[lexicon]") {
    std::mt19937_64 rng(4242);
    FeatureGraph g = FeatureGraph::from_document(testsup::diamond_doc());
    const std::vector<std::string> fids{"a", "b", "c", "d"};

    for (int trial = 0; trial < 20; ++trial) {
        int n = 1 + static_cast<int>(rng() % 60);
        json entries = json::array();
        for (int i = 0; i < n; ++i) {
            std::set<std::string> tags;
            int k = 1 + static_cast<int>(rng() % 3);
            while (static_cast<int>(tags.size()) < k)
                tags.insert(fids[rng() % fids.size()]);
            entries.push_back(entry_json("e" + std::to_string(i), "t" + std::to_string(i),
                                         rng() % 2 ? "word" : "sentence",
                                         {tags.begin(), tags.end()}));
        }
        Lexicon lex =
            Lexicon::from_document(json{{"lexicon_id", "rnd"}, {"entries", entries}}, g);

        // Oracle: invert the entry -> features map by hand.
        std::map<std::string, std::vector<std::string>> want;
        for (const auto& [id, entry] : lex.entries()) {
            for (const std::string& f : entry.feature_ids)
                want[f].push_back(id);
        }
        for (auto& [f, v] : want)
            std::sort(v.begin(), v.end());

        CHECK(lex.index() == want);
        for (const std::string& f : fids) {
            auto it = want.find(f);
            if (it == want.end())
                CHECK(lex.entries_for_feature(f).empty());
            else
                CHECK(lex.entries_for_feature(f) == it->second);
        }
    }
}

TEST_CASE("lexicon entry serializes back to its document form", "[lexicon]") {
    FeatureGraph g = FeatureGraph::from_document(testsup::chain_doc());
    json in = entry_json("w1", "sun", "sentence", {"a", "b"});
    Lexicon lex =
        Lexicon::from_document(json{{"lexicon_id", "lx"}, {"entries", json::array({in})}}, g);
    CHECK(to_json(lex.entry("w1")) == in);
}
