#include <doctest.h>

#include <fstream>

#include "support.hpp"
#include "tracerec/corpus.hpp"
#include "tracerec/diagnostics.hpp"
#include "tracerec/error.hpp"
#include "tracerec/io.hpp"
#include "tracerec/textprep.hpp"

using namespace tracerec;

namespace {

void write(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

std::string error_of(auto&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

RunFile sample_run() {
    RunFile run;
    run.tag = "model=vsm;cutoff=all";
    run.entries["R1"] = {{"T2", 1, 0.75}, {"T1", 2, 0.5}, {"T3", 3, 0.5}};
    run.entries["R2"] = {{"T1", 1, 1.0}};
    return run;
}

}  // namespace

TEST_CASE("manifest with inline and path texts keeps manifest order") {
    testing::TempDir dir;
    write(dir / "t1.txt", "The system shall log every event.");
    write(dir / "manifest.json", R"({"name": "demo", "artifacts": [
        {"id": "R1", "kind": "requirement", "text": "Log events"},
        {"id": "T1", "kind": "test", "path": "t1.txt"}]})");
    const auto set = load_manifest(dir / "manifest.json");
    REQUIRE(set.size() == 2);
    CHECK(set.name() == "demo");
    CHECK(set.artifacts()[0].id == "R1");
    CHECK(set.artifacts()[1].id == "T1");
    CHECK(set.artifacts()[1].text == "The system shall log every event.");
    CHECK(set.find("T1")->kind == "test");
    CHECK(set.find("nope") == nullptr);
}

TEST_CASE("manifest errors") {
    testing::TempDir dir;
    SUBCASE("duplicate id is named") {
        write(dir / "m.json", R"({"name": "x", "artifacts": [
            {"id": "R1", "kind": "r", "text": "a"}, {"id": "R1", "kind": "r", "text": "b"}]})");
        const auto msg = error_of([&] { load_manifest(dir / "m.json"); });
        CHECK(msg.find("R1") != std::string::npos);
        CHECK_THROWS_AS(load_manifest(dir / "m.json"), ValidationError);
    }
    SUBCASE("missing file is an I/O error") {
        CHECK_THROWS_AS(load_manifest(dir / "absent.json"), IoError);
    }
    SUBCASE("unreadable referenced text") {
        write(dir / "m.json", R"({"name": "x", "artifacts": [{"id": "R1", "kind": "r", "path": "gone.txt"}]})");
        CHECK_THROWS_AS(load_manifest(dir / "m.json"), IoError);
    }
    SUBCASE("malformed JSON and shapes") {
        CHECK_THROWS_AS(parse_manifest("{", {}), ValidationError);
        CHECK_THROWS_AS(parse_manifest(R"({"artifacts": []})", {}), ValidationError);
        CHECK_THROWS_AS(parse_manifest(R"({"name": "x", "artifacts": [{"id": "a", "kind": "k"}]})", {}),
                        ValidationError);
        CHECK_THROWS_AS(
            parse_manifest(R"({"name": "x", "artifacts": [{"id": "a", "kind": "k", "text": "t", "extra": "1"}]})", {}),
            ValidationError);
    }
    SUBCASE("empty text needs the allow-empty option") {
        const std::string doc = R"({"name": "x", "artifacts": [{"id": "a", "kind": "k", "text": ""}]})";
        CHECK_THROWS_AS(parse_manifest(doc, {}), ValidationError);
        CHECK(parse_manifest(doc, {}, {.allow_empty_text = true}).size() == 1);
    }
}

TEST_CASE("manifest round trip through format_manifest") {
    ArtifactSet set("rt", {{"A", "k1", "alpha \"quoted\"\nline"}, {"B", "k2", "ünïcödé"}});
    const auto again = parse_manifest(format_manifest(set), {});
    CHECK(again == set);
    CHECK(again.fingerprint() == set.fingerprint());
    CHECK(format_manifest(again) == format_manifest(set));
}

TEST_CASE("gold standard loading") {
    testing::TempDir dir;
    ArtifactSet set("g", {{"R1", "r", "x"}, {"T1", "t", "y"}, {"T2", "t", "z"}});
    SUBCASE("two valid rows") {
        write(dir / "g.csv", "source_id,target_id\nR1,T1\nR1,T2\n");
        const auto gold = load_gold(dir / "g.csv", set);
        CHECK(gold.size() == 2);
        CHECK(gold.contains("R1", "T2"));
        CHECK(gold.relevant_for("R1").size() == 2);
        CHECK(gold.relevant_for("T1").empty());
    }
    SUBCASE("dangling id names the pair") {
        write(dir / "g.csv", "source_id,target_id\nR1,TX\n");
        const auto msg = error_of([&] { load_gold(dir / "g.csv", set); });
        CHECK(msg.find("R1,TX") != std::string::npos);
    }
    SUBCASE("header only warns") {
        write(dir / "g.csv", "source_id,target_id\n");
        WarningCapture warnings;
        CHECK(load_gold(dir / "g.csv", set).empty());
        CHECK(warnings.contains("no links"));
    }
    SUBCASE("duplicate pair and malformed rows") {
        CHECK_THROWS_AS(parse_gold("source_id,target_id\nR1,T1\nR1,T1\n"), ValidationError);
        CHECK_THROWS_AS(parse_gold("source_id,target_id\nR1\n"), ValidationError);
        CHECK_THROWS_AS(parse_gold("src,tgt\nR1,T1\n"), ValidationError);
    }
    SUBCASE("fingerprint ignores row order") {
        CHECK(parse_gold("source_id,target_id\nR1,T1\nR1,T2\n").fingerprint() ==
              parse_gold("source_id,target_id\nR1,T2\nR1,T1\n").fingerprint());
    }
}

TEST_CASE("validate accepts exactly the gold standards whose ids resolve") {
    testing::Gen g(11);
    ArtifactSet set("v", {{"A", "k", "a"}, {"B", "k", "b"}, {"C", "k", "c"}});
    const std::vector<std::string> ids{"A", "B", "C", "X", "Y"};
    for (int round = 0; round < 200; ++round) {
        std::set<TraceLink> links;
        const auto n = g.between(1, 4);
        for (std::size_t i = 0; i < n; ++i) links.insert({ids[g.index(ids.size())], ids[g.index(ids.size())]});
        bool resolves = true;
        for (const auto& l : links) resolves = resolves && set.contains(l.source_id) && set.contains(l.target_id);
        GoldStandard gold(std::vector<TraceLink>(links.begin(), links.end()));
        if (resolves) {
            CHECK_NOTHROW(validate(set, gold));
        } else {
            CHECK_THROWS_AS(validate(set, gold), ValidationError);
        }
    }
}

TEST_CASE("score formatting rounds half to even on the binary value") {
    CHECK(format_score(0.5) == "0.500000");
    CHECK(format_score(1.0) == "1.000000");
    CHECK(format_score(-1e-9) == "0.000000");
    CHECK(format_score(0.0000005) == "0.000000");  // binary value lies below the tie
    CHECK(format_score(0.0000015) == "0.000002");
    CHECK(format_score(2.0 / 3.0) == "0.666667");
    CHECK(quantize_score(2.0 / 3.0) == 0.666667);
}

TEST_CASE("run files") {
    const auto run = sample_run();
    SUBCASE("one row per entry with consecutive ranks") {
        RunFile one;
        one.tag = "x";
        one.entries["R"] = {{"A", 1, 0.9}, {"B", 2, 0.8}, {"C", 3, 0.1}};
        const auto text = format_run(one);
        CHECK(text == "source_id,target_id,rank,score,tag\nR,A,1,0.900000,x\nR,B,2,0.800000,x\nR,C,3,0.100000,x\n");
    }
    SUBCASE("write, read, write is byte-identical") {
        testing::TempDir dir;
        write_run(run, dir / "run.csv");
        const auto back = read_run(dir / "run.csv");
        CHECK(back == run);
        write_run(back, dir / "again.csv");
        CHECK(read_text_file(dir / "run.csv") == read_text_file(dir / "again.csv"));
    }
    SUBCASE("tags with separators survive quoting") {
        auto r = run;
        r.tag = "a,b \"c\"";
        CHECK(parse_run(format_run(r)) == r);
    }
    SUBCASE("invariant violations") {
        const std::string header = "source_id,target_id,rank,score,tag\n";
        CHECK(error_of([&] { parse_run(header + "R,A,1,0.5,x\nR,B,3,0.4,x\n"); }).find("non-consecutive rank") !=
              std::string::npos);
        CHECK(error_of([&] { parse_run(header + "R,A,1,0.4,x\nR,B,2,0.5,x\n"); }).find("increasing score") !=
              std::string::npos);
        CHECK_THROWS_AS(parse_run(header + "R,B,1,0.5,x\nR,A,2,0.5,x\n"), ValidationError);  // tie order
        CHECK_THROWS_AS(parse_run(header + "R,A,1,0.5,x\nR,A,2,0.4,x\n"), ValidationError);  // duplicate target
        CHECK_THROWS_AS(parse_run(header + "R,A,1,abc,x\n"), ValidationError);
        CHECK_THROWS_AS(parse_run(header + "R,A,1,0.5,x\nS,A,1,0.5,y\n"), ValidationError);
        CHECK_THROWS_AS(parse_run("source,target\n"), ValidationError);
    }
}

TEST_CASE("characterize") {
    ArtifactSet set("c", {{"R1", "requirement", "The system shall log events"},
                          {"R2", "requirement", "The the THE"},
                          {"T1", "test", "Logging test for events"},
                          {"T2", "test", "Check logged event"},
                          {"T3", "test", "Unrelated words here"}});
    GoldStandard gold({{"R1", "T1"}, {"R1", "T2"}, {"R2", "T3"}, {"R2", "T1"}});
    const auto p = characterize(set, gold, Preprocessor{}, "desk check");
    CHECK(p.kind_counts == std::map<std::string, std::size_t>{{"requirement", 2}, {"test", 3}});
    CHECK(p.gold_links == 4);
    CHECK(p.linked_sources == 2);
    CHECK(p.links_per_source == std::map<std::size_t, std::size_t>{{2, 2}});
    CHECK(p.tokens_after.min == 0);  // "The the THE"
    CHECK(p.tokens_before.total == 5 + 3 + 4 + 3 + 3);
    CHECK(p.vocabulary_stemmed <= p.vocabulary_unstemmed);
    CHECK(p.context == "desk check");

    std::size_t kinds = 0;
    for (const auto& [k, n] : p.kind_counts) kinds += n;
    CHECK(kinds == p.artifact_count);
    std::size_t links = 0;
    for (const auto& [per, n] : p.links_per_source) links += per * n;
    CHECK(links == p.gold_links);
}
