#include <doctest.h>

#include <fstream>
#include <sstream>

#include "support.hpp"
#include "tracerec/corpus.hpp"
#include "tracerec/textprep.hpp"

using namespace tracerec;
using Tokens = std::vector<std::string>;

TEST_CASE("tokenize") {
    CHECK(tokenize("The FSM shall re-init in 20 ms") == Tokens{"the", "fsm", "shall", "re", "init", "in", "ms"});
    CHECK(tokenize("").empty());
    // Expected values from Python's str.lower(), a Unicode-aware reference.
    CHECK(tokenize("αβγ Δocument") == Tokens{"αβγ", "δocument"});
    CHECK(tokenize("ÉCOLE Straße") == Tokens{"école", "straße"});
    CHECK(tokenize("a b cd 7 42 x1") == Tokens{"cd", "x1"});
    CHECK(tokenize("a b 42", 1, false) == Tokens{"a", "b", "42"});
    CHECK(tokenize("snake_case,comma;semi") == Tokens{"snake", "case", "comma", "semi"});
    CHECK(tokenize("bad\xff\xfe" "bytes") == Tokens{"bad", "bytes"});
}

TEST_CASE("'in' survives tokenization and is removed as a stop word") {
    Preprocessor prep;
    CHECK(prep.filter(prep.tokens("The FSM shall re-init in 20 ms")) == Tokens{"fsm", "shall", "re", "init", "ms"});
}

TEST_CASE("remove_stopwords") {
    const auto& stops = default_stoplist();
    CHECK(stops.count("the") == 1);
    CHECK(stops.count("shall") == 0);
    CHECK(remove_stopwords({"the", "fsm", "shall"}, stops) == Tokens{"fsm", "shall"});
    CHECK(remove_stopwords({"x", "y"}, StopList{}) == Tokens{"x", "y"});
    CHECK(remove_stopwords({"the", "a", "of"}, stops).empty());
}

TEST_CASE("stop list files") {
    testing::TempDir dir;
    std::ofstream(dir / "stops.txt") << "alpha\n\nbeta  \n";
    const auto list = load_stoplist(dir / "stops.txt");
    CHECK(list == StopList{"alpha", "beta"});
    PrepConfig config;
    config.stoplist_path = dir / "stops.txt";
    const Preprocessor prep(config);
    CHECK(prep.terms("alpha beta gamma") == Tokens{"gamma"});
    CHECK(prep.describe().find("stop=custom:") != std::string::npos);
    CHECK(Preprocessor{}.describe() == "minlen=2;numeric=drop;stop=default;stem=porter");
}

TEST_CASE("porter_stem agrees with the reference vocabulary") {
    std::ifstream in(testing::source_dir() / "tests/fixtures/porter_vocabulary.txt");
    REQUIRE(in);
    std::size_t checked = 0;
    for (std::string word, stem; in >> word >> stem; ++checked) {
        CHECK_MESSAGE(porter_stem(word) == stem, word);
    }
    CHECK(checked >= 30);
}

TEST_CASE("porter_stem edge cases") {
    CHECK(porter_stem("caresses") == "caress");
    CHECK(porter_stem("ponies") == "poni");
    CHECK(porter_stem("a") == "a");
    CHECK(porter_stem("is") == "is");
    CHECK(porter_stem("café") == "café");
    CHECK(porter_stem("x1") == "x1");
    CHECK(porter_stem("") == "");
}

TEST_CASE("porter_stem never lengthens a word") {
    testing::Gen g(3);
    const std::string letters = "abcdefghijklmnopqrstuvwxyzeeiiyss";
    for (int i = 0; i < 3000; ++i) {
        std::string w;
        const auto n = g.between(1, 14);
        for (std::size_t j = 0; j < n; ++j) w += letters[g.index(letters.size())];
        CHECK(porter_stem(w).size() <= w.size());
    }
}

TEST_CASE("dictionary and vectorize") {
    PrepConfig raw;
    raw.remove_stopwords = false;
    raw.stem = false;
    const Preprocessor prep(raw);
    ArtifactSet set("d", {{"1", "k", "alpha beta"}, {"2", "k", "alpha"}});
    const auto dict = build_dictionary(set, prep);
    CHECK(dict.size() == 2);
    CHECK(dict.document_count() == 2);
    CHECK(dict.term(0) == "alpha");
    CHECK(dict.df(*dict.find("alpha")) == 2);
    CHECK(dict.df(*dict.find("beta")) == 1);
    CHECK_FALSE(dict.find("gamma"));

    const auto v = vectorize({"q", "k", "alpha alpha beta"}, dict, prep);
    CHECK(v == TermCountVector{{*dict.find("alpha"), 2}, {*dict.find("beta"), 1}});
    CHECK(vectorize({"q", "k", "beta alpha alpha"}, dict, prep) == v);
    CHECK(vectorize({"q", "k", "gamma delta"}, dict, prep).empty());

    const auto empty = build_dictionary(ArtifactSet{}, prep);
    CHECK(empty.size() == 0);
    CHECK(empty.document_count() == 0);
}

TEST_CASE("dictionary properties on random corpora") {
    testing::Gen g(5);
    const Preprocessor prep;
    for (int round = 0; round < 40; ++round) {
        const auto set = testing::random_corpus(g, g.between(1, 15), g.between(2, 30));
        const auto dict = build_dictionary(set, prep);
        // terms sorted, df in [1, N], df equals brute-force count
        for (std::size_t t = 0; t + 1 < dict.size(); ++t) CHECK(dict.term(t) < dict.term(t + 1));
        std::vector<std::uint32_t> df(dict.size(), 0);
        for (const auto& a : set) {
            const auto terms = prep.terms(a.text);
            const auto v = vectorize(a, dict, prep);
            std::size_t total = 0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i > 0) CHECK(v[i - 1].term < v[i].term);
                CHECK(v[i].count >= 1);
                total += v[i].count;
                ++df[v[i].term];
            }
            CHECK(total == terms.size());
            CHECK(prep.terms(a.text) == terms);
        }
        for (TermIndex t = 0; t < dict.size(); ++t) {
            CHECK(dict.df(t) == df[t]);
            CHECK(dict.df(t) >= 1);
            CHECK(dict.df(t) <= dict.document_count());
        }
    }
}
