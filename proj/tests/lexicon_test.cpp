#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "psylex/errors.hpp"
#include "psylex/lexicon.hpp"

namespace fs = std::filesystem;
using namespace psylex;

namespace {

const fs::path kData = PSYLEX_DATA_DIR;

fs::path temp_dir() {
    auto dir = fs::temp_directory_path() / ("psylex_lex_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

fs::path write_temp(const fs::path& dir, const std::string& name, const std::string& text) {
    auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

}  // namespace

TEST_CASE("bundled lexicon loads with per-sense entries") {
    auto lex = lexicon::SynonymLexicon::load(kData / "synonym_lexicon.json");
    CHECK(lex.sense_count("aggressive") == 2);
    CHECK(lex.sense_count("assertive") == 1);
    CHECK(lex.sense_count("absent") == 0);
    CHECK(lex.contains("enterprising"));
    CHECK(!lex.contains("absent"));

    const auto& senses = lex.senses("aggressive");
    REQUIRE(senses.size() == 2);
    CHECK(senses[0].sense_index == 1);
    CHECK(senses[1].sense_index == 2);
    CHECK(!senses[0].definition.empty());

    auto unioned = lex.synonyms_of("aggressive");
    CHECK(unioned.count("assertive"));
    CHECK(unioned.count("ambitious"));
    CHECK(unioned.count("enterprising"));
    CHECK(unioned.count("pushy"));
    CHECK(lex.synonyms_of("absent").empty());
}

TEST_CASE("serialization round-trips and is stable") {
    auto lex = lexicon::SynonymLexicon::load(kData / "synonym_lexicon.json");
    auto dir = temp_dir();
    auto path = dir / "relexicon.json";
    lex.save(path);
    auto reloaded = lexicon::SynonymLexicon::load(path);
    CHECK(reloaded.total_senses() == lex.total_senses());
    CHECK(reloaded.serialize() == lex.serialize());
    CHECK(reloaded.entries().size() == lex.entries().size());
    for (const auto& [lemma, senses] : lex.entries()) {
        const auto& other = reloaded.senses(lemma);
        REQUIRE(other.size() == senses.size());
        for (std::size_t i = 0; i < senses.size(); ++i) {
            CHECK(other[i].definition == senses[i].definition);
            CHECK(other[i].synonyms == senses[i].synonyms);
        }
    }
    fs::remove_all(dir);
}

TEST_CASE("duplicate entry keys are rejected") {
    auto dir = temp_dir();
    auto dup = write_temp(dir, "dup.json", R"({
  "smart#1": {"definition": "quick", "synonyms": ["clever"]},
  "smart#1": {"definition": "neat", "synonyms": ["tidy"]}
})");
    CHECK_THROWS_AS(lexicon::SynonymLexicon::load(dup), ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("identical nested keys across entries are fine") {
    auto dir = temp_dir();
    // Every entry object repeats "definition" and "synonyms"; only top-level
    // duplicates should trip the duplicate check.
    auto ok = write_temp(dir, "ok.json", R"({
  "smart#1": {"definition": "quick", "synonyms": ["clever"]},
  "tidy#1": {"definition": "neat", "synonyms": ["orderly"]}
})");
    auto lex = lexicon::SynonymLexicon::load(ok);
    CHECK(lex.total_senses() == 2);
    fs::remove_all(dir);
}

TEST_CASE("sense indices must be contiguous from one") {
    auto dir = temp_dir();
    auto gap = write_temp(dir, "gap.json", R"({
  "smart#1": {"definition": "quick", "synonyms": ["clever"]},
  "smart#3": {"definition": "stylish", "synonyms": ["natty"]}
})");
    CHECK_THROWS_AS(lexicon::SynonymLexicon::load(gap), ValidationError);
    auto late = write_temp(dir, "late.json", R"({
  "smart#2": {"definition": "quick", "synonyms": ["clever"]}
})");
    CHECK_THROWS_AS(lexicon::SynonymLexicon::load(late), ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("malformed keys and self-synonyms are rejected") {
    auto dir = temp_dir();
    for (const char* body : {
             R"({"smart": {"definition": "d", "synonyms": []}})",
             R"({"smart#0": {"definition": "d", "synonyms": []}})",
             R"({"smart#x": {"definition": "d", "synonyms": []}})",
             R"({"smart#1x": {"definition": "d", "synonyms": []}})",
             R"({"#1": {"definition": "d", "synonyms": []}})",
             R"({"smart#1": {"definition": "d", "synonyms": ["smart"]}})",
         }) {
        auto path = write_temp(dir, "bad.json", body);
        CHECK_THROWS_AS(lexicon::SynonymLexicon::load(path), ValidationError);
    }
    fs::remove_all(dir);
}

TEST_CASE("add rejects duplicate senses and validate catches gaps") {
    lexicon::SynonymLexicon lex;
    lex.add({"smart", 1, "quick", {"clever"}});
    CHECK_THROWS_AS(lex.add({"smart", 1, "again", {}}), ValidationError);
    lex.add({"smart", 3, "stylish", {"natty"}});
    CHECK_THROWS_AS(lex.validate(), ValidationError);
}

TEST_CASE("frequency table loads and rejects bad rows") {
    auto lex = lexicon::FrequencyTable::load(kData / "freq.csv");
    CHECK(lex.zipf("aggressive") == doctest::Approx(4.51));
    CHECK(lex.zipf("absent") == 0.0);
    CHECK(lex.size() > 10);

    auto dir = temp_dir();
    auto dup = write_temp(dir, "dup.csv", "lemma,zipf\nsmart,4.0\nsmart,4.1\n");
    CHECK_THROWS_AS(lexicon::FrequencyTable::load(dup), ValidationError);
    auto range = write_temp(dir, "range.csv", "lemma,zipf\nsmart,8.5\n");
    CHECK_THROWS_AS(lexicon::FrequencyTable::load(range), ValidationError);
    auto negative = write_temp(dir, "negative.csv", "lemma,zipf\nsmart,-0.1\n");
    CHECK_THROWS_AS(lexicon::FrequencyTable::load(negative), ValidationError);
    auto text = write_temp(dir, "text.csv", "lemma,zipf\nsmart,often\n");
    CHECK_THROWS_AS(lexicon::FrequencyTable::load(text), ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("annotate fills zipf and sense counts without reordering") {
    auto lex = lexicon::SynonymLexicon::load(kData / "synonym_lexicon.json");
    auto freq = lexicon::FrequencyTable::load(kData / "freq.csv");
    std::vector<descriptors::Descriptor> input{
        {"enterprising", {descriptors::Source::survey}, 0.0, 0},
        {"aggressive", {descriptors::Source::survey}, 0.0, 0},
        {"mystery", {descriptors::Source::survey}, 0.0, 0},
    };
    auto result = lexicon::annotate(input, lex, freq);
    REQUIRE(result.descriptors.size() == 3);
    CHECK(result.descriptors[0].lemma == "enterprising");
    CHECK(result.descriptors[0].sense_count == 1);
    CHECK(result.descriptors[0].zipf == doctest::Approx(3.08));
    CHECK(result.descriptors[1].lemma == "aggressive");
    CHECK(result.descriptors[1].sense_count == 2);
    CHECK(result.descriptors[2].sense_count == 0);
    CHECK(result.unknown_sense == std::vector<std::string>{"mystery"});
}
