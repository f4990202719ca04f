#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <vector>

#include "psylex/descriptors.hpp"
#include "psylex/errors.hpp"

namespace fs = std::filesystem;
using namespace psylex;
using descriptors::Descriptor;
using descriptors::Source;

namespace {

const fs::path kData = PSYLEX_DATA_DIR;

fs::path temp_dir() {
    auto dir = fs::temp_directory_path() / ("psylex_desc_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

fs::path write_temp(const fs::path& dir, const std::string& name, const std::string& text) {
    auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

descriptors::NormalizationRules demo_rules() {
    return descriptors::NormalizationRules::load(kData / "rules.json");
}

}  // namespace

TEST_CASE("normalization fixes typos, forms and phrases") {
    auto rules = demo_rules();
    CHECK(descriptors::normalize_descriptor("helfpul", rules).lemma == "helpful");
    CHECK(descriptors::normalize_descriptor("fun", rules).lemma == "funny");
    CHECK(descriptors::normalize_descriptor("sometimes annoying", rules).lemma == "annoying");
    CHECK(descriptors::normalize_descriptor("Fun", rules).lemma == "funny");
    CHECK(descriptors::normalize_descriptor("  Smart  ", rules).lemma == "smart");
    CHECK(descriptors::normalize_descriptor("very   slow", rules).lemma == "slow");
}

TEST_CASE("negations fold into antonyms when mapped") {
    auto rules = demo_rules();
    auto folded = descriptors::normalize_descriptor("not funny", rules);
    CHECK(folded.lemma == "unfunny");
    CHECK(!folded.needs_review);

    auto unmapped = descriptors::normalize_descriptor("not green", rules);
    CHECK(unmapped.lemma == "not green");
    CHECK(unmapped.needs_review);
}

TEST_CASE("negation folding looks up the literal base") {
    auto rules = demo_rules();
    // The antonym map keys the exact remainder; "fun" is not rewritten to
    // "funny" first, so the phrase is flagged instead of folded.
    auto result = descriptors::normalize_descriptor("not fun", rules);
    CHECK(result.lemma == "not fun");
    CHECK(result.needs_review);
}

TEST_CASE("normalization is idempotent for every loadable rule document") {
    auto rules = demo_rules();
    std::vector<std::string> vocab{"helfpul",  "fun",      "sometimes annoying",
                                  "not funny", "not fun",  "not green",
                                  "helpful",  "funny",    "unfunny",
                                  "freindly", "very slow", "smart",
                                  "not helpful", "not reliable", "help"};
    std::mt19937 rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        std::string raw = vocab[rng() % vocab.size()];
        if (rng() % 3 == 0) raw = "  " + raw + "  ";
        if (rng() % 4 == 0)
            for (auto& c : raw) c = static_cast<char>((rng() % 2) ? std::toupper(c) : c);
        auto once = descriptors::normalize_descriptor(raw, rules);
        auto twice = descriptors::normalize_descriptor(once.lemma, rules);
        CHECK(twice.lemma == once.lemma);
    }
}

TEST_CASE("rule loader rejects values that are not fixed points") {
    auto dir = temp_dir();
    auto chained = write_temp(dir, "chained.json",
                              R"({"typo_map": {"a": "b"}, "noun_to_adjective": {"b": "c"},
                                  "antonym_map": {}, "multiword_simplify": {}})");
    CHECK_THROWS_AS(descriptors::NormalizationRules::load(chained), ValidationError);

    auto renegated = write_temp(dir, "renegated.json",
                                R"({"typo_map": {}, "noun_to_adjective": {},
                                    "antonym_map": {"funny": "not funny"},
                                    "multiword_simplify": {}})");
    CHECK_THROWS_AS(descriptors::NormalizationRules::load(renegated), ValidationError);

    auto self_map = write_temp(dir, "self.json",
                               R"({"typo_map": {"smart": "smart"}, "noun_to_adjective": {},
                                   "antonym_map": {}, "multiword_simplify": {}})");
    CHECK_THROWS_AS(descriptors::NormalizationRules::load(self_map), ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("merge unions sets and records provenance") {
    std::map<Source, std::set<std::string>> sets;
    sets[Source::survey] = {"helpful", "smart", "cold"};
    sets[Source::lab] = {"smart", "patient"};
    sets[Source::goldberg] = {"cold", "smart", "warm"};

    auto merged = descriptors::merge_sets(sets);
    REQUIRE(merged.size() == 5);
    std::map<std::string, std::set<Source>> got;
    for (const auto& d : merged) got[d.lemma] = d.provenance;
    CHECK(got.at("smart") == std::set<Source>{Source::survey, Source::lab, Source::goldberg});
    CHECK(got.at("cold") == std::set<Source>{Source::survey, Source::goldberg});
    CHECK(got.at("patient") == std::set<Source>{Source::lab});

    for (std::size_t i = 1; i < merged.size(); ++i) CHECK(merged[i - 1].lemma < merged[i].lemma);
}

TEST_CASE("merge provenance is exact on random families") {
    std::mt19937 rng(23);
    const std::vector<Source> sources{Source::survey, Source::lab, Source::reviews,
                                      Source::goldberg};
    for (int trial = 0; trial < 100; ++trial) {
        std::map<Source, std::set<std::string>> sets;
        for (auto source : sources) {
            int count = static_cast<int>(rng() % 10);
            for (int i = 0; i < count; ++i) sets[source].insert("w" + std::to_string(rng() % 12));
        }
        auto merged = descriptors::merge_sets(sets);
        std::set<std::string> unioned;
        for (const auto& [source, lemmas] : sets) unioned.insert(lemmas.begin(), lemmas.end());
        REQUIRE(merged.size() == unioned.size());
        for (const auto& d : merged) {
            std::set<Source> expect;
            for (const auto& [source, lemmas] : sets)
                if (lemmas.count(d.lemma)) expect.insert(source);
            CHECK(d.provenance == expect);
        }
    }
}

TEST_CASE("merge rejects non-canonical lemmas") {
    std::map<Source, std::set<std::string>> sets;
    sets[Source::survey] = {"Helpful"};
    CHECK_THROWS_AS(descriptors::merge_sets(sets), ValidationError);
}

TEST_CASE("exclusion criteria names are fixed and ordered") {
    const auto& names = descriptors::ExclusionLexicons::criterion_names();
    CHECK(names == std::vector<std::string>{
                       "slanginess", "difficulty", "ambiguity", "sex_gender_demographics",
                       "over_evaluation", "peripheral", "anatomical_physical",
                       "impression_on_user"});
}

TEST_CASE("exclusions partition the input and give reasons") {
    auto lexicons = descriptors::ExclusionLexicons::load(kData / "exclusions.json");
    auto pairs = descriptors::load_opposite_pairs(kData / "opposite_pairs.json");

    std::vector<Descriptor> input;
    for (const auto& lemma : {"bored", "boring", "honest", "dishonest", "hot", "smart"})
        input.push_back({lemma, {Source::survey}, 0.0, 0});

    auto outcome = descriptors::apply_exclusions(input, lexicons, pairs);

    std::set<std::string> kept;
    for (const auto& d : outcome.kept) kept.insert(d.lemma);
    CHECK(kept == std::set<std::string>{"bored", "honest", "smart"});
    CHECK(outcome.kept.size() + outcome.report.excluded.size() == input.size());

    CHECK(outcome.report.excluded.at("boring") ==
          std::vector<std::string>{"impression_on_user"});
    CHECK(outcome.report.excluded.at("hot") == std::vector<std::string>{"slanginess"});
    CHECK(outcome.report.excluded.at("dishonest") == std::vector<std::string>{"opposite_pair"});
}

TEST_CASE("a negative form stays when its positive counterpart is absent") {
    auto lexicons = descriptors::ExclusionLexicons::load(kData / "exclusions.json");
    auto pairs = descriptors::load_opposite_pairs(kData / "opposite_pairs.json");
    std::vector<Descriptor> input{{"dishonest", {Source::survey}, 0.0, 0}};
    auto outcome = descriptors::apply_exclusions(input, lexicons, pairs);
    REQUIRE(outcome.kept.size() == 1);
    CHECK(outcome.kept[0].lemma == "dishonest");
}

TEST_CASE("multiple criteria stack in declaration order") {
    descriptors::ExclusionLexicons lexicons;
    lexicons.criteria["ambiguity"] = {"hot"};
    lexicons.criteria["slanginess"] = {"hot"};
    std::vector<Descriptor> input{{"hot", {Source::survey}, 0.0, 0}};
    auto outcome = descriptors::apply_exclusions(input, lexicons, {});
    CHECK(outcome.report.excluded.at("hot") ==
          std::vector<std::string>{"slanginess", "ambiguity"});
}

TEST_CASE("descriptor set files round-trip") {
    auto dir = temp_dir();
    std::vector<Descriptor> set{
        {"cold", {Source::survey, Source::goldberg}, 0.0, 0},
        {"helpful", {Source::reviews}, 0.0, 0},
        {"smart", {Source::survey, Source::lab, Source::reviews, Source::goldberg}, 0.0, 0},
    };
    auto path = dir / "set.csv";
    descriptors::write_descriptor_set(path, set);
    auto loaded = descriptors::load_descriptor_set(path);
    REQUIRE(loaded.size() == set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        CHECK(loaded[i].lemma == set[i].lemma);
        CHECK(loaded[i].provenance == set[i].provenance);
    }
    fs::remove_all(dir);
}

TEST_CASE("descriptor set loader rejects duplicates and bad tags") {
    auto dir = temp_dir();
    auto dup = write_temp(dir, "dup.csv", "lemma,provenance\nsmart,survey\nsmart,lab\n");
    CHECK_THROWS_AS(descriptors::load_descriptor_set(dup), ValidationError);
    auto tag = write_temp(dir, "tag.csv", "lemma,provenance\nsmart,unknown_source\n");
    CHECK_THROWS_AS(descriptors::load_descriptor_set(tag), ValidationError);
    auto empty = write_temp(dir, "empty.csv", "lemma,provenance\nsmart,\n");
    CHECK_THROWS_AS(descriptors::load_descriptor_set(empty), ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("source tags round-trip through their names") {
    for (auto source : {Source::survey, Source::lab, Source::reviews, Source::goldberg})
        CHECK(descriptors::source_from_string(descriptors::to_string(source)) == source);
    CHECK_THROWS_AS(descriptors::source_from_string("interview"), ValidationError);
}
