#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <list>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "psylex/cluster.hpp"
#include "psylex/errors.hpp"

namespace fs = std::filesystem;
using namespace psylex;
using descriptors::Descriptor;
using descriptors::Source;

namespace {

const fs::path kData = PSYLEX_DATA_DIR;

// Literal transcription of the procedure: walk the sorted list, let each
// still-unclaimed word open a cluster, then absorb every later unclaimed word
// that is a mutual synonym of that seed. Uses list surgery instead of claimed
// flags so it shares no structure with the library walk.
std::vector<std::vector<std::string>> naive_clusters(const std::vector<std::string>& sorted,
                                                     const lexicon::SynonymLexicon& lex) {
    std::list<std::string> remaining(sorted.begin(), sorted.end());
    std::vector<std::vector<std::string>> out;
    while (!remaining.empty()) {
        std::string seed = remaining.front();
        remaining.pop_front();
        std::vector<std::string> members{seed};
        auto seed_synonyms = lex.synonyms_of(seed);
        for (auto it = remaining.begin(); it != remaining.end();) {
            if (seed_synonyms.count(*it) && lex.synonyms_of(*it).count(seed)) {
                members.push_back(*it);
                it = remaining.erase(it);
            } else {
                ++it;
            }
        }
        out.push_back(std::move(members));
    }
    return out;
}

lexicon::SynonymLexicon random_lexicon(std::mt19937& rng, const std::vector<std::string>& lemmas) {
    lexicon::SynonymLexicon lex;
    for (const auto& lemma : lemmas) {
        if (rng() % 8 == 0) continue;  // occasionally absent from the lexicon
        int senses = 1 + static_cast<int>(rng() % 2);
        for (int index = 1; index <= senses; ++index) {
            std::set<std::string> synonyms;
            for (const auto& other : lemmas) {
                if (other != lemma && rng() % 3 == 0) synonyms.insert(other);
            }
            if (rng() % 2) synonyms.insert("filler" + std::to_string(rng() % 4));
            lex.add({lemma, index, "sense " + std::to_string(index), synonyms});
        }
    }
    return lex;
}

}  // namespace

TEST_CASE("greedy clustering matches the naive walk on random instances") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 250; ++trial) {
        int count = 1 + static_cast<int>(rng() % 8);
        std::vector<std::string> lemmas;
        for (int i = 0; i < count; ++i) lemmas.push_back("w" + std::to_string(i));
        std::shuffle(lemmas.begin(), lemmas.end(), rng);
        auto lex = random_lexicon(rng, lemmas);

        auto got = cluster::greedy_cluster(lemmas, lex);
        auto want = naive_clusters(lemmas, lex);

        REQUIRE(got.clusters.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(got.clusters[i].members == want[i]);
            CHECK(got.clusters[i].seed == want[i].front());
        }

        // The clusters partition the input.
        std::set<std::string> seen;
        std::size_t total = 0;
        for (const auto& c : got.clusters) {
            total += c.members.size();
            seen.insert(c.members.begin(), c.members.end());
        }
        CHECK(total == lemmas.size());
        CHECK(seen == std::set<std::string>(lemmas.begin(), lemmas.end()));

        for (const auto& missing : got.missing_from_lexicon) CHECK(!lex.contains(missing));

        // Determinism.
        auto again = cluster::greedy_cluster(lemmas, lex);
        REQUIRE(again.clusters.size() == got.clusters.size());
        for (std::size_t i = 0; i < got.clusters.size(); ++i)
            CHECK(again.clusters[i].members == got.clusters[i].members);
    }
}

TEST_CASE("every absorbed member is a mutual synonym of its seed") {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::string> lemmas;
        for (int i = 0; i < 8; ++i) lemmas.push_back("w" + std::to_string(i));
        auto lex = random_lexicon(rng, lemmas);
        auto result = cluster::greedy_cluster(lemmas, lex);
        for (const auto& c : result.clusters) {
            auto seed_synonyms = lex.synonyms_of(c.seed);
            for (std::size_t i = 1; i < c.members.size(); ++i) {
                CHECK(seed_synonyms.count(c.members[i]) == 1);
                CHECK(lex.synonyms_of(c.members[i]).count(c.seed) == 1);
            }
        }
    }
}

TEST_CASE("cluster shape depends on the walk order") {
    lexicon::SynonymLexicon lex;
    lex.add({"a", 1, "", {"b"}});
    lex.add({"b", 1, "", {"a", "c"}});
    lex.add({"c", 1, "", {"b"}});

    auto first = cluster::greedy_cluster({"a", "b", "c"}, lex);
    REQUIRE(first.clusters.size() == 2);
    CHECK(first.clusters[0].members == std::vector<std::string>{"a", "b"});
    CHECK(first.clusters[1].members == std::vector<std::string>{"c"});

    auto second = cluster::greedy_cluster({"b", "a", "c"}, lex);
    REQUIRE(second.clusters.size() == 1);
    CHECK(second.clusters[0].members == std::vector<std::string>{"b", "a", "c"});
}

TEST_CASE("duplicate input lemmas are rejected") {
    lexicon::SynonymLexicon lex;
    CHECK_THROWS_AS(cluster::greedy_cluster({"a", "a"}, lex), ValidationError);
}

TEST_CASE("frequency sort is descending with lexicographic ties") {
    lexicon::FrequencyTable freq;
    freq.set("alpha", 4.0);
    freq.set("beta", 5.5);
    freq.set("gamma", 4.0);
    std::vector<Descriptor> input{
        {"gamma", {Source::survey}, 0.0, 0},
        {"alpha", {Source::survey}, 0.0, 0},
        {"delta", {Source::survey}, 0.0, 0},
        {"beta", {Source::survey}, 0.0, 0},
    };
    auto sorted = cluster::sort_by_frequency(input, freq);
    std::vector<std::string> order;
    for (const auto& d : sorted) order.push_back(d.lemma);
    // delta is missing from the table, scoring zero.
    CHECK(order == std::vector<std::string>{"beta", "alpha", "gamma", "delta"});
    // Ordering only; the descriptors themselves pass through unchanged.
    CHECK(sorted[0].zipf == 0.0);
}

TEST_CASE("representative prefers single-sense members by frequency") {
    std::map<std::string, Descriptor> annotated{
        {"aggressive", {"aggressive", {Source::survey}, 4.51, 2}},
        {"ambitious", {"ambitious", {Source::survey}, 4.18, 2}},
        {"assertive", {"assertive", {Source::survey}, 3.55, 1}},
        {"enterprising", {"enterprising", {Source::survey}, 3.08, 1}},
    };
    cluster::SynonymCluster c;
    c.seed = "aggressive";
    c.members = {"aggressive", "ambitious", "assertive", "enterprising"};
    auto choice = cluster::select_representative(c, annotated);
    CHECK(choice.lemma == "assertive");
    CHECK(!choice.flagged);
}

TEST_CASE("representative falls back to frequency with a flag") {
    std::map<std::string, Descriptor> annotated{
        {"x", {"x", {Source::survey}, 3.0, 2}},
        {"y", {"y", {Source::survey}, 4.0, 3}},
    };
    cluster::SynonymCluster c;
    c.seed = "x";
    c.members = {"x", "y"};
    auto choice = cluster::select_representative(c, annotated);
    CHECK(choice.lemma == "y");
    CHECK(choice.flagged);
}

TEST_CASE("representative ties break lexicographically") {
    std::map<std::string, Descriptor> annotated{
        {"peppy", {"peppy", {Source::survey}, 3.5, 1}},
        {"perky", {"perky", {Source::survey}, 3.5, 1}},
    };
    cluster::SynonymCluster c;
    c.seed = "perky";
    c.members = {"perky", "peppy"};
    auto choice = cluster::select_representative(c, annotated);
    CHECK(choice.lemma == "peppy");
}

TEST_CASE("representative selection needs annotations for every member") {
    cluster::SynonymCluster c;
    c.seed = "x";
    c.members = {"x"};
    CHECK_THROWS_AS(cluster::select_representative(c, {}), ValidationError);
    cluster::SynonymCluster empty;
    CHECK_THROWS_AS(cluster::select_representative(empty, {}), ValidationError);
}

TEST_CASE("cluster files round-trip") {
    auto dir = fs::temp_directory_path() / ("psylex_cluster_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::vector<cluster::SynonymCluster> clusters{
        {"aggressive", {"aggressive", "ambitious", "assertive"}, "assertive", false},
        {"cold", {"cold"}, "cold", true},
    };
    auto path = dir / "clusters.csv";
    cluster::write_clusters(path, clusters);
    auto loaded = cluster::load_clusters(path);
    REQUIRE(loaded.size() == clusters.size());
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        CHECK(loaded[i].seed == clusters[i].seed);
        CHECK(loaded[i].members == clusters[i].members);
        CHECK(loaded[i].representative == clusters[i].representative);
        CHECK(loaded[i].flagged == clusters[i].flagged);
    }
    fs::remove_all(dir);
}
