#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "psylex/descriptors.hpp"
#include "psylex/lexicon.hpp"

namespace psylex::cluster {

struct SynonymCluster {
    std::string seed;                  // first member
    std::vector<std::string> members;  // seed first, then absorption order
    std::string representative;
    bool flagged = false;  // representative fell back to a multi-sense member
};

// Descending zipf, ties by ascending lemma.
std::vector<descriptors::Descriptor> sort_by_frequency(
    const std::vector<descriptors::Descriptor>& descriptors,
    const lexicon::FrequencyTable& freq);

struct GreedyResult {
    std::vector<SynonymCluster> clusters;        // creation order; partition the input
    std::vector<std::string> missing_from_lexicon;  // treated as empty synonym sets
};

// Walk the sorted list; each unclaimed word opens a cluster and absorbs every
// later unclaimed word that is a mutual synonym of it.
GreedyResult greedy_cluster(const std::vector<std::string>& sorted,
                            const lexicon::SynonymLexicon& lexicon);

struct RepresentativeChoice {
    std::string lemma;
    bool flagged = false;
};

// Highest-zipf member with exactly one sense; if none, highest-zipf member
// overall, flagged for manual review. Ties break lexicographically.
RepresentativeChoice select_representative(
    const SynonymCluster& cluster,
    const std::map<std::string, descriptors::Descriptor>& annotated);

void write_clusters(const std::filesystem::path& path,
                    const std::vector<SynonymCluster>& clusters);
std::vector<SynonymCluster> load_clusters(const std::filesystem::path& path);

}  // namespace psylex::cluster
