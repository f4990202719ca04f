#include "psylex/cluster.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "psylex/csv.hpp"
#include "psylex/errors.hpp"

namespace psylex::cluster {

std::vector<descriptors::Descriptor> sort_by_frequency(
    const std::vector<descriptors::Descriptor>& descriptors,
    const lexicon::FrequencyTable& freq) {
    auto sorted = descriptors;
    std::sort(sorted.begin(), sorted.end(),
              [&](const descriptors::Descriptor& a, const descriptors::Descriptor& b) {
                  double za = freq.zipf(a.lemma), zb = freq.zipf(b.lemma);
                  if (za != zb) return za > zb;
                  return a.lemma < b.lemma;
              });
    return sorted;
}

GreedyResult greedy_cluster(const std::vector<std::string>& sorted,
                            const lexicon::SynonymLexicon& lexicon) {
    {
        std::set<std::string> unique(sorted.begin(), sorted.end());
        if (unique.size() != sorted.size())
            throw ValidationError("greedy_cluster input contains duplicate lemmas");
    }

    GreedyResult result;
    std::set<std::string> missing;
    std::vector<std::set<std::string>> synonyms;
    synonyms.reserve(sorted.size());
    for (const auto& lemma : sorted) {
        if (!lexicon.contains(lemma)) missing.insert(lemma);
        synonyms.push_back(lexicon.synonyms_of(lemma));
    }

    std::vector<bool> claimed(sorted.size(), false);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (claimed[i]) continue;
        SynonymCluster cluster;
        cluster.seed = sorted[i];
        cluster.members.push_back(sorted[i]);
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
            if (claimed[j]) continue;
            bool mutual = synonyms[i].count(sorted[j]) && synonyms[j].count(sorted[i]);
            if (mutual) {
                cluster.members.push_back(sorted[j]);
                claimed[j] = true;
            }
        }
        result.clusters.push_back(std::move(cluster));
    }
    result.missing_from_lexicon.assign(missing.begin(), missing.end());
    return result;
}

RepresentativeChoice select_representative(
    const SynonymCluster& cluster,
    const std::map<std::string, descriptors::Descriptor>& annotated) {
    if (cluster.members.empty()) throw ValidationError("cannot elect from an empty cluster");

    auto better = [&](const descriptors::Descriptor& a, const descriptors::Descriptor& b) {
        if (a.zipf != b.zipf) return a.zipf > b.zipf;
        return a.lemma < b.lemma;
    };

    const descriptors::Descriptor* best_single = nullptr;
    const descriptors::Descriptor* best_any = nullptr;
    for (const auto& member : cluster.members) {
        auto it = annotated.find(member);
        if (it == annotated.end())
            throw ValidationError("cluster member '" + member + "' has no annotation");
        const auto& d = it->second;
        if (!best_any || better(d, *best_any)) best_any = &d;
        if (d.sense_count == 1 && (!best_single || better(d, *best_single))) best_single = &d;
    }
    if (best_single) return {best_single->lemma, false};
    return {best_any->lemma, true};
}

void write_clusters(const std::filesystem::path& path,
                    const std::vector<SynonymCluster>& clusters) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(clusters.size());
    for (const auto& c : clusters) {
        std::string members;
        for (const auto& m : c.members) {
            if (!members.empty()) members.push_back(';');
            members += m;
        }
        rows.push_back({c.seed, members, c.representative, c.flagged ? "true" : "false"});
    }
    csv::write_file(path, {"seed", "members", "representative", "flagged"}, rows);
}

std::vector<SynonymCluster> load_clusters(const std::filesystem::path& path) {
    auto table = csv::read_file(path);
    int seed_col = table.column("seed");
    int members_col = table.column("members");
    int rep_col = table.column("representative");
    int flag_col = table.column("flagged");
    if (seed_col < 0 || members_col < 0 || rep_col < 0 || flag_col < 0)
        throw ValidationError(path.string() +
                              ": expected columns seed,members,representative,flagged");
    std::vector<SynonymCluster> out;
    for (const auto& row : table.rows) {
        SynonymCluster c;
        c.seed = row.fields.at(seed_col);
        std::stringstream members(row.fields.at(members_col));
        std::string member;
        while (std::getline(members, member, ';'))
            if (!member.empty()) c.members.push_back(member);
        c.representative = row.fields.at(rep_col);
        const auto& flag = row.fields.at(flag_col);
        if (flag != "true" && flag != "false")
            throw ValidationError(path.string() + " line " + std::to_string(row.line) +
                                  ": flagged must be true or false");
        c.flagged = flag == "true";
        if (c.members.empty() || c.members.front() != c.seed)
            throw ValidationError(path.string() + " line " + std::to_string(row.line) +
                                  ": seed must be the first member");
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace psylex::cluster
