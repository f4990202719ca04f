#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "psylex/descriptors.hpp"

namespace psylex::lexicon {

struct Sense {
    std::string lemma;
    int sense_index = 1;  // 1-based; a lemma with n senses carries indices 1..n
    std::string definition;
    std::set<std::string> synonyms;  // never contains the lemma itself
};

class SynonymLexicon {
  public:
    // JSON map "lemma#index" -> {definition, synonyms}; duplicate keys and
    // index gaps are rejected.
    static SynonymLexicon load(const std::filesystem::path& path);

    void add(Sense sense);  // validates uniqueness and self-reference
    void validate() const;  // index contiguity per lemma

    const std::vector<Sense>& senses(const std::string& lemma) const;
    int sense_count(const std::string& lemma) const;
    bool contains(const std::string& lemma) const;
    // Union of the lemma's per-sense synonym lists; empty when absent.
    std::set<std::string> synonyms_of(const std::string& lemma) const;

    const std::map<std::string, std::vector<Sense>>& entries() const { return senses_; }
    std::size_t total_senses() const;

    void save(const std::filesystem::path& path) const;
    std::string serialize() const;

  private:
    std::map<std::string, std::vector<Sense>> senses_;  // ordered by sense_index
};

class FrequencyTable {
  public:
    // CSV `lemma,zipf`, zipf in [0, 8]
    static FrequencyTable load(const std::filesystem::path& path);

    void set(const std::string& lemma, double zipf);
    double zipf(const std::string& lemma) const;  // 0 when absent
    std::size_t size() const { return scores_.size(); }

  private:
    std::map<std::string, double> scores_;
};

struct AnnotateResult {
    std::vector<descriptors::Descriptor> descriptors;  // same order and count as input
    std::vector<std::string> unknown_sense;            // sense_count 0, for review
};

AnnotateResult annotate(const std::vector<descriptors::Descriptor>& descriptors,
                        const SynonymLexicon& lexicon, const FrequencyTable& freq);

}  // namespace psylex::lexicon
