#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace psylex::descriptors {

enum class Source { survey, lab, reviews, goldberg };

std::string to_string(Source s);
Source source_from_string(const std::string& s);

struct Descriptor {
    std::string lemma;
    std::set<Source> provenance;  // non-empty
    double zipf = 0.0;            // 0 when unknown
    int sense_count = 0;          // filled by the lexicon module
};

// Depth-1 rewrite maps applied in a fixed order: typo -> multiword ->
// noun-to-adjective -> negation folding. The loader rejects documents whose
// mapping values are not fixed points of the whole pipeline, which makes
// normalization idempotent for every document that loads.
struct NormalizationRules {
    std::map<std::string, std::string> typo_map;
    std::map<std::string, std::string> noun_to_adjective;
    std::map<std::string, std::string> antonym_map;  // "not X" -> antonym_map[X]
    std::map<std::string, std::string> multiword_simplify;

    static NormalizationRules load(const std::filesystem::path& path);
    void validate() const;
};

struct NormalizeResult {
    std::string lemma;
    bool needs_review = false;  // negated word with no antonym mapping
};

NormalizeResult normalize_descriptor(std::string_view raw, const NormalizationRules& rules);

struct ExclusionLexicons {
    // Criterion name -> lemma set; names are fixed, sets may overlap.
    std::map<std::string, std::set<std::string>> criteria;

    static const std::vector<std::string>& criterion_names();
    static ExclusionLexicons load(const std::filesystem::path& path);
    // Criteria matching a lemma, in declaration order.
    std::vector<std::string> matching(const std::string& lemma) const;
};

std::vector<Descriptor> merge_sets(const std::map<Source, std::set<std::string>>& sets);

struct ExclusionReport {
    // lemma -> criteria that removed it (declaration order; "opposite_pair" last)
    std::map<std::string, std::vector<std::string>> excluded;
};

struct ExclusionOutcome {
    std::vector<Descriptor> kept;
    ExclusionReport report;
};

// opposite_pairs maps each negative form to its positive counterpart; the
// negative form is dropped only when the positive is present in the input.
ExclusionOutcome apply_exclusions(const std::vector<Descriptor>& descriptors,
                                  const ExclusionLexicons& lexicons,
                                  const std::map<std::string, std::string>& opposite_pairs);

std::map<std::string, std::string> load_opposite_pairs(const std::filesystem::path& path);

// Descriptor set CSV: `lemma,provenance`, provenance as semicolon-joined tags.
std::vector<Descriptor> load_descriptor_set(const std::filesystem::path& path);
void write_descriptor_set(const std::filesystem::path& path,
                          const std::vector<Descriptor>& descriptors);

}  // namespace psylex::descriptors
