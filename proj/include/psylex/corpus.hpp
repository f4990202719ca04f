#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace psylex::corpus {

struct Review {
    std::string agent_id;
    int star_rating = 0;  // 1..5
    std::string text;
    std::string review_id;  // unique within a corpus
};

enum class Pos { adjective, adverb };

std::string to_string(Pos pos);
Pos pos_from_string(const std::string& s);

struct CandidateTerm {
    std::string lemma;
    Pos pos = Pos::adjective;
    int corpus_count = 0;  // reviews containing the lemma, not token count
    std::vector<std::string> example_review_ids;  // at most 20, input order
};

// lemma -> part of speech; only adjectives/adverbs are candidates
using PosLexicon = std::map<std::string, Pos>;

enum class ReviewFormat { json_lines, csv };

std::vector<Review> load_reviews(const std::filesystem::path& path, ReviewFormat format);
PosLexicon load_pos_lexicon(const std::filesystem::path& path);

// Lowercases and splits on anything that is not a letter; hyphens survive only
// strictly between two letters ("easy-to-use" is one token). Bytes >= 0x80 are
// treated as letters so UTF-8 words pass through whole.
std::vector<std::string> tokenize(std::string_view text);

std::vector<CandidateTerm> extract_candidate_terms(const std::vector<Review>& reviews,
                                                   const PosLexicon& lexicon);

struct LabelPair {
    std::vector<std::string> labels_a;
    std::vector<std::string> labels_b;
};

LabelPair load_label_pairs(const std::filesystem::path& path);  // CSV rater_a,rater_b

// Chance-corrected agreement; exactly 1 on perfect agreement (including the
// doubly-constant case where the formula is 0/0).
double cohen_kappa(const LabelPair& pair);

// Venn cells over named sets: each key names the sets an element belongs to,
// only non-empty cells appear. Cell counts sum to |union|.
using OverlapTable = std::map<std::vector<std::string>, std::size_t>;

OverlapTable overlap_report(const std::map<std::string, std::set<std::string>>& sets);

}  // namespace psylex::corpus
