#include "psylex/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "psylex/csv.hpp"
#include "psylex/errors.hpp"

namespace psylex::corpus {

using nlohmann::json;

std::string to_string(Pos pos) {
    return pos == Pos::adjective ? "adjective" : "adverb";
}

Pos pos_from_string(const std::string& s) {
    if (s == "adjective") return Pos::adjective;
    if (s == "adverb") return Pos::adverb;
    throw ValidationError("unknown part of speech: '" + s + "' (expected adjective or adverb)");
}

namespace {

void check_review(Review& r, const std::string& origin, std::size_t line,
                  std::unordered_set<std::string>& seen_ids, std::vector<Review>& out) {
    if (r.star_rating < 1 || r.star_rating > 5) {
        throw ValidationError(origin + " line " + std::to_string(line) + ": star_rating " +
                              std::to_string(r.star_rating) + " out of range 1..5 (review_id '" +
                              r.review_id + "')");
    }
    if (r.review_id.empty()) {
        throw ValidationError(origin + " line " + std::to_string(line) + ": empty review_id");
    }
    if (!seen_ids.insert(r.review_id).second) {
        throw ValidationError(origin + " line " + std::to_string(line) +
                              ": duplicate review_id '" + r.review_id + "'");
    }
    out.push_back(std::move(r));
}

std::vector<Review> load_reviews_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path.string());

    std::vector<Review> reviews;
    std::unordered_set<std::string> seen_ids;
    std::string line_text;
    std::size_t line = 0;
    while (std::getline(in, line_text)) {
        ++line;
        if (!line_text.empty() && line_text.back() == '\r') line_text.pop_back();
        if (line_text.empty()) continue;
        json record;
        try {
            record = json::parse(line_text);
        } catch (const json::parse_error& e) {
            throw ParseError(path.string() + " line " + std::to_string(line) + ": " + e.what());
        }
        if (!record.is_object()) {
            throw ParseError(path.string() + " line " + std::to_string(line) +
                             ": expected a JSON object");
        }
        Review r;
        try {
            r.agent_id = record.at("agent_id").get<std::string>();
            if (!record.at("star_rating").is_number_integer()) {
                throw ParseError(path.string() + " line " + std::to_string(line) +
                                 ": star_rating must be an integer");
            }
            r.star_rating = record.at("star_rating").get<int>();
            r.text = record.at("text").get<std::string>();
            r.review_id = record.at("review_id").get<std::string>();
        } catch (const json::exception& e) {
            throw ParseError(path.string() + " line " + std::to_string(line) + ": " + e.what());
        }
        check_review(r, path.string(), line, seen_ids, reviews);
    }
    return reviews;
}

std::vector<Review> load_reviews_csv(const std::filesystem::path& path) {
    csv::Table table = csv::read_file(path);
    if (table.header.empty()) return {};
    int c_agent = table.column("agent_id");
    int c_star = table.column("star_rating");
    int c_text = table.column("text");
    int c_id = table.column("review_id");
    if (c_agent < 0 || c_star < 0 || c_text < 0 || c_id < 0) {
        throw ParseError(path.string() +
                         ": header must contain agent_id, star_rating, text, review_id");
    }
    std::vector<Review> reviews;
    std::unordered_set<std::string> seen_ids;
    for (const auto& row : table.rows) {
        if (row.fields.size() != table.header.size()) {
            throw ParseError(path.string() + " line " + std::to_string(row.line) + ": expected " +
                             std::to_string(table.header.size()) + " fields, got " +
                             std::to_string(row.fields.size()));
        }
        Review r;
        r.agent_id = row.fields[c_agent];
        r.text = row.fields[c_text];
        r.review_id = row.fields[c_id];
        const std::string& star = row.fields[c_star];
        try {
            std::size_t used = 0;
            r.star_rating = std::stoi(star, &used);
            if (used != star.size()) throw std::invalid_argument(star);
        } catch (const std::exception&) {
            throw ParseError(path.string() + " line " + std::to_string(row.line) +
                             ": star_rating '" + star + "' is not an integer");
        }
        check_review(r, path.string(), row.line, seen_ids, reviews);
    }
    return reviews;
}

}  // namespace

std::vector<Review> load_reviews(const std::filesystem::path& path, ReviewFormat format) {
    return format == ReviewFormat::json_lines ? load_reviews_jsonl(path) : load_reviews_csv(path);
}

PosLexicon load_pos_lexicon(const std::filesystem::path& path) {
    csv::Table table = csv::read_file(path);
    int c_lemma = table.column("lemma");
    int c_pos = table.column("pos");
    if (c_lemma < 0 || c_pos < 0) {
        throw ParseError(path.string() + ": header must contain lemma, pos");
    }
    PosLexicon lexicon;
    for (const auto& row : table.rows) {
        if (row.fields.size() != table.header.size()) {
            throw ParseError(path.string() + " line " + std::to_string(row.line) + ": ragged row");
        }
        const std::string& lemma = row.fields[c_lemma];
        if (lemma.empty()) {
            throw ValidationError(path.string() + " line " + std::to_string(row.line) +
                                  ": empty lemma");
        }
        lexicon[lemma] = pos_from_string(row.fields[c_pos]);
    }
    if (lexicon.empty()) {
        throw ValidationError(path.string() + ": POS lexicon is empty");
    }
    return lexicon;
}

namespace {

inline bool is_letter(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline char lower(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string token;
    auto flush = [&] {
        if (!token.empty()) {
            tokens.push_back(token);
            token.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        unsigned char c = text[i];
        if (is_letter(c)) {
            token.push_back(lower(c));
        } else if (c == '-' && !token.empty() && i + 1 < text.size() &&
                   is_letter(static_cast<unsigned char>(text[i + 1]))) {
            token.push_back('-');
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::vector<CandidateTerm> extract_candidate_terms(const std::vector<Review>& reviews,
                                                   const PosLexicon& lexicon) {
    if (lexicon.empty()) throw ValidationError("POS lexicon is empty");

    constexpr std::size_t kMaxExamples = 20;
    std::unordered_map<std::string, CandidateTerm> terms;
    for (const auto& review : reviews) {
        std::unordered_set<std::string> seen_in_review;
        for (const auto& token : tokenize(review.text)) {
            auto pos_it = lexicon.find(token);
            if (pos_it == lexicon.end()) continue;  // unknown tokens are not candidates
            if (!seen_in_review.insert(token).second) continue;  // presence, not occurrences
            auto& term = terms[token];
            if (term.lemma.empty()) {
                term.lemma = token;
                term.pos = pos_it->second;
            }
            ++term.corpus_count;
            if (term.example_review_ids.size() < kMaxExamples) {
                term.example_review_ids.push_back(review.review_id);
            }
        }
    }

    std::vector<CandidateTerm> out;
    out.reserve(terms.size());
    for (auto& [lemma, term] : terms) out.push_back(std::move(term));
    std::sort(out.begin(), out.end(), [](const CandidateTerm& a, const CandidateTerm& b) {
        if (a.corpus_count != b.corpus_count) return a.corpus_count > b.corpus_count;
        return a.lemma < b.lemma;
    });
    return out;
}

LabelPair load_label_pairs(const std::filesystem::path& path) {
    csv::Table table = csv::read_file(path);
    int c_a = table.column("rater_a");
    int c_b = table.column("rater_b");
    if (c_a < 0 || c_b < 0) {
        throw ParseError(path.string() + ": header must contain rater_a, rater_b");
    }
    LabelPair pair;
    for (const auto& row : table.rows) {
        if (row.fields.size() != table.header.size()) {
            throw ParseError(path.string() + " line " + std::to_string(row.line) + ": ragged row");
        }
        pair.labels_a.push_back(row.fields[c_a]);
        pair.labels_b.push_back(row.fields[c_b]);
    }
    return pair;
}

double cohen_kappa(const LabelPair& pair) {
    const auto& a = pair.labels_a;
    const auto& b = pair.labels_b;
    if (a.size() != b.size()) {
        throw ValidationError("label sequences differ in length: " + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()));
    }
    if (a.empty()) throw ValidationError("label sequences are empty");

    const std::size_t n = a.size();
    std::size_t agree = 0;
    std::map<std::string, std::size_t> count_a, count_b;
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == b[i]) ++agree;
        ++count_a[a[i]];
        ++count_b[b[i]];
    }
    if (agree == n) return 1.0;  // covers the doubly-constant identical case (p_e = 1)

    double p_o = static_cast<double>(agree) / static_cast<double>(n);
    double p_e = 0.0;
    for (const auto& [label, ca] : count_a) {
        auto it = count_b.find(label);
        if (it == count_b.end()) continue;
        p_e += (static_cast<double>(ca) / n) * (static_cast<double>(it->second) / n);
    }
    return (p_o - p_e) / (1.0 - p_e);
}

OverlapTable overlap_report(const std::map<std::string, std::set<std::string>>& sets) {
    if (sets.size() < 2) {
        throw ValidationError("overlap report requires at least 2 named sets, got " +
                              std::to_string(sets.size()));
    }
    std::map<std::string, std::vector<std::string>> membership;  // element -> set names
    for (const auto& [name, members] : sets) {
        for (const auto& element : members) membership[element].push_back(name);
    }
    OverlapTable table;
    for (const auto& [element, names] : membership) {
        ++table[names];  // names are already sorted: sets is an ordered map
    }
    return table;
}

}  // namespace psylex::corpus
