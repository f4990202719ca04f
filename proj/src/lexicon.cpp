#include "psylex/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "psylex/csv.hpp"
#include "psylex/errors.hpp"

namespace psylex::lexicon {

namespace {

// nlohmann parses objects into a std::map, so a duplicate key would silently
// win; catch it during the SAX-style callback instead (root keys arrive at
// callback depth 1).
nlohmann::json parse_unique_root(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::set<std::string> seen;
    auto callback = [&](int depth, nlohmann::json::parse_event_t event,
                        nlohmann::json& value) -> bool {
        if (event == nlohmann::json::parse_event_t::key && depth == 1) {
            auto key = value.get<std::string>();
            if (!seen.insert(key).second)
                throw ValidationError(path.string() + ": duplicate key '" + key + "'");
        }
        return true;
    };
    try {
        return nlohmann::json::parse(in, callback);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace

SynonymLexicon SynonymLexicon::load(const std::filesystem::path& path) {
    auto doc = parse_unique_root(path);
    if (!doc.is_object()) throw ValidationError(path.string() + ": expected a JSON object");
    SynonymLexicon lex;
    for (const auto& [key, value] : doc.items()) {
        auto hash = key.rfind('#');
        if (hash == std::string::npos || hash == 0 || hash + 1 == key.size())
            throw ValidationError(path.string() + ": key '" + key +
                                  "' is not of the form lemma#index");
        Sense sense;
        sense.lemma = key.substr(0, hash);
        try {
            std::size_t used = 0;
            sense.sense_index = std::stoi(key.substr(hash + 1), &used);
            if (used != key.size() - hash - 1) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            throw ValidationError(path.string() + ": key '" + key + "' has a non-integer index");
        }
        if (sense.sense_index < 1)
            throw ValidationError(path.string() + ": key '" + key + "' has index < 1");
        if (!value.is_object())
            throw ValidationError(path.string() + ": entry '" + key + "' must be an object");
        if (!value.contains("definition") || !value.at("definition").is_string())
            throw ValidationError(path.string() + ": entry '" + key +
                                  "' needs a string 'definition'");
        if (!value.contains("synonyms") || !value.at("synonyms").is_array())
            throw ValidationError(path.string() + ": entry '" + key +
                                  "' needs a 'synonyms' array");
        sense.definition = value.at("definition").get<std::string>();
        for (const auto& s : value.at("synonyms")) {
            if (!s.is_string())
                throw ValidationError(path.string() + ": entry '" + key +
                                      "' has a non-string synonym");
            sense.synonyms.insert(s.get<std::string>());
        }
        lex.add(std::move(sense));
    }
    lex.validate();
    return lex;
}

void SynonymLexicon::add(Sense sense) {
    if (sense.lemma.empty()) throw ValidationError("sense with empty lemma");
    if (sense.sense_index < 1)
        throw ValidationError("sense index for '" + sense.lemma + "' must be >= 1");
    if (sense.synonyms.count(sense.lemma))
        throw ValidationError("'" + sense.lemma + "#" + std::to_string(sense.sense_index) +
                              "' lists itself as a synonym");
    auto& list = senses_[sense.lemma];
    for (const auto& existing : list)
        if (existing.sense_index == sense.sense_index)
            throw ValidationError("duplicate sense '" + sense.lemma + "#" +
                                  std::to_string(sense.sense_index) + "'");
    list.push_back(std::move(sense));
    std::sort(list.begin(), list.end(),
              [](const Sense& a, const Sense& b) { return a.sense_index < b.sense_index; });
}

void SynonymLexicon::validate() const {
    for (const auto& [lemma, list] : senses_) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (list[i].sense_index != static_cast<int>(i) + 1)
                throw ValidationError("lemma '" + lemma + "' has " + std::to_string(list.size()) +
                                      " senses but indices are not contiguous from 1");
        }
    }
}

const std::vector<Sense>& SynonymLexicon::senses(const std::string& lemma) const {
    static const std::vector<Sense> empty;
    auto it = senses_.find(lemma);
    return it == senses_.end() ? empty : it->second;
}

int SynonymLexicon::sense_count(const std::string& lemma) const {
    auto it = senses_.find(lemma);
    return it == senses_.end() ? 0 : static_cast<int>(it->second.size());
}

bool SynonymLexicon::contains(const std::string& lemma) const {
    return senses_.count(lemma) > 0;
}

std::set<std::string> SynonymLexicon::synonyms_of(const std::string& lemma) const {
    std::set<std::string> out;
    for (const auto& sense : senses(lemma)) out.insert(sense.synonyms.begin(), sense.synonyms.end());
    return out;
}

std::size_t SynonymLexicon::total_senses() const {
    std::size_t n = 0;
    for (const auto& [lemma, list] : senses_) n += list.size();
    return n;
}

std::string SynonymLexicon::serialize() const {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [lemma, list] : senses_) {
        for (const auto& sense : list) {
            nlohmann::json entry;
            entry["definition"] = sense.definition;
            entry["synonyms"] = sense.synonyms;
            doc[lemma + "#" + std::to_string(sense.sense_index)] = std::move(entry);
        }
    }
    return doc.dump(2) + "\n";
}

void SynonymLexicon::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << serialize();
}

FrequencyTable FrequencyTable::load(const std::filesystem::path& path) {
    auto table = csv::read_file(path);
    int lemma_col = table.column("lemma");
    int zipf_col = table.column("zipf");
    if (lemma_col < 0 || zipf_col < 0)
        throw ValidationError(path.string() + ": expected columns lemma,zipf");
    FrequencyTable freq;
    for (const auto& row : table.rows) {
        const auto& lemma = row.fields.at(lemma_col);
        if (lemma.empty())
            throw ValidationError(path.string() + " line " + std::to_string(row.line) +
                                  ": empty lemma");
        if (freq.scores_.count(lemma))
            throw ValidationError(path.string() + " line " + std::to_string(row.line) +
                                  ": duplicate lemma '" + lemma + "'");
        double zipf = 0.0;
        try {
            zipf = std::stod(row.fields.at(zipf_col));
        } catch (const std::exception&) {
            throw ParseError(path.string() + " line " + std::to_string(row.line) +
                             ": zipf '" + row.fields.at(zipf_col) + "' is not a number");
        }
        freq.set(lemma, zipf);
    }
    return freq;
}

void FrequencyTable::set(const std::string& lemma, double zipf) {
    if (!std::isfinite(zipf) || zipf < 0.0 || zipf > 8.0)
        throw ValidationError("zipf score for '" + lemma + "' must be in [0, 8]");
    scores_[lemma] = zipf;
}

double FrequencyTable::zipf(const std::string& lemma) const {
    auto it = scores_.find(lemma);
    return it == scores_.end() ? 0.0 : it->second;
}

AnnotateResult annotate(const std::vector<descriptors::Descriptor>& descriptors,
                        const SynonymLexicon& lexicon, const FrequencyTable& freq) {
    AnnotateResult result;
    result.descriptors = descriptors;
    for (auto& d : result.descriptors) {
        d.zipf = freq.zipf(d.lemma);
        d.sense_count = lexicon.sense_count(d.lemma);
        if (d.sense_count == 0) result.unknown_sense.push_back(d.lemma);
    }
    return result;
}

}  // namespace psylex::lexicon
