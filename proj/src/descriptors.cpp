#include "psylex/descriptors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "psylex/csv.hpp"
#include "psylex/errors.hpp"

namespace psylex::descriptors {

namespace {

std::string canonical(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

const std::string* lookup(const std::map<std::string, std::string>& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? nullptr : &it->second;
}

nlohmann::json parse_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return doc;
}

std::map<std::string, std::string> read_string_map(const nlohmann::json& doc,
                                                   const std::string& field,
                                                   const std::string& origin) {
    std::map<std::string, std::string> out;
    if (!doc.contains(field)) return out;
    const auto& obj = doc.at(field);
    if (!obj.is_object())
        throw ValidationError(origin + ": field '" + field + "' must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (!value.is_string())
            throw ValidationError(origin + ": '" + field + "." + key + "' must be a string");
        out[key] = value.get<std::string>();
    }
    return out;
}

void check_map_entries(const std::map<std::string, std::string>& m, const std::string& name) {
    for (const auto& [key, value] : m) {
        if (key.empty() || value.empty())
            throw ValidationError(name + ": empty key or value");
        if (key != canonical(key))
            throw ValidationError(name + ": key '" + key + "' is not lowercase/trimmed");
        if (value != canonical(value))
            throw ValidationError(name + ": value '" + value + "' is not lowercase/trimmed");
        if (key == value)
            throw ValidationError(name + ": key '" + key + "' maps to itself");
    }
}

}  // namespace

std::string to_string(Source s) {
    switch (s) {
        case Source::survey: return "survey";
        case Source::lab: return "lab";
        case Source::reviews: return "reviews";
        case Source::goldberg: return "goldberg";
    }
    throw ValidationError("unknown source tag");
}

Source source_from_string(const std::string& s) {
    if (s == "survey") return Source::survey;
    if (s == "lab") return Source::lab;
    if (s == "reviews") return Source::reviews;
    if (s == "goldberg") return Source::goldberg;
    throw ValidationError("unknown source tag '" + s + "'");
}

NormalizationRules NormalizationRules::load(const std::filesystem::path& path) {
    auto doc = parse_json_file(path);
    if (!doc.is_object()) throw ValidationError(path.string() + ": expected a JSON object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (key != "typo_map" && key != "noun_to_adjective" && key != "antonym_map" &&
            key != "multiword_simplify")
            throw ValidationError(path.string() + ": unknown field '" + key + "'");
    }
    NormalizationRules rules;
    rules.typo_map = read_string_map(doc, "typo_map", path.string());
    rules.noun_to_adjective = read_string_map(doc, "noun_to_adjective", path.string());
    rules.antonym_map = read_string_map(doc, "antonym_map", path.string());
    rules.multiword_simplify = read_string_map(doc, "multiword_simplify", path.string());
    rules.validate();
    return rules;
}

void NormalizationRules::validate() const {
    check_map_entries(typo_map, "typo_map");
    check_map_entries(noun_to_adjective, "noun_to_adjective");
    check_map_entries(antonym_map, "antonym_map");
    check_map_entries(multiword_simplify, "multiword_simplify");
    for (const auto& [key, value] : antonym_map) {
        if (key.rfind("not ", 0) == 0)
            throw ValidationError("antonym_map: key '" + key +
                                  "' starts with 'not '; keys must be the bare word");
        if (value.rfind("not ", 0) == 0)
            throw ValidationError("antonym_map: value '" + value +
                                  "' is itself a negation");
    }
    // Every rewrite target must be stable under the whole pipeline; this is
    // what makes normalize_descriptor idempotent.
    auto check_fixed_point = [this](const std::string& value, const std::string& name) {
        auto result = normalize_descriptor(value, *this);
        if (result.lemma != value)
            throw ValidationError(name + ": value '" + value + "' is not a fixed point (renormalizes to '" +
                                  result.lemma + "')");
    };
    for (const auto& [key, value] : typo_map) { (void)key; check_fixed_point(value, "typo_map"); }
    for (const auto& [key, value] : noun_to_adjective) { (void)key; check_fixed_point(value, "noun_to_adjective"); }
    for (const auto& [key, value] : antonym_map) { (void)key; check_fixed_point(value, "antonym_map"); }
    for (const auto& [key, value] : multiword_simplify) { (void)key; check_fixed_point(value, "multiword_simplify"); }
}

NormalizeResult normalize_descriptor(std::string_view raw, const NormalizationRules& rules) {
    std::string lemma = canonical(raw);
    if (lemma.empty()) throw ValidationError("cannot normalize an empty descriptor");
    if (const auto* v = lookup(rules.typo_map, lemma)) lemma = *v;
    if (const auto* v = lookup(rules.multiword_simplify, lemma)) lemma = *v;
    if (const auto* v = lookup(rules.noun_to_adjective, lemma)) lemma = *v;
    NormalizeResult result;
    if (lemma.rfind("not ", 0) == 0) {
        std::string base = lemma.substr(4);
        if (const auto* v = lookup(rules.antonym_map, base)) {
            lemma = *v;
        } else {
            result.needs_review = true;
        }
    }
    result.lemma = lemma;
    return result;
}

const std::vector<std::string>& ExclusionLexicons::criterion_names() {
    static const std::vector<std::string> names = {
        "slanginess",     "difficulty", "ambiguity",           "sex_gender_demographics",
        "over_evaluation", "peripheral", "anatomical_physical", "impression_on_user",
    };
    return names;
}

ExclusionLexicons ExclusionLexicons::load(const std::filesystem::path& path) {
    auto doc = parse_json_file(path);
    if (!doc.is_object()) throw ValidationError(path.string() + ": expected a JSON object");
    const auto& names = criterion_names();
    ExclusionLexicons lex;
    for (const auto& name : names) lex.criteria[name] = {};
    for (const auto& [key, value] : doc.items()) {
        if (std::find(names.begin(), names.end(), key) == names.end())
            throw ValidationError(path.string() + ": unknown exclusion criterion '" + key + "'");
        if (!value.is_array())
            throw ValidationError(path.string() + ": criterion '" + key + "' must be an array");
        for (const auto& item : value) {
            if (!item.is_string())
                throw ValidationError(path.string() + ": criterion '" + key +
                                      "' has a non-string entry");
            auto lemma = item.get<std::string>();
            if (lemma.empty() || lemma != canonical(lemma))
                throw ValidationError(path.string() + ": criterion '" + key + "' entry '" + lemma +
                                      "' is not a lowercase lemma");
            lex.criteria[key].insert(lemma);
        }
    }
    return lex;
}

std::vector<std::string> ExclusionLexicons::matching(const std::string& lemma) const {
    std::vector<std::string> out;
    for (const auto& name : criterion_names()) {
        auto it = criteria.find(name);
        if (it != criteria.end() && it->second.count(lemma)) out.push_back(name);
    }
    return out;
}

std::vector<Descriptor> merge_sets(const std::map<Source, std::set<std::string>>& sets) {
    std::map<std::string, std::set<Source>> merged;
    for (const auto& [source, lemmas] : sets) {
        for (const auto& lemma : lemmas) {
            if (lemma.empty() || lemma != canonical(lemma))
                throw ValidationError("merge_sets: '" + lemma + "' from " + to_string(source) +
                                      " is not a normalized lemma");
            merged[lemma].insert(source);
        }
    }
    std::vector<Descriptor> out;
    out.reserve(merged.size());
    for (auto& [lemma, provenance] : merged)
        out.push_back(Descriptor{lemma, std::move(provenance), 0.0, 0});
    return out;
}

ExclusionOutcome apply_exclusions(const std::vector<Descriptor>& descriptors,
                                  const ExclusionLexicons& lexicons,
                                  const std::map<std::string, std::string>& opposite_pairs) {
    std::set<std::string> present;
    for (const auto& d : descriptors) present.insert(d.lemma);

    ExclusionOutcome outcome;
    for (const auto& d : descriptors) {
        std::vector<std::string> reasons = lexicons.matching(d.lemma);
        auto pair = opposite_pairs.find(d.lemma);
        if (pair != opposite_pairs.end() && present.count(pair->second))
            reasons.push_back("opposite_pair");
        if (reasons.empty()) {
            outcome.kept.push_back(d);
        } else {
            outcome.report.excluded[d.lemma] = std::move(reasons);
        }
    }
    return outcome;
}

std::map<std::string, std::string> load_opposite_pairs(const std::filesystem::path& path) {
    auto doc = parse_json_file(path);
    if (!doc.is_object()) throw ValidationError(path.string() + ": expected a JSON object");
    std::map<std::string, std::string> pairs;
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_string())
            throw ValidationError(path.string() + ": pair '" + key + "' must map to a string");
        pairs[key] = value.get<std::string>();
    }
    check_map_entries(pairs, path.string());
    return pairs;
}

std::vector<Descriptor> load_descriptor_set(const std::filesystem::path& path) {
    auto table = csv::read_file(path);
    int lemma_col = table.column("lemma");
    int prov_col = table.column("provenance");
    if (lemma_col < 0 || prov_col < 0)
        throw ValidationError(path.string() + ": expected columns lemma,provenance");
    std::vector<Descriptor> out;
    std::set<std::string> seen;
    for (const auto& row : table.rows) {
        Descriptor d;
        d.lemma = row.fields.at(lemma_col);
        if (d.lemma.empty() || d.lemma != canonical(d.lemma))
            throw ValidationError(path.string() + " line " + std::to_string(row.line) +
                                  ": '" + d.lemma + "' is not a lowercase lemma");
        if (!seen.insert(d.lemma).second)
            throw ValidationError(path.string() + " line " + std::to_string(row.line) +
                                  ": duplicate lemma '" + d.lemma + "'");
        std::stringstream tags(row.fields.at(prov_col));
        std::string tag;
        while (std::getline(tags, tag, ';'))
            if (!tag.empty()) d.provenance.insert(source_from_string(tag));
        if (d.provenance.empty())
            throw ValidationError(path.string() + " line " + std::to_string(row.line) +
                                  ": descriptor '" + d.lemma + "' has no provenance");
        out.push_back(std::move(d));
    }
    return out;
}

void write_descriptor_set(const std::filesystem::path& path,
                          const std::vector<Descriptor>& descriptors) {
    auto sorted = descriptors;
    std::sort(sorted.begin(), sorted.end(),
              [](const Descriptor& a, const Descriptor& b) { return a.lemma < b.lemma; });
    std::vector<std::vector<std::string>> rows;
    rows.reserve(sorted.size());
    for (const auto& d : sorted) {
        std::string tags;
        for (auto s : d.provenance) {
            if (!tags.empty()) tags.push_back(';');
            tags += to_string(s);
        }
        rows.push_back({d.lemma, tags});
    }
    csv::write_file(path, {"lemma", "provenance"}, rows);
}

}  // namespace psylex::descriptors
