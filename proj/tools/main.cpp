#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "psylex/cluster.hpp"
#include "psylex/corpus.hpp"
#include "psylex/csv.hpp"
#include "psylex/descriptors.hpp"
#include "psylex/efa.hpp"
#include "psylex/errors.hpp"
#include "psylex/lexicon.hpp"
#include "psylex/manifest.hpp"
#include "psylex/ratings.hpp"
#include "psylex/simulate.hpp"

namespace fs = std::filesystem;
using psylex::ParseError;
using psylex::ValidationError;

namespace {

struct Config {
    std::string corpus;
    std::string review_format = "jsonl";
    std::string pos_lexicon;
    std::string raw_descriptors;
    std::string rules;
    std::string descriptors;
    std::string exclusions;
    std::string opposite_pairs;
    std::string synonym_lexicon;
    std::string frequency;
    std::string ratings;
    std::string planted_model;
    std::string solution;
    std::map<std::string, std::string> sets;
    std::string source_tag = "reviews";
    std::string out_dir = ".";

    double min_duration_s = 480;
    double max_missed_fraction = 0.25;
    double loading_threshold = 0.30;
    double gap_threshold = 0.20;
    double gamma = 0.0;
    int top_n = 20;
    int k = 0;  // 0: select the factor count automatically
    int n = 100;
    std::optional<std::uint64_t> seed;
    bool kaiser_normalize = false;
    int rotation_starts = 1;
};

Config load_config_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw ValidationError(path.string() + ": expected a JSON object");

    Config cfg;
    auto get_string = [&](const char* key, std::string& target) {
        if (!doc.contains(key)) return;
        if (!doc.at(key).is_string())
            throw ValidationError(path.string() + ": '" + key + "' must be a string");
        target = doc.at(key).get<std::string>();
    };
    auto get_double = [&](const char* key, double& target) {
        if (!doc.contains(key)) return;
        if (!doc.at(key).is_number())
            throw ValidationError(path.string() + ": '" + key + "' must be a number");
        target = doc.at(key).get<double>();
    };
    auto get_int = [&](const char* key, int& target) {
        if (!doc.contains(key)) return;
        if (!doc.at(key).is_number_integer())
            throw ValidationError(path.string() + ": '" + key + "' must be an integer");
        target = doc.at(key).get<int>();
    };
    auto get_bool = [&](const char* key, bool& target) {
        if (!doc.contains(key)) return;
        if (!doc.at(key).is_boolean())
            throw ValidationError(path.string() + ": '" + key + "' must be a boolean");
        target = doc.at(key).get<bool>();
    };

    static const std::set<std::string> known = {
        "corpus",        "review_format",    "pos_lexicon",       "raw_descriptors",
        "rules",         "descriptors",      "exclusions",        "opposite_pairs",
        "synonym_lexicon", "frequency",      "ratings",           "planted_model",
        "solution",      "sets",             "source_tag",        "out_dir",
        "min_duration_s", "max_missed_fraction", "loading_threshold", "gap_threshold",
        "gamma",         "top_n",            "k",                 "n",
        "seed",          "kaiser_normalize", "rotation_starts",
    };
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (!known.count(key))
            throw ValidationError(path.string() + ": unknown config key '" + key + "'");
    }

    get_string("corpus", cfg.corpus);
    get_string("review_format", cfg.review_format);
    get_string("pos_lexicon", cfg.pos_lexicon);
    get_string("raw_descriptors", cfg.raw_descriptors);
    get_string("rules", cfg.rules);
    get_string("descriptors", cfg.descriptors);
    get_string("exclusions", cfg.exclusions);
    get_string("opposite_pairs", cfg.opposite_pairs);
    get_string("synonym_lexicon", cfg.synonym_lexicon);
    get_string("frequency", cfg.frequency);
    get_string("ratings", cfg.ratings);
    get_string("planted_model", cfg.planted_model);
    get_string("solution", cfg.solution);
    get_string("source_tag", cfg.source_tag);
    get_string("out_dir", cfg.out_dir);
    get_double("min_duration_s", cfg.min_duration_s);
    get_double("max_missed_fraction", cfg.max_missed_fraction);
    get_double("loading_threshold", cfg.loading_threshold);
    get_double("gap_threshold", cfg.gap_threshold);
    get_double("gamma", cfg.gamma);
    get_int("top_n", cfg.top_n);
    get_int("k", cfg.k);
    get_int("n", cfg.n);
    get_bool("kaiser_normalize", cfg.kaiser_normalize);
    get_int("rotation_starts", cfg.rotation_starts);
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_integer())
            throw ValidationError(path.string() + ": 'seed' must be an integer");
        cfg.seed = doc.at("seed").get<std::uint64_t>();
    }
    if (doc.contains("sets")) {
        if (!doc.at("sets").is_object())
            throw ValidationError(path.string() + ": 'sets' must be an object of name -> path");
        for (const auto& [name, value] : doc.at("sets").items()) {
            if (!value.is_string())
                throw ValidationError(path.string() + ": sets entry '" + name +
                                      "' must be a string path");
            cfg.sets[name] = value.get<std::string>();
        }
    }
    return cfg;
}

std::string knob_echo(const Config& cfg) {
    nlohmann::json doc;
    doc["review_format"] = cfg.review_format;
    doc["source_tag"] = cfg.source_tag;
    doc["min_duration_s"] = cfg.min_duration_s;
    doc["max_missed_fraction"] = cfg.max_missed_fraction;
    doc["loading_threshold"] = cfg.loading_threshold;
    doc["gap_threshold"] = cfg.gap_threshold;
    doc["gamma"] = cfg.gamma;
    doc["top_n"] = cfg.top_n;
    doc["k"] = cfg.k;
    doc["n"] = cfg.n;
    doc["seed"] = cfg.seed ? nlohmann::json(*cfg.seed) : nlohmann::json(nullptr);
    doc["kaiser_normalize"] = cfg.kaiser_normalize;
    doc["rotation_starts"] = cfg.rotation_starts;
    return doc.dump();
}

const std::string& require_path(const std::string& value, const char* name) {
    if (value.empty())
        throw ValidationError(std::string("missing input: set '") + name +
                              "' in the config file or pass the matching option");
    if (!fs::exists(value))
        throw ValidationError(std::string(name) + " path does not exist: " + value);
    return value;
}

// Collects outputs for one subcommand run: tracks written files so failures
// leave no partial artifacts, and closes with a hash manifest.
class OutputSession {
  public:
    OutputSession(const Config& cfg, std::string subcommand)
        : dir_(cfg.out_dir), subcommand_(std::move(subcommand)) {
        manifest_.tool = "psylex";
        manifest_.version = PSYLEX_VERSION;
        manifest_.subcommand = subcommand_;
        manifest_.config_json = knob_echo(cfg);
        fs::create_directories(dir_);
    }

    fs::path path(const std::string& name) {
        written_.push_back(dir_ / name);
        return written_.back();
    }

    void input(const std::string& as_given) {
        manifest_.inputs[as_given] = psylex::manifest::hash_file(as_given);
    }

    void finish() {
        for (const auto& file : written_)
            manifest_.outputs[file.filename().string()] = psylex::manifest::hash_file(file);
        psylex::manifest::write(dir_ / (subcommand_ + "_manifest.json"), manifest_);
    }

    void discard() {
        for (const auto& file : written_) {
            std::error_code ec;
            fs::remove(file, ec);
        }
    }

  private:
    fs::path dir_;
    std::string subcommand_;
    psylex::manifest::Manifest manifest_;
    std::vector<fs::path> written_;
};

template <typename Body>
int with_session(const Config& cfg, const char* subcommand, Body body) {
    OutputSession session(cfg, subcommand);
    try {
        int status = body(session);
        session.finish();
        return status;
    } catch (...) {
        session.discard();
        throw;
    }
}

int run_extract(const Config& cfg) {
    using namespace psylex::corpus;
    ReviewFormat format;
    if (cfg.review_format == "jsonl")
        format = ReviewFormat::json_lines;
    else if (cfg.review_format == "csv")
        format = ReviewFormat::csv;
    else
        throw ValidationError("review_format must be 'jsonl' or 'csv', got '" +
                              cfg.review_format + "'");
    return with_session(cfg, "extract", [&](OutputSession& session) {
        session.input(require_path(cfg.corpus, "corpus"));
        session.input(require_path(cfg.pos_lexicon, "pos_lexicon"));
        auto reviews = load_reviews(cfg.corpus, format);
        auto pos = load_pos_lexicon(cfg.pos_lexicon);
        auto terms = extract_candidate_terms(reviews, pos);
        std::vector<std::vector<std::string>> rows;
        rows.reserve(terms.size());
        for (const auto& term : terms) {
            std::string examples;
            for (const auto& id : term.example_review_ids) {
                if (!examples.empty()) examples.push_back(';');
                examples += id;
            }
            rows.push_back({term.lemma, to_string(term.pos), std::to_string(term.corpus_count),
                            examples});
        }
        psylex::csv::write_file(session.path("candidates.csv"),
                                {"lemma", "pos", "count", "examples"}, rows);
        std::cerr << "extracted " << terms.size() << " candidate terms from " << reviews.size()
                  << " reviews\n";
        return 0;
    });
}

int run_normalize(const Config& cfg) {
    using namespace psylex::descriptors;
    auto source = source_from_string(cfg.source_tag);
    return with_session(cfg, "normalize", [&](OutputSession& session) {
        session.input(require_path(cfg.raw_descriptors, "raw_descriptors"));
        session.input(require_path(cfg.rules, "rules"));
        auto rules = NormalizationRules::load(cfg.rules);

        std::ifstream in(cfg.raw_descriptors, std::ios::binary);
        if (!in) throw ValidationError("cannot open " + cfg.raw_descriptors);
        std::set<std::string> lemmas;
        std::vector<std::vector<std::string>> review_rows;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            bool blank = line.find_first_not_of(" \t") == std::string::npos;
            if (blank) continue;
            auto result = normalize_descriptor(line, rules);
            if (result.needs_review)
                review_rows.push_back({line, result.lemma});
            else
                lemmas.insert(result.lemma);
        }

        std::vector<Descriptor> out;
        for (const auto& lemma : lemmas)
            out.push_back(Descriptor{lemma, {source}, 0.0, 0});
        write_descriptor_set(session.path("normalized.csv"), out);
        psylex::csv::write_file(session.path("needs_review.csv"), {"raw", "lemma"}, review_rows);
        std::cerr << "normalized " << out.size() << " descriptors, " << review_rows.size()
                  << " flagged for review\n";
        return 0;
    });
}

std::map<std::string, std::set<std::string>> load_named_sets(
    const Config& cfg, OutputSession& session, std::size_t minimum) {
    if (cfg.sets.size() < minimum)
        throw ValidationError("need at least " + std::to_string(minimum) +
                              " entries in 'sets' (name -> descriptor CSV path)");
    std::map<std::string, std::set<std::string>> named;
    for (const auto& [name, path] : cfg.sets) {
        session.input(require_path(path, "sets"));
        std::set<std::string> lemmas;
        for (const auto& d : psylex::descriptors::load_descriptor_set(path))
            lemmas.insert(d.lemma);
        named[name] = std::move(lemmas);
    }
    return named;
}

int run_merge(const Config& cfg) {
    using namespace psylex::descriptors;
    return with_session(cfg, "merge", [&](OutputSession& session) {
        auto named = load_named_sets(cfg, session, 1);
        std::map<Source, std::set<std::string>> by_source;
        for (auto& [name, lemmas] : named)
            by_source[source_from_string(name)] = std::move(lemmas);
        auto merged = merge_sets(by_source);
        write_descriptor_set(session.path("merged.csv"), merged);
        std::cerr << "merged " << by_source.size() << " sets into " << merged.size()
                  << " descriptors\n";
        return 0;
    });
}

int run_exclude(const Config& cfg) {
    using namespace psylex::descriptors;
    return with_session(cfg, "exclude", [&](OutputSession& session) {
        session.input(require_path(cfg.descriptors, "descriptors"));
        session.input(require_path(cfg.exclusions, "exclusions"));
        auto set = load_descriptor_set(cfg.descriptors);
        auto lexicons = ExclusionLexicons::load(cfg.exclusions);
        std::map<std::string, std::string> pairs;
        if (!cfg.opposite_pairs.empty()) {
            session.input(require_path(cfg.opposite_pairs, "opposite_pairs"));
            pairs = load_opposite_pairs(cfg.opposite_pairs);
        }
        auto outcome = apply_exclusions(set, lexicons, pairs);
        write_descriptor_set(session.path("kept.csv"), outcome.kept);
        std::vector<std::vector<std::string>> rows;
        for (const auto& [lemma, criteria] : outcome.report.excluded) {
            std::string joined;
            for (const auto& c : criteria) {
                if (!joined.empty()) joined.push_back(';');
                joined += c;
            }
            rows.push_back({lemma, joined});
        }
        psylex::csv::write_file(session.path("excluded.csv"), {"lemma", "criteria"}, rows);
        std::cerr << "kept " << outcome.kept.size() << " of " << set.size() << " descriptors\n";
        return 0;
    });
}

int run_cluster(const Config& cfg) {
    return with_session(cfg, "cluster", [&](OutputSession& session) {
        session.input(require_path(cfg.descriptors, "descriptors"));
        session.input(require_path(cfg.synonym_lexicon, "synonym_lexicon"));
        session.input(require_path(cfg.frequency, "frequency"));
        auto set = psylex::descriptors::load_descriptor_set(cfg.descriptors);
        auto lexicon = psylex::lexicon::SynonymLexicon::load(cfg.synonym_lexicon);
        auto freq = psylex::lexicon::FrequencyTable::load(cfg.frequency);

        auto annotated = psylex::lexicon::annotate(set, lexicon, freq);
        for (const auto& lemma : annotated.unknown_sense)
            std::cerr << "note: '" << lemma << "' has no senses in the synonym lexicon\n";
        auto sorted = psylex::cluster::sort_by_frequency(annotated.descriptors, freq);
        std::vector<std::string> order;
        order.reserve(sorted.size());
        for (const auto& d : sorted) order.push_back(d.lemma);
        auto greedy = psylex::cluster::greedy_cluster(order, lexicon);
        for (const auto& lemma : greedy.missing_from_lexicon)
            std::cerr << "note: '" << lemma << "' missing from the synonym lexicon, left as a "
                      << "singleton\n";

        std::map<std::string, psylex::descriptors::Descriptor> by_lemma;
        for (const auto& d : annotated.descriptors) by_lemma[d.lemma] = d;
        for (auto& cluster : greedy.clusters) {
            auto choice = psylex::cluster::select_representative(cluster, by_lemma);
            cluster.representative = choice.lemma;
            cluster.flagged = choice.flagged;
            if (choice.flagged)
                std::cerr << "note: cluster seeded by '" << cluster.seed
                          << "' has no single-sense member; review its representative\n";
        }
        psylex::cluster::write_clusters(session.path("clusters.csv"), greedy.clusters);
        std::cerr << "built " << greedy.clusters.size() << " clusters from " << order.size()
                  << " descriptors\n";
        return 0;
    });
}

int run_efa(const Config& cfg) {
    return with_session(cfg, "efa", [&](OutputSession& session) {
        session.input(require_path(cfg.ratings, "ratings"));
        auto loaded = psylex::ratings::load_ratings(cfg.ratings);
        for (const auto& note : loaded.rejected) std::cerr << "rejected: " << note << "\n";
        auto filtered = psylex::ratings::filter_participants(loaded.matrix, cfg.min_duration_s,
                                                            cfg.max_missed_fraction);
        for (const auto& note : filtered.notes) std::cerr << "note: " << note << "\n";
        psylex::ratings::write_filter_report(session.path("filter_report.csv"), filtered);
        auto correlation = psylex::ratings::correlation_matrix(filtered.kept);

        psylex::efa::FitOptions options;
        options.k = cfg.k;
        options.rotation.gamma = cfg.gamma;
        options.rotation.kaiser_normalize = cfg.kaiser_normalize;
        options.rotation.starts = cfg.rotation_starts;
        options.rotation.seed = cfg.seed.value_or(0);
        options.loading_threshold = cfg.loading_threshold;
        options.gap_threshold = cfg.gap_threshold;
        auto solution =
            psylex::efa::fit(correlation, static_cast<int>(filtered.kept.rows.size()), options);
        solution.save(session.path("solution.json"));
        std::cerr << "kept " << filtered.kept.rows.size() << " participants, extracted "
                  << solution.k << " factors, variance explained "
                  << solution.variance_explained << "\n";
        if (!solution.converged()) {
            std::cerr << "warning: iteration limits hit (factoring converged: "
                      << (solution.paf_converged ? "yes" : "no") << ", rotation converged: "
                      << (solution.rotation_converged ? "yes" : "no") << ")\n";
            return 2;
        }
        return 0;
    });
}

int run_simulate(const Config& cfg) {
    return with_session(cfg, "simulate", [&](OutputSession& session) {
        session.input(require_path(cfg.planted_model, "planted_model"));
        auto model = psylex::simulate::PlantedModel::load(cfg.planted_model);
        if (cfg.seed) model.seed = *cfg.seed;
        auto matrix = psylex::simulate::generate_ratings(model, cfg.n);
        psylex::ratings::write_ratings(session.path("ratings.csv"), matrix);
        std::cerr << "simulated " << matrix.rows.size() << " participants x "
                  << matrix.descriptor_ids.size() << " descriptors (seed " << model.seed << ")\n";
        return 0;
    });
}

int run_report(const Config& cfg) {
    return with_session(cfg, "report", [&](OutputSession& session) {
        session.input(require_path(cfg.solution, "solution"));
        auto solution = psylex::efa::FactorSolution::load(cfg.solution);
        if (cfg.top_n < 1) throw ValidationError("top_n must be at least 1");
        {
            std::ofstream out(session.path("report.md"), std::ios::binary);
            if (!out) throw ValidationError("cannot write report.md");
            out << psylex::efa::report_markdown(solution, cfg.top_n);
        }
        auto loadings = psylex::efa::report_loadings_table(solution, cfg.top_n);
        psylex::csv::write_file(session.path("report_loadings.csv"), loadings.header,
                                loadings.rows);
        auto phi = psylex::efa::report_phi_table(solution);
        psylex::csv::write_file(session.path("report_phi.csv"), phi.header, phi.rows);
        return 0;
    });
}

int run_overlap(const Config& cfg) {
    return with_session(cfg, "overlap", [&](OutputSession& session) {
        auto named = load_named_sets(cfg, session, 2);
        auto table = psylex::corpus::overlap_report(named);
        std::vector<std::vector<std::string>> rows;
        for (const auto& [names, count] : table) {
            std::string joined;
            for (const auto& name : names) {
                if (!joined.empty()) joined.push_back(';');
                joined += name;
            }
            rows.push_back({joined, std::to_string(count)});
        }
        psylex::csv::write_file(session.path("overlap.csv"), {"sets", "count"}, rows);
        return 0;
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Psycholexical pipeline: descriptor mining, clustering, and factor analysis"};
    app.require_subcommand(1);

    std::string config_path;
    Config flags;
    std::uint64_t seed_flag = 0;
    std::vector<std::string> set_flags;

    auto* o_config = app.add_option("--config", config_path, "JSON configuration file");
    auto* o_out = app.add_option("--out", flags.out_dir, "output directory");
    auto* o_corpus = app.add_option("--corpus", flags.corpus, "review corpus file");
    auto* o_format =
        app.add_option("--format", flags.review_format, "review corpus format: jsonl or csv");
    auto* o_pos = app.add_option("--pos-lexicon", flags.pos_lexicon, "part-of-speech CSV");
    auto* o_raw =
        app.add_option("--raw", flags.raw_descriptors, "raw descriptor list, one per line");
    auto* o_rules = app.add_option("--rules", flags.rules, "normalization rules JSON");
    auto* o_descriptors =
        app.add_option("--descriptors", flags.descriptors, "descriptor set CSV");
    auto* o_exclusions =
        app.add_option("--exclusions", flags.exclusions, "exclusion lexicons JSON");
    auto* o_pairs =
        app.add_option("--opposite-pairs", flags.opposite_pairs, "negative -> positive JSON map");
    auto* o_synonyms =
        app.add_option("--synonyms", flags.synonym_lexicon, "synonym lexicon JSON");
    auto* o_freq = app.add_option("--freq", flags.frequency, "word frequency CSV");
    auto* o_ratings = app.add_option("--ratings", flags.ratings, "rating matrix CSV");
    auto* o_model = app.add_option("--model", flags.planted_model, "planted factor model JSON");
    auto* o_solution = app.add_option("--solution", flags.solution, "factor solution JSON");
    app.add_option("--set", set_flags, "named descriptor set as name=path (repeatable)");
    auto* o_tag = app.add_option("--source-tag", flags.source_tag,
                                 "provenance tag for normalized output");
    auto* o_min_duration =
        app.add_option("--min-duration", flags.min_duration_s, "minimum survey seconds");
    auto* o_max_missed = app.add_option("--max-missed", flags.max_missed_fraction,
                                        "maximum missed attention-check fraction");
    auto* o_loading =
        app.add_option("--loading-threshold", flags.loading_threshold, "assignment threshold");
    auto* o_gap = app.add_option("--gap-threshold", flags.gap_threshold,
                                 "primary-secondary loading gap");
    auto* o_gamma = app.add_option("--gamma", flags.gamma, "oblimin gamma");
    auto* o_top = app.add_option("--top", flags.top_n, "descriptors listed per factor");
    auto* o_k = app.add_option("--k", flags.k, "factor count (0 = automatic)");
    auto* o_n = app.add_option("--n", flags.n, "simulated sample size");
    auto* o_seed = app.add_option("--seed", seed_flag, "random seed");
    auto* o_kaiser = app.add_flag("--kaiser-normalize", flags.kaiser_normalize,
                                  "row-normalize loadings before rotation");
    auto* o_starts =
        app.add_option("--starts", flags.rotation_starts, "rotation starts (first is identity)");

    const std::vector<std::string> names = {"extract", "normalize", "merge",  "exclude", "cluster",
                                            "efa",     "simulate",  "report", "overlap"};
    const std::map<std::string, std::string> blurbs = {
        {"extract", "mine candidate descriptors from a review corpus"},
        {"normalize", "normalize raw descriptor strings"},
        {"merge", "merge named descriptor sets with provenance"},
        {"exclude", "apply exclusion lexicons and opposite pairs"},
        {"cluster", "frequency-sort, cluster by mutual synonymy, elect representatives"},
        {"efa", "filter participants, correlate, extract and rotate factors"},
        {"simulate", "generate ratings from a planted factor model"},
        {"report", "render a factor solution as Markdown and CSV"},
        {"overlap", "tabulate membership overlap of descriptor sets"},
    };
    for (const auto& name : names) {
        auto* sub = app.add_subcommand(name, blurbs.at(name));
        sub->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        Config cfg;
        if (o_config->count()) cfg = load_config_file(config_path);
        if (o_out->count()) cfg.out_dir = flags.out_dir;
        if (o_corpus->count()) cfg.corpus = flags.corpus;
        if (o_format->count()) cfg.review_format = flags.review_format;
        if (o_pos->count()) cfg.pos_lexicon = flags.pos_lexicon;
        if (o_raw->count()) cfg.raw_descriptors = flags.raw_descriptors;
        if (o_rules->count()) cfg.rules = flags.rules;
        if (o_descriptors->count()) cfg.descriptors = flags.descriptors;
        if (o_exclusions->count()) cfg.exclusions = flags.exclusions;
        if (o_pairs->count()) cfg.opposite_pairs = flags.opposite_pairs;
        if (o_synonyms->count()) cfg.synonym_lexicon = flags.synonym_lexicon;
        if (o_freq->count()) cfg.frequency = flags.frequency;
        if (o_ratings->count()) cfg.ratings = flags.ratings;
        if (o_model->count()) cfg.planted_model = flags.planted_model;
        if (o_solution->count()) cfg.solution = flags.solution;
        if (o_tag->count()) cfg.source_tag = flags.source_tag;
        if (o_min_duration->count()) cfg.min_duration_s = flags.min_duration_s;
        if (o_max_missed->count()) cfg.max_missed_fraction = flags.max_missed_fraction;
        if (o_loading->count()) cfg.loading_threshold = flags.loading_threshold;
        if (o_gap->count()) cfg.gap_threshold = flags.gap_threshold;
        if (o_gamma->count()) cfg.gamma = flags.gamma;
        if (o_top->count()) cfg.top_n = flags.top_n;
        if (o_k->count()) cfg.k = flags.k;
        if (o_n->count()) cfg.n = flags.n;
        if (o_seed->count()) cfg.seed = seed_flag;
        if (o_kaiser->count()) cfg.kaiser_normalize = flags.kaiser_normalize;
        if (o_starts->count()) cfg.rotation_starts = flags.rotation_starts;
        for (const auto& entry : set_flags) {
            auto eq = entry.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size())
                throw ValidationError("--set expects name=path, got '" + entry + "'");
            cfg.sets[entry.substr(0, eq)] = entry.substr(eq + 1);
        }

        if (app.got_subcommand("extract")) return run_extract(cfg);
        if (app.got_subcommand("normalize")) return run_normalize(cfg);
        if (app.got_subcommand("merge")) return run_merge(cfg);
        if (app.got_subcommand("exclude")) return run_exclude(cfg);
        if (app.got_subcommand("cluster")) return run_cluster(cfg);
        if (app.got_subcommand("efa")) return run_efa(cfg);
        if (app.got_subcommand("simulate")) return run_simulate(cfg);
        if (app.got_subcommand("report")) return run_report(cfg);
        if (app.got_subcommand("overlap")) return run_overlap(cfg);
        throw ValidationError("no subcommand selected");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
