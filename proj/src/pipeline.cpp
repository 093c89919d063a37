#include "radiation/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "radiation/corpus.hpp"
#include "radiation/error.hpp"
#include "radiation/evalmetrics.hpp"
#include "radiation/forest.hpp"
#include "radiation/hdp.hpp"
#include "radiation/jsonl.hpp"
#include "radiation/linker.hpp"
#include "radiation/nbayes.hpp"
#include "radiation/releasediff.hpp"
#include "radiation/rng.hpp"
#include "radiation/sentiment.hpp"
#include "radiation/textprep.hpp"
#include "radiation/uiminer.hpp"

#ifndef RADIATION_DATA_DIR
#define RADIATION_DATA_DIR ""
#endif

namespace radiation {

namespace {

const char* kToolVersion = "0.1.0";

const std::map<std::string, std::string>& default_values() {
    static const std::map<std::string, std::string> defaults = {
        {"reviews", ""},
        {"releases", ""},
        {"labels", ""},            // nb training labels: {"id","label"}
        {"label_reviews", ""},     // reviews the labels refer to; empty = main corpus
        {"train_features", ""},    // pre-labeled feature rows for the recommender
        {"judgments", ""},         // intrusion judgments for tlo
        {"confusion", ""},         // pre-tallied confusion quadruples for evaluate
        {"out", "out"},
        {"data_dir", RADIATION_DATA_DIR},
        {"lemmas", ""},            // default: <data_dir>/lemmas.tsv
        {"stopwords", ""},         // default: <data_dir>/stopwords.txt
        {"lexicon", ""},           // default: <data_dir>/lexicon.tsv
        {"apps", ""},              // comma-separated app ids; empty = all
        {"seed", "42"},
        {"threshold", "0.65"},
        {"trees", "100"},
        {"rf_max_depth", "0"},
        {"rf_min_samples_leaf", "1"},
        {"rf_features_per_split", "3"},
        {"rf_bootstrap", "true"},
        {"rf_decision_threshold", "0.5"},
        {"nb_alpha", "1.0"},
        {"nb_balance", "true"},
        {"hdp_gamma", "1.0"},
        {"hdp_alpha", "1.0"},
        {"hdp_eta", "0.5"},
        {"hdp_iterations", "500"},
        {"hdp_burn_in", "300"},
        {"min_reviews_for_hdp", "3"},
        {"cv_folds", "10"},
        {"extra_widget_tags", ""},
        {"no_header_timestamp", "false"},
    };
    return defaults;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

void warn(std::vector<std::string>* warnings, const std::string& msg) {
    if (warnings) warnings->push_back(msg);
}

} // namespace

PipelineConfig::PipelineConfig() : values_(default_values()) {}

PipelineConfig PipelineConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    PipelineConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": expected key=value");
        config.set(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
    }
    return config;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ValidationError("unknown config key '" + key + "'");
    it->second = value;
}

const std::string& PipelineConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ValidationError("unknown config key '" + key + "'");
    return it->second;
}

bool PipelineConfig::has(const std::string& key) const { return !get(key).empty(); }

double PipelineConfig::get_double(const std::string& key) const {
    try {
        return std::stod(get(key));
    } catch (...) {
        throw ValidationError("config key '" + key + "' is not a number: '" + get(key) + "'");
    }
}

int PipelineConfig::get_int(const std::string& key) const {
    try {
        return std::stoi(get(key));
    } catch (...) {
        throw ValidationError("config key '" + key + "' is not an integer: '" + get(key) + "'");
    }
}

bool PipelineConfig::get_bool(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError("config key '" + key + "' is not a boolean: '" + v + "'");
}

std::uint64_t PipelineConfig::get_u64(const std::string& key) const {
    try {
        return std::stoull(get(key));
    } catch (...) {
        throw ValidationError("config key '" + key + "' is not an unsigned integer: '" +
                              get(key) + "'");
    }
}

std::string PipelineConfig::config_hash() const {
    // The hash identifies the run configuration; the output location does
    // not change artifact content, so reruns into different directories
    // stay byte-identical.
    std::string canon;
    for (const auto& [k, v] : values_) {
        if (k == "out") continue;
        canon += k;
        canon += '=';
        canon += v;
        canon += '\n';
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canon)));
    return buf;
}

// ---------------------------------------------------------------------------
// Pipeline steps
// ---------------------------------------------------------------------------

namespace {

struct Ctx {
    const PipelineConfig& config;
    std::filesystem::path out;
    std::vector<std::string>* warnings;

    std::filesystem::path artifact(const char* name) const { return out / name; }

    ArtifactHeader header() const {
        ArtifactHeader h;
        h.tool_version = kToolVersion;
        h.seed = config.get_u64("seed");
        h.config_hash = config.config_hash();
        if (!config.get_bool("no_header_timestamp")) {
            const auto now = std::chrono::system_clock::now();
            h.timestamp = format_instant(std::chrono::duration_cast<std::chrono::seconds>(
                                             now.time_since_epoch())
                                             .count());
        }
        return h;
    }

    std::filesystem::path data_file(const char* key, const char* filename) const {
        if (config.has(key)) return config.get(key);
        if (!config.has("data_dir"))
            throw ValidationError(std::string("config key '") + key +
                                  "' is empty and no data_dir is set");
        return std::filesystem::path(config.get("data_dir")) / filename;
    }

    void require_artifact(const char* name, const char* producing_step) const {
        if (!std::filesystem::exists(artifact(name)))
            throw ValidationError("missing artifact '" + std::string(name) + "' — run '" +
                                  producing_step + "' first");
    }

    bool app_selected(const std::string& app) const {
        if (!config.has("apps")) return true;
        for (const auto& id : split_csv(config.get("apps")))
            if (id == app) return true;
        return false;
    }

    LemmaTable load_lemmas() const { return LemmaTable::load(data_file("lemmas", "lemmas.tsv")); }
    StopList load_stops() const {
        return StopList::load(data_file("stopwords", "stopwords.txt"));
    }
    SentimentLexicon load_lexicon() const {
        return SentimentLexicon::load(data_file("lexicon", "lexicon.tsv"));
    }
};

struct TokenRecord {
    std::string app;
    std::string id;
    bool assigned = false;
    int release_ordinal = -1;
    int rating = 0;
    Instant ts = 0;
    std::vector<std::string> tokens;
};

std::vector<TokenRecord> read_token_records(const std::filesystem::path& path) {
    std::vector<TokenRecord> records;
    read_jsonl(path, [&](const Json& j) {
        TokenRecord r;
        r.app = j.at("app").get<std::string>();
        r.id = j.at("id").get<std::string>();
        if (j.contains("release_ordinal") && !j.at("release_ordinal").is_null()) {
            r.assigned = true;
            r.release_ordinal = j.at("release_ordinal").get<int>();
        }
        r.rating = j.at("rating").get<int>();
        auto ts = parse_instant(j.at("ts").get<std::string>());
        r.ts = ts ? *ts : 0;
        r.tokens = j.at("tokens").get<std::vector<std::string>>();
        records.push_back(std::move(r));
    });
    return records;
}

Json token_record_json(const TokenRecord& r) {
    Json j;
    j["app"] = r.app;
    j["id"] = r.id;
    if (r.assigned) j["release_ordinal"] = r.release_ordinal;
    else j["release_ordinal"] = nullptr;
    j["rating"] = r.rating;
    j["ts"] = format_instant(r.ts);
    j["tokens"] = r.tokens;
    return j;
}

struct ElementRecord {
    std::string app;
    int release_ordinal = 0;
    std::string key;
    UIElement element;
};

std::vector<ElementRecord> read_element_records(const std::filesystem::path& path) {
    std::vector<ElementRecord> records;
    read_jsonl(path, [&](const Json& j) {
        ElementRecord r;
        r.app = j.at("app").get<std::string>();
        r.release_ordinal = j.at("release_ordinal").get<int>();
        r.key = j.at("element_key").get<std::string>();
        r.element.release_ordinal = r.release_ordinal;
        r.element.element_type = j.at("element_type").get<std::string>();
        r.element.resource_id = j.value("resource_id", "");
        r.element.label = j.value("label", "");
        r.element.icon = j.value("icon", "");
        r.element.source_file = j.value("source_file", "");
        records.push_back(std::move(r));
    });
    return records;
}

// ---- prep -----------------------------------------------------------------

void step_prep(const Ctx& ctx) {
    if (!ctx.config.has("reviews")) throw ValidationError("config key 'reviews' is required");
    const LemmaTable lemmas = ctx.load_lemmas();
    const StopList stops = ctx.load_stops();

    LoadStats stats;
    std::vector<Review> reviews = load_reviews(ctx.config.get("reviews"), &stats, ctx.warnings);
    std::vector<Release> releases;
    if (ctx.config.has("releases"))
        releases = load_releases(ctx.config.get("releases"), ctx.warnings);

    std::vector<AppDataset> datasets = group_by_app(std::move(reviews), std::move(releases));
    JsonlWriter writer(ctx.artifact("tokens.jsonl"), ctx.header());
    for (auto& ds : datasets) {
        if (!ctx.app_selected(ds.app_id)) continue;
        assign_windows(ds);
        for (const auto& review : ds.reviews) {
            TokenRecord r;
            r.app = ds.app_id;
            r.id = review.id;
            auto win = ds.window_of.find(review.id);
            if (win != ds.window_of.end()) {
                r.assigned = true;
                r.release_ordinal = win->second;
            }
            r.rating = review.rating;
            r.ts = review.timestamp;
            r.tokens = preprocess(review.text, lemmas, stops);
            writer.write(token_record_json(r));
        }
    }
    if (stats.skipped > 0)
        warn(ctx.warnings, "prep: skipped " + std::to_string(stats.skipped) + " review line(s)");
}

// ---- filter ---------------------------------------------------------------

std::vector<LabeledReview> load_training_set(const Ctx& ctx, const LemmaTable& lemmas,
                                             const StopList& stops,
                                             const std::vector<TokenRecord>& corpus_tokens) {
    if (!ctx.config.has("labels"))
        throw ValidationError("config key 'labels' is required for 'filter'");
    std::map<std::string, std::string> labels;
    read_jsonl(ctx.config.get("labels"), [&](const Json& j) {
        labels[j.at("id").get<std::string>()] = j.at("label").get<std::string>();
    });
    if (labels.empty()) throw ValidationError("labels file has no records");

    std::map<std::string, std::vector<std::string>> tokens_by_id;
    if (ctx.config.has("label_reviews")) {
        for (const auto& review : load_reviews(ctx.config.get("label_reviews"), nullptr,
                                               ctx.warnings))
            tokens_by_id[review.id] = preprocess(review.text, lemmas, stops);
    } else {
        for (const auto& r : corpus_tokens) tokens_by_id[r.id] = r.tokens;
    }

    if (ctx.config.get_bool("nb_balance")) {
        std::map<std::string, std::string> usable;
        for (const auto& [id, label] : labels)
            if (tokens_by_id.count(id)) usable[id] = label;
        const auto kept = downsample_balanced(usable, derive_seed(ctx.config.get_u64("seed"),
                                                                  std::string("nb_balance")));
        std::map<std::string, std::string> balanced;
        for (const auto& id : kept) balanced[id] = usable.at(id);
        labels = std::move(balanced);
    }

    std::vector<LabeledReview> training;
    for (const auto& [id, label] : labels) {
        auto it = tokens_by_id.find(id);
        if (it == tokens_by_id.end()) {
            warn(ctx.warnings, "filter: labeled id '" + id + "' not found in review corpus");
            continue;
        }
        training.push_back({id, it->second, review_label_from_string(label)});
    }
    if (training.empty()) throw ValidationError("no labeled reviews matched the corpus");
    return training;
}

void step_filter(const Ctx& ctx) {
    ctx.require_artifact("tokens.jsonl", "prep");
    const LemmaTable lemmas = ctx.load_lemmas();
    const StopList stops = ctx.load_stops();
    const std::vector<TokenRecord> corpus = read_token_records(ctx.artifact("tokens.jsonl"));

    const std::vector<LabeledReview> training = load_training_set(ctx, lemmas, stops, corpus);
    const NbModel model = NbModel::train(training, ctx.config.get_double("nb_alpha"));

    {
        std::ofstream out(ctx.artifact("nb_model.json"), std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write nb_model.json");
        Json doc;
        doc["meta"] = ctx.header().to_json();
        Json model_json = Json::parse(model.to_json_string());
        for (auto& [k, v] : model_json.items()) doc[k] = v;
        out << doc.dump(2) << '\n';
    }

    JsonlWriter writer(ctx.artifact("informative.jsonl"), ctx.header());
    std::size_t kept = 0, dropped = 0;
    for (const auto& r : corpus) {
        const auto result = model.classify(r.tokens);
        if (result.label != ReviewLabel::informative) {
            ++dropped;
            continue;
        }
        Json j = token_record_json(r);
        j["posterior"] = round_digits(result.posterior, 6);
        writer.write(j);
        ++kept;
    }
    warn(ctx.warnings, "filter: kept " + std::to_string(kept) + " informative, dropped " +
                           std::to_string(dropped) + " non-informative");
}

// ---- mine-ui ---------------------------------------------------------------

void step_mine_ui(const Ctx& ctx) {
    if (!ctx.config.has("releases"))
        throw ValidationError("config key 'releases' is required for 'mine-ui'");
    const std::vector<Release> releases = load_releases(ctx.config.get("releases"), ctx.warnings);
    const std::vector<std::string> extra_tags = split_csv(ctx.config.get("extra_widget_tags"));

    JsonlWriter writer(ctx.artifact("elements.jsonl"), ctx.header());
    for (const auto& release : releases) {
        if (!ctx.app_selected(release.app_id)) continue;
        if (release.resource_root.empty()) {
            warn(ctx.warnings, "mine-ui: release " + release.app_id + "@" + release.version +
                                   " has no resource root");
            continue;
        }
        StringTable strings;
        const auto strings_path = release.resource_root / "res" / "values" / "strings.xml";
        if (std::filesystem::exists(strings_path)) {
            try {
                strings = parse_strings(strings_path, ctx.warnings);
            } catch (const ValidationError& e) {
                warn(ctx.warnings, std::string("mine-ui: ") + e.what() +
                                       "; continuing with an empty string table");
            }
        }
        const auto elements = parse_layouts(release.resource_root, strings, release.ordinal,
                                            extra_tags, ctx.warnings);
        for (const auto& e : elements) {
            Json j;
            j["app"] = release.app_id;
            j["release_ordinal"] = release.ordinal;
            j["element_key"] = element_key(e);
            j["element_type"] = e.element_type;
            j["resource_id"] = e.resource_id;
            j["label"] = e.label;
            j["icon"] = e.icon;
            j["source_file"] = e.source_file;
            writer.write(j);
        }
    }
}

// ---- link -------------------------------------------------------------------

void step_link(const Ctx& ctx) {
    ctx.require_artifact("informative.jsonl", "filter");
    ctx.require_artifact("elements.jsonl", "mine-ui");
    const LemmaTable lemmas = ctx.load_lemmas();
    const StopList stops = ctx.load_stops();
    const double threshold = ctx.config.get_double("threshold");

    const auto reviews = read_token_records(ctx.artifact("informative.jsonl"));
    const auto elements = read_element_records(ctx.artifact("elements.jsonl"));

    // (app, window ordinal) -> review docs, in corpus order.
    std::map<std::pair<std::string, int>, std::vector<std::pair<std::string, std::vector<std::string>>>>
        review_groups;
    for (const auto& r : reviews) {
        if (!r.assigned) continue;
        review_groups[{r.app, r.release_ordinal}].push_back({r.id, r.tokens});
    }
    // (app, release ordinal) -> element description docs, in mined order.
    std::map<std::pair<std::string, int>, std::vector<std::pair<std::string, std::vector<std::string>>>>
        element_groups;
    for (const auto& e : elements) {
        element_groups[{e.app, e.release_ordinal}].push_back(
            {e.key, describe_element(e.element, lemmas, stops)});
    }

    JsonlWriter writer(ctx.artifact("links.jsonl"), ctx.header());
    for (const auto& [group, docs] : review_groups) {
        auto eit = element_groups.find(group);
        if (eit == element_groups.end()) continue;
        const auto links = link_reviews(docs, eit->second, group.second, threshold);
        // Elements sharing a key yield one link per (review, key): keep the
        // strongest.
        std::map<std::pair<std::string, std::string>, double> best;
        std::vector<std::pair<std::string, std::string>> order;
        for (const auto& link : links) {
            const auto pair_key = std::make_pair(link.review_id, link.element_key);
            auto it = best.find(pair_key);
            if (it == best.end()) {
                best[pair_key] = link.similarity;
                order.push_back(pair_key);
            } else if (link.similarity > it->second) {
                it->second = link.similarity;
            }
        }
        for (const auto& pair_key : order) {
            Json j;
            j["app"] = group.first;
            j["review"] = pair_key.first;
            j["element_key"] = pair_key.second;
            j["release_ordinal"] = group.second;
            j["sim"] = round_digits(best.at(pair_key), 4);
            writer.write(j);
        }
    }
}

// ---- cluster ----------------------------------------------------------------

void step_cluster(const Ctx& ctx) {
    ctx.require_artifact("informative.jsonl", "filter");
    ctx.require_artifact("links.jsonl", "link");

    const auto reviews = read_token_records(ctx.artifact("informative.jsonl"));
    std::map<std::string, std::map<std::string, std::vector<std::string>>> tokens_by_app;
    for (const auto& r : reviews) tokens_by_app[r.app][r.id] = r.tokens;

    std::map<std::string, std::vector<Link>> links_by_app;
    read_jsonl(ctx.artifact("links.jsonl"), [&](const Json& j) {
        Link link;
        link.review_id = j.at("review").get<std::string>();
        link.element_key = j.at("element_key").get<std::string>();
        link.release_ordinal = j.at("release_ordinal").get<int>();
        link.similarity = j.at("sim").get<double>();
        links_by_app[j.at("app").get<std::string>()].push_back(std::move(link));
    });

    HdpConfig hdp;
    hdp.gamma = ctx.config.get_double("hdp_gamma");
    hdp.alpha = ctx.config.get_double("hdp_alpha");
    hdp.eta = ctx.config.get_double("hdp_eta");
    hdp.iterations = ctx.config.get_int("hdp_iterations");
    hdp.burn_in = ctx.config.get_int("hdp_burn_in");
    hdp.validate();
    const int min_group = ctx.config.get_int("min_reviews_for_hdp");

    JsonlWriter writer(ctx.artifact("clusters.jsonl"), ctx.header());
    for (const auto& [app, links] : links_by_app) {
        HdpConfig app_config = hdp;
        app_config.seed = derive_seed(ctx.config.get_u64("seed"), "hdp:" + app);
        const auto clusters =
            cluster_element_reviews(links, tokens_by_app[app], app, app_config, min_group);
        for (const auto& c : clusters) {
            Json theta = Json::object();
            for (const auto& [topic, p] : c.mean_theta)
                theta[std::to_string(topic)] = round_digits(p, 6);
            Json j;
            j["app"] = c.app_id;
            j["element_key"] = c.element_key;
            j["release_ordinal"] = c.release_ordinal;
            j["topic"] = c.topic;
            j["members"] = c.members;
            j["top_words"] = c.top_words;
            j["theta"] = std::move(theta);
            writer.write(j);
        }
    }
}

// ---- features ----------------------------------------------------------------

std::vector<Cluster> read_cluster_records(const std::filesystem::path& path) {
    std::vector<Cluster> clusters;
    read_jsonl(path, [&](const Json& j) {
        Cluster c;
        c.app_id = j.at("app").get<std::string>();
        c.element_key = j.at("element_key").get<std::string>();
        c.release_ordinal = j.at("release_ordinal").get<int>();
        c.topic = j.at("topic").get<int>();
        c.members = j.at("members").get<std::vector<std::string>>();
        c.top_words = j.at("top_words").get<std::vector<std::string>>();
        for (const auto& [k, v] : j.at("theta").items())
            c.mean_theta[std::stoi(k)] = v.get<double>();
        clusters.push_back(std::move(c));
    });
    return clusters;
}

void step_features(const Ctx& ctx) {
    ctx.require_artifact("informative.jsonl", "filter");
    ctx.require_artifact("clusters.jsonl", "cluster");
    const SentimentLexicon lexicon = ctx.load_lexicon();

    const auto records = read_token_records(ctx.artifact("informative.jsonl"));
    std::map<std::string, Review> review_store;
    std::map<std::string, std::map<std::string, const Review*>> reviews_by_app;
    std::map<std::string, std::map<std::string, std::vector<std::string>>> tokens_by_app;
    std::map<std::pair<std::string, int>, std::pair<double, int>> window_rating;
    for (const auto& r : records) {
        Review& review = review_store[r.app + "\x1f" + r.id];
        review.id = r.id;
        review.app_id = r.app;
        review.rating = r.rating;
        review.timestamp = r.ts;
        reviews_by_app[r.app][r.id] = &review;
        tokens_by_app[r.app][r.id] = r.tokens;
        if (r.assigned) {
            auto& [sum, count] = window_rating[{r.app, r.release_ordinal}];
            sum += r.rating;
            ++count;
        }
    }

    const auto clusters = read_cluster_records(ctx.artifact("clusters.jsonl"));
    JsonlWriter writer(ctx.artifact("features.jsonl"), ctx.header());
    for (const auto& c : clusters) {
        auto wit = window_rating.find({c.app_id, c.release_ordinal});
        const double release_mean =
            wit != window_rating.end() && wit->second.second > 0
                ? wit->second.first / static_cast<double>(wit->second.second)
                : 0.0;
        const ClusterFeatures f = extract_features(c, reviews_by_app[c.app_id],
                                                   tokens_by_app[c.app_id], release_mean,
                                                   lexicon);
        Json j;
        j["app"] = f.app_id;
        j["element_key"] = f.element_key;
        j["release_ordinal"] = f.release_ordinal;
        j["topic"] = f.topic;
        j["n_reviews"] = static_cast<int>(f.n_reviews);
        j["rating"] = round_digits(f.rating, 6);
        j["delta_rating"] = round_digits(f.delta_rating, 6);
        j["polarity"] = round_digits(f.polarity, 6);
        j["objectivity"] = round_digits(f.objectivity, 6);
        j["uninstall"] = static_cast<int>(f.uninstall);
        writer.write(j);
    }
}

// ---- diff ----------------------------------------------------------------------

void step_diff(const Ctx& ctx) {
    ctx.require_artifact("elements.jsonl", "mine-ui");
    const auto elements = read_element_records(ctx.artifact("elements.jsonl"));

    std::map<std::string, std::map<int, std::set<std::string>>> keys_by_app;
    for (const auto& e : elements) keys_by_app[e.app][e.release_ordinal].insert(e.key);

    JsonlWriter writer(ctx.artifact("truthset.jsonl"), ctx.header());
    for (const auto& [app, by_ordinal] : keys_by_app) {
        if (by_ordinal.size() < 3) {
            warn(ctx.warnings, "diff: app '" + app + "' has fewer than 3 releases; excluded");
            continue;
        }
        const int max_ordinal = by_ordinal.rbegin()->first;
        std::vector<std::set<std::string>> ordered(max_ordinal + 1);
        for (const auto& [ordinal, keys] : by_ordinal) ordered[ordinal] = keys;
        for (const auto& rec : find_deletions(app, ordered)) {
            Json j;
            j["app"] = rec.app_id;
            j["element_key"] = rec.element_key;
            j["deleted_in"] = rec.deleted_in_ordinal;
            writer.write(j);
        }
    }
}

// ---- recommend -------------------------------------------------------------------

std::vector<ClusterFeatures> read_feature_records(const std::filesystem::path& path,
                                                  std::vector<DeletionTruth>* labels) {
    std::vector<ClusterFeatures> rows;
    read_jsonl(path, [&](const Json& j) {
        ClusterFeatures f;
        f.app_id = j.at("app").get<std::string>();
        f.element_key = j.at("element_key").get<std::string>();
        f.release_ordinal = j.at("release_ordinal").get<int>();
        f.topic = j.value("topic", 0);
        f.n_reviews = j.at("n_reviews").get<double>();
        f.rating = j.at("rating").get<double>();
        f.delta_rating = j.at("delta_rating").get<double>();
        f.polarity = j.at("polarity").get<double>();
        f.objectivity = j.at("objectivity").get<double>();
        f.uninstall = j.at("uninstall").get<double>();
        rows.push_back(std::move(f));
        if (labels) {
            if (!j.contains("label"))
                throw ValidationError(path.string() + ": training row missing 'label'");
            labels->push_back(deletion_truth_from_string(j.at("label").get<std::string>()));
        }
    });
    return rows;
}

std::vector<DeletionRecord> read_truthset(const std::filesystem::path& path) {
    std::vector<DeletionRecord> records;
    read_jsonl(path, [&](const Json& j) {
        DeletionRecord rec;
        rec.app_id = j.at("app").get<std::string>();
        rec.element_key = j.at("element_key").get<std::string>();
        rec.deleted_in_ordinal = j.at("deleted_in").get<int>();
        rec.last_present_ordinal = rec.deleted_in_ordinal - 1;
        records.push_back(std::move(rec));
    });
    return records;
}

RfConfig rf_config_from(const Ctx& ctx) {
    RfConfig config;
    config.n_trees = ctx.config.get_int("trees");
    config.max_depth = ctx.config.get_int("rf_max_depth");
    config.min_samples_leaf = ctx.config.get_int("rf_min_samples_leaf");
    config.features_per_split = ctx.config.get_int("rf_features_per_split");
    config.bootstrap = ctx.config.get_bool("rf_bootstrap");
    config.decision_threshold = ctx.config.get_double("rf_decision_threshold");
    config.seed = derive_seed(ctx.config.get_u64("seed"), std::string("rf"));
    return config;
}

std::vector<TrainingRow> recommender_training_rows(const Ctx& ctx) {
    std::vector<TrainingRow> rows;
    if (ctx.config.has("train_features")) {
        std::vector<DeletionTruth> labels;
        const auto features = read_feature_records(ctx.config.get("train_features"), &labels);
        for (std::size_t i = 0; i < features.size(); ++i)
            rows.push_back({features[i].row(), labels[i],
                            features[i].app_id + "/" + features[i].element_key});
        return rows;
    }
    if (!std::filesystem::exists(ctx.artifact("truthset.jsonl")))
        throw ValidationError(
            "missing artifact 'truthset.jsonl' — run 'diff' first or set train_features");
    const auto truth = read_truthset(ctx.artifact("truthset.jsonl"));
    const auto features = read_feature_records(ctx.artifact("features.jsonl"), nullptr);
    for (const auto& f : features) {
        const ClusterTruth label =
            label_cluster(truth, f.app_id, f.element_key, f.release_ordinal);
        rows.push_back({f.row(),
                        label == ClusterTruth::deleted ? DeletionTruth::deleted
                                                       : DeletionTruth::not_deleted,
                        f.app_id + "/" + f.element_key});
    }
    return rows;
}

void step_recommend(const Ctx& ctx) {
    ctx.require_artifact("features.jsonl", "features");
    const RfConfig rf = rf_config_from(ctx);
    const std::vector<TrainingRow> training = recommender_training_rows(ctx);
    const Forest forest = Forest::train(training, rf);

    {
        std::ofstream out(ctx.artifact("rf_model.json"), std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write rf_model.json");
        Json doc;
        doc["meta"] = ctx.header().to_json();
        Json model = Json::parse(forest.to_json_string());
        for (auto& [k, v] : model.items()) doc[k] = v;
        out << doc.dump(2) << '\n';
    }

    const auto features = read_feature_records(ctx.artifact("features.jsonl"), nullptr);
    const auto recommendations = recommend(forest, features, rf.decision_threshold);
    JsonlWriter writer(ctx.artifact("recommendations.jsonl"), ctx.header());
    for (const auto& rec : recommendations) {
        Json j;
        j["app"] = rec.app_id;
        j["element_key"] = rec.element_key;
        j["release_ordinal"] = rec.release_ordinal;
        j["topic"] = rec.topic;
        j["prob"] = round_digits(rec.probability, 4);
        j["decision"] = rec.delete_candidate ? "delete_candidate" : "keep";
        writer.write(j);
    }
}

// ---- evaluate ----------------------------------------------------------------------

void step_evaluate(const Ctx& ctx) {
    Json body;

    if (ctx.config.has("confusion")) {
        // Fixture mode: pre-tallied per-app quadruples.
        Json per_app = Json::object();
        ConfusionMatrix overall;
        double f1_sum = 0.0;
        std::size_t apps = 0;
        read_jsonl(ctx.config.get("confusion"), [&](const Json& j) {
            ConfusionMatrix m;
            m.fp = j.at("fp").get<std::int64_t>();
            m.fn = j.at("fn").get<std::int64_t>();
            m.tp = j.at("tp").get<std::int64_t>();
            m.tn = j.at("tn").get<std::int64_t>();
            const Prf1 metrics = prf1(m);
            Json entry;
            entry["tp"] = m.tp;
            entry["fp"] = m.fp;
            entry["fn"] = m.fn;
            entry["tn"] = m.tn;
            entry["precision"] = metrics.precision;
            entry["recall"] = metrics.recall;
            entry["f1"] = metrics.f1;
            per_app[j.at("app").get<std::string>()] = std::move(entry);
            overall += m;
            f1_sum += metrics.f1;
            ++apps;
        });
        if (apps == 0) throw ValidationError("confusion fixture has no rows");
        const Prf1 pooled = prf1(overall);
        body["per_app"] = std::move(per_app);
        body["macro_f1"] = f1_sum / static_cast<double>(apps);
        body["pooled_f1"] = pooled.f1;
        body["precision"] = pooled.precision;
        body["recall"] = pooled.recall;
        write_json_doc(ctx.artifact("metrics.json"), ctx.header(), std::move(body));
        return;
    }

    ctx.require_artifact("features.jsonl", "features");
    ctx.require_artifact("truthset.jsonl", "diff");
    const auto truth = read_truthset(ctx.artifact("truthset.jsonl"));
    const auto features = read_feature_records(ctx.artifact("features.jsonl"), nullptr);

    auto truth_of = [&](const ClusterFeatures& f) {
        return label_cluster(truth, f.app_id, f.element_key, f.release_ordinal) ==
               ClusterTruth::deleted;
    };

    // Retrospective comparison of emitted recommendations with the truth set.
    if (std::filesystem::exists(ctx.artifact("recommendations.jsonl"))) {
        std::map<std::string, const ClusterFeatures*> by_identity;
        for (const auto& f : features)
            by_identity[f.app_id + "\x1f" + f.element_key + "\x1f" +
                        std::to_string(f.release_ordinal) + "\x1f" + std::to_string(f.topic)] =
                &f;
        std::vector<EvalRow> rows;
        read_jsonl(ctx.artifact("recommendations.jsonl"), [&](const Json& j) {
            const std::string identity = j.at("app").get<std::string>() + "\x1f" +
                                         j.at("element_key").get<std::string>() + "\x1f" +
                                         std::to_string(j.at("release_ordinal").get<int>()) +
                                         "\x1f" + std::to_string(j.at("topic").get<int>());
            auto it = by_identity.find(identity);
            if (it == by_identity.end())
                throw ValidationError("evaluate: prediction without a truth label: " +
                                      j.at("element_key").get<std::string>() + "@" +
                                      std::to_string(j.at("release_ordinal").get<int>()));
            EvalRow row;
            row.app_id = it->second->app_id;
            row.key = identity;
            row.recommended = j.at("decision").get<std::string>() == "delete_candidate";
            row.deleted = truth_of(*it->second);
            rows.push_back(std::move(row));
        });
        if (!rows.empty()) {
            const EvalReport report = evaluate_predictions(rows);
            Json per_app = Json::object();
            for (const auto& [app, m] : report.per_app) {
                const Prf1& metrics = report.per_app_metrics.at(app);
                Json entry;
                entry["tp"] = m.tp;
                entry["fp"] = m.fp;
                entry["fn"] = m.fn;
                entry["tn"] = m.tn;
                entry["precision"] = metrics.precision;
                entry["recall"] = metrics.recall;
                entry["f1"] = metrics.f1;
                per_app[app] = std::move(entry);
            }
            body["per_app"] = std::move(per_app);
            body["macro_f1"] = report.macro_f1;
            body["pooled_f1"] = report.pooled.f1;
            body["precision"] = report.pooled.precision;
            body["recall"] = report.pooled.recall;
        }
    }

    // Cross-validated recommender quality over the labeled feature rows.
    std::vector<CvRow> cv_rows;
    for (const auto& f : features) {
        CvRow row;
        row.app_id = f.app_id;
        row.id = f.element_key + "@" + std::to_string(f.release_ordinal) + "#" +
                 std::to_string(f.topic);
        row.features = f.row();
        row.label = truth_of(f) ? DeletionTruth::deleted : DeletionTruth::not_deleted;
        cv_rows.push_back(std::move(row));
    }
    const int k = ctx.config.get_int("cv_folds");
    bool has_del = false, has_not = false;
    for (const auto& row : cv_rows)
        (row.label == DeletionTruth::deleted ? has_del : has_not) = true;
    if (static_cast<int>(cv_rows.size()) >= k && has_del && has_not) {
        const CvReport cv = kfold_cv(cv_rows, k, rf_config_from(ctx),
                                     derive_seed(ctx.config.get_u64("seed"), std::string("cv")));
        Json cv_json;
        cv_json["folds"] = k;
        cv_json["pooled_f1"] = cv.pooled_metrics.f1;
        cv_json["precision"] = cv.pooled_metrics.precision;
        cv_json["recall"] = cv.pooled_metrics.recall;
        cv_json["macro_f1"] = cv.macro_f1;
        Json matrix;
        matrix["tp"] = cv.pooled.tp;
        matrix["fp"] = cv.pooled.fp;
        matrix["fn"] = cv.pooled.fn;
        matrix["tn"] = cv.pooled.tn;
        cv_json["pooled_matrix"] = std::move(matrix);
        body["cv"] = std::move(cv_json);
    } else {
        warn(ctx.warnings, "evaluate: skipping cross-validation (needs >= " + std::to_string(k) +
                               " labeled rows with both classes)");
    }

    if (body.empty())
        throw ValidationError("evaluate: nothing to evaluate — run 'recommend' or provide "
                              "a confusion fixture");
    write_json_doc(ctx.artifact("metrics.json"), ctx.header(), std::move(body));
}

// ---- tlo ---------------------------------------------------------------------------

void step_tlo(const Ctx& ctx) {
    if (!ctx.config.has("judgments"))
        throw ValidationError("config key 'judgments' is required for 'tlo'");
    std::vector<IntrusionJudgment> judgments;
    read_jsonl(ctx.config.get("judgments"), [&](const Json& j) {
        IntrusionJudgment judgment;
        judgment.doc_id = j.at("doc").get<std::string>();
        for (const auto& [topic, p] : j.at("theta").items())
            judgment.theta[std::stoi(topic)] = p.get<double>();
        judgment.true_intruder = j.at("intruder").get<int>();
        judgment.selections = j.at("selected").get<std::vector<int>>();
        judgments.push_back(std::move(judgment));
    });
    const TloReport report = tlo(judgments);
    Json per_doc = Json::object();
    for (const auto& [doc, value] : report.per_doc) per_doc[doc] = value;
    Json body;
    body["per_doc"] = std::move(per_doc);
    body["mean"] = report.mean;
    write_json_doc(ctx.artifact("tlo.json"), ctx.header(), std::move(body));
}

// ---- report -----------------------------------------------------------------------

void step_report(const Ctx& ctx) {
    const bool have_metrics = std::filesystem::exists(ctx.artifact("metrics.json"));
    const bool have_recs = std::filesystem::exists(ctx.artifact("recommendations.jsonl"));
    if (!have_metrics && !have_recs)
        throw ValidationError("missing artifacts for 'report' — run 'evaluate' or 'recommend' "
                              "first");

    // Element display names and per-app counts, when the artifacts exist.
    std::map<std::string, std::string> label_of_key;
    std::map<std::string, std::size_t> elements_per_app;
    if (std::filesystem::exists(ctx.artifact("elements.jsonl"))) {
        for (const auto& e : read_element_records(ctx.artifact("elements.jsonl"))) {
            ++elements_per_app[e.app];
            if (!e.element.label.empty() && !label_of_key.count(e.key))
                label_of_key[e.key] = e.element.label;
        }
    }
    std::map<std::string, std::size_t> reviews_per_app;
    if (std::filesystem::exists(ctx.artifact("tokens.jsonl"))) {
        read_jsonl(ctx.artifact("tokens.jsonl"),
                   [&](const Json& j) { ++reviews_per_app[j.at("app").get<std::string>()]; });
    }

    std::ofstream md(ctx.artifact("report.md"), std::ios::binary | std::ios::trunc);
    if (!md) throw IoError("cannot write report.md");
    const ArtifactHeader header = ctx.header();
    md << "# Functionality deletion report\n\n";
    md << "- tool version: " << header.tool_version << "\n";
    md << "- seed: " << header.seed << "\n";
    md << "- config hash: " << header.config_hash << "\n";
    if (!header.timestamp.empty()) md << "- generated: " << header.timestamp << "\n";
    md << "\n";

    if (have_recs) {
        md << "## Deletion candidates\n\n";
        md << "| app | element | window | topic | probability |\n";
        md << "|---|---|---|---|---|\n";
        std::size_t candidates = 0;
        read_jsonl(ctx.artifact("recommendations.jsonl"), [&](const Json& j) {
            if (j.at("decision").get<std::string>() != "delete_candidate") return;
            ++candidates;
            const std::string key = j.at("element_key").get<std::string>();
            auto it = label_of_key.find(key);
            const std::string display = it != label_of_key.end() ? it->second : key;
            char prob[16];
            std::snprintf(prob, sizeof(prob), "%.4f", j.at("prob").get<double>());
            md << "| " << j.at("app").get<std::string>() << " | " << display << " | "
               << j.at("release_ordinal").get<int>() << " | " << j.at("topic").get<int>()
               << " | " << prob << " |\n";
        });
        if (candidates == 0) md << "| _none_ | | | | |\n";
        md << "\n";
    }

    std::ofstream csv(ctx.artifact("summary.csv"), std::ios::binary | std::ios::trunc);
    if (!csv) throw IoError("cannot write summary.csv");
    csv << "app,ui_elements,reviews,fp,fn,tp,tn,precision,recall,f1\n";

    if (have_metrics) {
        const Json metrics = read_json_doc(ctx.artifact("metrics.json"));
        if (metrics.contains("per_app")) {
            md << "## Retrospective metrics\n\n";
            md << "| app | FP | FN | TP | TN | precision | recall | F1 |\n";
            md << "|---|---|---|---|---|---|---|---|\n";
            for (const auto& [app, m] : metrics.at("per_app").items()) {
                char p[16], r[16], f[16];
                std::snprintf(p, sizeof(p), "%.4f", m.at("precision").get<double>());
                std::snprintf(r, sizeof(r), "%.4f", m.at("recall").get<double>());
                std::snprintf(f, sizeof(f), "%.4f", m.at("f1").get<double>());
                md << "| " << app << " | " << m.at("fp").get<std::int64_t>() << " | "
                   << m.at("fn").get<std::int64_t>() << " | " << m.at("tp").get<std::int64_t>()
                   << " | " << m.at("tn").get<std::int64_t>() << " | " << p << " | " << r
                   << " | " << f << " |\n";
                csv << app << "," << elements_per_app[app] << "," << reviews_per_app[app] << ","
                    << m.at("fp").get<std::int64_t>() << "," << m.at("fn").get<std::int64_t>()
                    << "," << m.at("tp").get<std::int64_t>() << ","
                    << m.at("tn").get<std::int64_t>() << "," << p << "," << r << "," << f
                    << "\n";
            }
            if (metrics.contains("macro_f1")) {
                char f[16];
                std::snprintf(f, sizeof(f), "%.4f", metrics.at("macro_f1").get<double>());
                md << "\nMacro F1 (mean of per-app F1): " << f << "\n";
            }
            if (metrics.contains("pooled_f1")) {
                char f[16];
                std::snprintf(f, sizeof(f), "%.4f", metrics.at("pooled_f1").get<double>());
                md << "Pooled F1: " << f << "\n";
            }
            md << "\n";
        }
        if (metrics.contains("cv")) {
            const Json& cv = metrics.at("cv");
            char p[16], r[16], f[16];
            std::snprintf(p, sizeof(p), "%.4f", cv.at("precision").get<double>());
            std::snprintf(r, sizeof(r), "%.4f", cv.at("recall").get<double>());
            std::snprintf(f, sizeof(f), "%.4f", cv.at("pooled_f1").get<double>());
            md << "## Cross-validation (" << cv.at("folds").get<int>() << "-fold)\n\n";
            md << "- precision: " << p << "\n";
            md << "- recall: " << r << "\n";
            md << "- pooled F1: " << f << "\n\n";
        }
    }
}

} // namespace

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names = {
        "prep",     "filter",   "mine-ui", "link",   "cluster", "features",
        "diff",     "recommend", "evaluate", "tlo",   "report",  "all",
    };
    return names;
}

void run_subcommand(const std::string& name, const PipelineConfig& config,
                    std::vector<std::string>* warnings) {
    Ctx ctx{config, config.get("out"), warnings};
    std::error_code ec;
    std::filesystem::create_directories(ctx.out, ec);
    if (ec) throw IoError("cannot create output directory '" + ctx.out.string() + "'");

    if (name == "prep") return step_prep(ctx);
    if (name == "filter") return step_filter(ctx);
    if (name == "mine-ui") return step_mine_ui(ctx);
    if (name == "link") return step_link(ctx);
    if (name == "cluster") return step_cluster(ctx);
    if (name == "features") return step_features(ctx);
    if (name == "diff") return step_diff(ctx);
    if (name == "recommend") return step_recommend(ctx);
    if (name == "evaluate") return step_evaluate(ctx);
    if (name == "tlo") return step_tlo(ctx);
    if (name == "report") return step_report(ctx);
    if (name == "all") {
        step_prep(ctx);
        step_filter(ctx);
        step_mine_ui(ctx);
        step_link(ctx);
        step_cluster(ctx);
        step_features(ctx);
        step_diff(ctx);
        step_recommend(ctx);
        step_evaluate(ctx);
        if (config.has("judgments")) step_tlo(ctx);
        step_report(ctx);
        return;
    }
    throw ValidationError("unknown subcommand '" + name + "'");
}

} // namespace radiation
