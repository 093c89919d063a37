// Command-line front end. Talks to the pipeline exclusively through the
// C API in radiation.h; every config key is also exposed as a --key flag,
// and flags win over the config file.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "radiation.h"

namespace {

struct KeyFlag {
    const char* key;
    const char* description;
};

// Keys surfaced as flags. The pipeline validates values; the CLI only
// forwards strings.
const std::vector<KeyFlag>& key_flags() {
    static const std::vector<KeyFlag> flags = {
        {"reviews", "reviews.jsonl input"},
        {"releases", "releases.jsonl input"},
        {"labels", "informativeness labels (labels.jsonl)"},
        {"label_reviews", "reviews the labels refer to (defaults to the main corpus)"},
        {"train_features", "pre-labeled feature rows for the recommender"},
        {"judgments", "topic-intrusion judgments (judgments.jsonl)"},
        {"confusion", "pre-tallied confusion quadruples for 'evaluate'"},
        {"out", "output directory"},
        {"data_dir", "directory with lemmas.tsv, stopwords.txt, lexicon.tsv"},
        {"lemmas", "lemma table override"},
        {"stopwords", "stop list override"},
        {"lexicon", "sentiment lexicon override"},
        {"apps", "comma-separated app ids to process"},
        {"seed", "master RNG seed"},
        {"threshold", "review-element cosine link threshold"},
        {"trees", "random forest size"},
        {"rf_max_depth", "tree depth limit (0 = unlimited)"},
        {"rf_min_samples_leaf", "minimum rows per leaf"},
        {"rf_features_per_split", "features sampled per split"},
        {"rf_bootstrap", "bootstrap row sampling (true/false)"},
        {"rf_decision_threshold", "deletion probability cutoff"},
        {"nb_alpha", "Naive Bayes smoothing"},
        {"nb_balance", "downsample the majority class before NB training"},
        {"hdp_gamma", "HDP top-level concentration"},
        {"hdp_alpha", "HDP group-level concentration"},
        {"hdp_eta", "HDP word smoothing"},
        {"hdp_iterations", "Gibbs sweeps"},
        {"hdp_burn_in", "reserved burn-in sweeps"},
        {"min_reviews_for_hdp", "below this, one cluster per element"},
        {"cv_folds", "cross-validation folds"},
        {"extra_widget_tags", "extra layout tags mined as widgets"},
    };
    return flags;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("radiation ") + rad_version() +
                 " — review-driven UI functionality deletion recommender"};
    app.require_subcommand(1);

    std::string config_path;
    bool no_header_timestamp = false;
    app.add_option("--config", config_path, "key=value config file");
    app.add_flag("--no-header-timestamp", no_header_timestamp,
                 "omit timestamps from artifact headers (bit-exact reruns)");

    std::vector<std::pair<std::string, std::string>> overrides;
    std::vector<std::string> holders(key_flags().size());
    std::vector<CLI::App*> subcommands;
    {
        std::string names(rad_subcommand_list());
        std::size_t start = 0;
        while (start < names.size()) {
            std::size_t end = names.find(' ', start);
            if (end == std::string::npos) end = names.size();
            subcommands.push_back(app.add_subcommand(names.substr(start, end - start)));
            start = end + 1;
        }
    }
    for (std::size_t i = 0; i < key_flags().size(); ++i) {
        app.add_option("--" + std::string(key_flags()[i].key), holders[i],
                       key_flags()[i].description);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1; // bad invocation is a validation failure
    }

    rad_pipeline* pipeline = rad_pipeline_new();
    if (!pipeline) {
        std::fprintf(stderr, "error: out of memory\n");
        return 1;
    }

    auto fail = [&](rad_status status) {
        std::fprintf(stderr, "error: %s\n", rad_pipeline_last_error(pipeline));
        rad_pipeline_free(pipeline);
        return status == RAD_IO_ERROR ? 2 : 1;
    };

    if (!config_path.empty()) {
        const rad_status status = rad_pipeline_load_config(pipeline, config_path.c_str());
        if (status != RAD_OK) return fail(status);
    }
    for (std::size_t i = 0; i < key_flags().size(); ++i) {
        if (app.count("--" + std::string(key_flags()[i].key)) == 0) continue;
        const rad_status status =
            rad_pipeline_set(pipeline, key_flags()[i].key, holders[i].c_str());
        if (status != RAD_OK) return fail(status);
    }
    if (no_header_timestamp) {
        const rad_status status = rad_pipeline_set(pipeline, "no_header_timestamp", "true");
        if (status != RAD_OK) return fail(status);
    }

    int exit_code = 0;
    for (CLI::App* sub : subcommands) {
        if (!sub->parsed()) continue;
        const rad_status status = rad_pipeline_run(pipeline, sub->get_name().c_str());
        for (size_t w = 0; w < rad_pipeline_warning_count(pipeline); ++w)
            std::fprintf(stderr, "warning: %s\n", rad_pipeline_warning(pipeline, w));
        if (status != RAD_OK) {
            std::fprintf(stderr, "error: %s\n", rad_pipeline_last_error(pipeline));
            exit_code = status == RAD_IO_ERROR ? 2 : 1;
        } else {
            std::fprintf(stderr, "%s: done\n", sub->get_name().c_str());
        }
    }

    rad_pipeline_free(pipeline);
    return exit_code;
}
