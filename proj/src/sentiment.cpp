#include "radiation/sentiment.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include "radiation/error.hpp"

namespace radiation {

namespace {

const std::set<std::string>& default_negations() {
    static const std::set<std::string> words = {"not",  "no",      "never", "cannot",
                                                "none", "neither", "nor",   "without"};
    return words;
}

double clamp(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

} // namespace

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open sentiment lexicon '" + path.string() + "'");
    SentimentLexicon lex;
    lex.negations = default_negations();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos)
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": expected lemma\\tpolarity\\tsubjectivity");
        Entry e;
        e.polarity = std::strtod(line.c_str() + tab1 + 1, nullptr);
        e.subjectivity = std::strtod(line.c_str() + tab2 + 1, nullptr);
        if (e.polarity < -1.0 || e.polarity > 1.0 || e.subjectivity < 0.0 || e.subjectivity > 1.0)
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": sentiment values out of range");
        lex.entries[line.substr(0, tab1)] = e;
    }
    return lex;
}

SentimentLexicon SentimentLexicon::from_entries(
    const std::vector<std::pair<std::string, Entry>>& list) {
    SentimentLexicon lex;
    lex.negations = default_negations();
    for (const auto& [word, entry] : list) lex.entries[word] = entry;
    return lex;
}

SentimentScore score_sentiment(const std::vector<std::string>& tokens,
                               const SentimentLexicon& lex) {
    double polarity_sum = 0.0;
    double subjectivity_sum = 0.0;
    std::size_t matches = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        auto it = lex.entries.find(tokens[i]);
        if (it == lex.entries.end()) continue;
        double p = it->second.polarity;
        for (std::size_t back = 1; back <= 2 && back <= i; ++back) {
            if (lex.negations.count(tokens[i - back])) {
                p *= -0.5;
                break;
            }
        }
        polarity_sum += p;
        subjectivity_sum += it->second.subjectivity;
        ++matches;
    }
    if (matches == 0) return {0.0, 0.0};
    SentimentScore score;
    score.polarity = clamp(polarity_sum / static_cast<double>(matches), -1.0, 1.0);
    score.objectivity = clamp(subjectivity_sum / static_cast<double>(matches), 0.0, 1.0);
    return score;
}

bool mentions_uninstall(const std::vector<std::string>& tokens) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] == "uninstall" || tokens[i] == "refund") return true;
        if (tokens[i] == "remove" || tokens[i] == "delete") {
            for (std::size_t j = i >= 3 ? i - 3 : 0; j < tokens.size() && j <= i + 3; ++j) {
                if (tokens[j] == "app") return true;
            }
        }
    }
    return false;
}

const std::vector<std::string>& ClusterFeatures::feature_names() {
    static const std::vector<std::string> names = {"n_reviews", "rating",      "delta_rating",
                                                   "polarity",  "objectivity", "uninstall"};
    return names;
}

ClusterFeatures extract_features(const Cluster& cluster,
                                 const std::map<std::string, const Review*>& reviews,
                                 const std::map<std::string, std::vector<std::string>>& tokens,
                                 double release_mean_rating, const SentimentLexicon& lex) {
    if (cluster.members.empty()) throw ValidationError("features: empty cluster");
    ClusterFeatures f;
    f.app_id = cluster.app_id;
    f.element_key = cluster.element_key;
    f.release_ordinal = cluster.release_ordinal;
    f.topic = cluster.topic;
    f.n_reviews = static_cast<double>(cluster.members.size());

    double rating_sum = 0.0;
    double polarity_sum = 0.0;
    double objectivity_sum = 0.0;
    int uninstall_count = 0;
    for (const auto& id : cluster.members) {
        auto rit = reviews.find(id);
        auto tit = tokens.find(id);
        if (rit == reviews.end() || tit == tokens.end())
            throw ValidationError("features: cluster member '" + id +
                                  "' missing from the review index");
        rating_sum += rit->second->rating;
        const SentimentScore s = score_sentiment(tit->second, lex);
        polarity_sum += s.polarity;
        objectivity_sum += s.objectivity;
        if (mentions_uninstall(tit->second)) ++uninstall_count;
    }
    const double n = f.n_reviews;
    f.rating = rating_sum / n;
    f.delta_rating = release_mean_rating - f.rating;
    f.polarity = polarity_sum / n;
    f.objectivity = objectivity_sum / n;
    f.uninstall = static_cast<double>(uninstall_count);
    return f;
}

} // namespace radiation
