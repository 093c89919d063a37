#include "radiation/linker.hpp"

#include <cmath>

namespace radiation {

std::vector<TfIdfVector> build_tfidf(const std::vector<std::vector<std::string>>& docs) {
    const double n_docs = static_cast<double>(docs.size());
    std::map<std::string, int> df;
    for (const auto& doc : docs) {
        std::map<std::string, int> seen;
        for (const auto& tok : doc) seen.emplace(tok, 1);
        for (const auto& [tok, one] : seen) ++df[tok];
    }
    std::vector<TfIdfVector> vectors;
    vectors.reserve(docs.size());
    for (const auto& doc : docs) {
        TfIdfVector v;
        for (const auto& tok : doc) v.weights[tok] += 1.0;
        double sq = 0.0;
        for (auto& [tok, w] : v.weights) {
            w *= std::log(n_docs / (1.0 + df[tok])) + 1.0;
            sq += w * w;
        }
        if (sq > 0.0) {
            const double norm = std::sqrt(sq);
            for (auto& [tok, w] : v.weights) w /= norm;
            v.norm = 1.0;
        }
        vectors.push_back(std::move(v));
    }
    return vectors;
}

double cosine(const TfIdfVector& a, const TfIdfVector& b) {
    if (a.norm == 0.0 || b.norm == 0.0) return 0.0;
    // Iterate the smaller support.
    const TfIdfVector& small = a.weights.size() <= b.weights.size() ? a : b;
    const TfIdfVector& large = a.weights.size() <= b.weights.size() ? b : a;
    double dot = 0.0;
    for (const auto& [tok, w] : small.weights) {
        auto it = large.weights.find(tok);
        if (it != large.weights.end()) dot += w * it->second;
    }
    return dot / (a.norm * b.norm);
}

std::vector<Link> link_reviews(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& reviews,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& elements,
    int release_ordinal, double threshold) {
    // idf corpus = review docs + element description docs for the window.
    std::vector<std::vector<std::string>> docs;
    docs.reserve(reviews.size() + elements.size());
    for (const auto& [id, tokens] : reviews) docs.push_back(tokens);
    for (const auto& [key, tokens] : elements) docs.push_back(tokens);
    const std::vector<TfIdfVector> vectors = build_tfidf(docs);

    std::vector<Link> links;
    for (std::size_t r = 0; r < reviews.size(); ++r) {
        for (std::size_t e = 0; e < elements.size(); ++e) {
            const double sim = cosine(vectors[r], vectors[reviews.size() + e]);
            if (sim > 0.0 && sim >= threshold) {
                Link link;
                link.review_id = reviews[r].first;
                link.element_key = elements[e].first;
                link.release_ordinal = release_ordinal;
                link.similarity = sim;
                links.push_back(std::move(link));
            }
        }
    }
    return links;
}

} // namespace radiation
