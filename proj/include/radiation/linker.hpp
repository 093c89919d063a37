#pragma once

#include <map>
#include <string>
#include <vector>

namespace radiation {

/// Sparse L2-normalized tf-idf vector. `norm` is the Euclidean norm of the
/// stored weights: 1 for non-empty documents, 0 for empty ones.
struct TfIdfVector {
    std::map<std::string, double> weights;
    double norm = 0.0;
};

/// A review-element association at or above the similarity threshold.
struct Link {
    std::string review_id;
    std::string element_key;
    int release_ordinal = 0;
    double similarity = 0.0;
};

/// tf = raw count, idf = ln(N / (1 + df)) + 1 over the combined corpus,
/// vectors L2-normalized. All-empty documents yield zero vectors.
std::vector<TfIdfVector> build_tfidf(const std::vector<std::vector<std::string>>& docs);

/// dot(a,b) / (|a||b|); 0 when either norm is zero.
double cosine(const TfIdfVector& a, const TfIdfVector& b);

/// Scores every (review, element) pair within one release window over the
/// combined tf-idf corpus and emits links with cosine >= threshold (and
/// strictly positive, so zero-similarity pairs never link). A review may
/// link to many elements and vice versa.
std::vector<Link> link_reviews(const std::vector<std::pair<std::string, std::vector<std::string>>>& reviews,
                               const std::vector<std::pair<std::string, std::vector<std::string>>>& elements,
                               int release_ordinal, double threshold = 0.65);

} // namespace radiation
