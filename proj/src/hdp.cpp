#include "radiation/hdp.hpp"

#include <algorithm>
#include <cmath>

#include "radiation/error.hpp"
#include "radiation/rng.hpp"

namespace radiation {

void HdpConfig::validate() const {
    if (gamma <= 0.0 || alpha <= 0.0 || eta <= 0.0)
        throw ValidationError("hdp: concentrations must be > 0");
    if (burn_in < 0 || iterations <= burn_in)
        throw ValidationError("hdp: need iterations > burn_in >= 0");
}

int TopicModel::argmax_topic(std::size_t doc) const {
    const auto& row = theta.at(doc);
    int best = 0;
    for (int k = 1; k < static_cast<int>(row.size()); ++k)
        if (row[k] > row[best]) best = k;
    return best;
}

std::vector<std::string> TopicModel::top_words(int topic, std::size_t count) const {
    const auto& dist = topic_word.at(topic);
    std::vector<int> order(dist.size());
    for (std::size_t w = 0; w < dist.size(); ++w) order[w] = static_cast<int>(w);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (dist[a] != dist[b]) return dist[a] > dist[b];
        return vocabulary[a] < vocabulary[b];
    });
    std::vector<std::string> words;
    for (std::size_t i = 0; i < order.size() && i < count; ++i)
        words.push_back(vocabulary[order[i]]);
    return words;
}

namespace {

/// Direct-assignment Gibbs state. Topics are dense indices 0..K-1; deleting
/// an emptied topic erases its column everywhere and folds its global weight
/// back into the unrepresented mass.
class Sampler {
public:
    Sampler(const std::vector<std::vector<int>>& docs, int vocab_size, const HdpConfig& cfg)
        : docs_(docs), vocab_(vocab_size), cfg_(cfg), rng_(cfg.seed) {
        z_.resize(docs.size());
        doc_topic_.resize(docs.size());
        for (std::size_t j = 0; j < docs.size(); ++j) {
            z_[j].assign(docs[j].size(), -1);
            doc_topic_[j].clear();
        }
        beta_u_ = 1.0;
    }

    void run() {
        // Incremental initialization: each token is sampled from the same
        // conditional as the counts grow.
        for (std::size_t j = 0; j < docs_.size(); ++j)
            for (std::size_t i = 0; i < docs_[j].size(); ++i) assign(j, i, sample_topic(j, i));
        resample_tables_and_beta();
        for (int sweep = 0; sweep < cfg_.iterations; ++sweep) {
            for (std::size_t j = 0; j < docs_.size(); ++j) {
                for (std::size_t i = 0; i < docs_[j].size(); ++i) {
                    remove(j, i);
                    assign(j, i, sample_topic(j, i));
                }
            }
            resample_tables_and_beta();
        }
        // Greedy maximization sweeps turn the last sample into a local mode:
        // each token moves to its argmax conditional among existing topics,
        // then whole documents may jump if a single topic explains them
        // better than their current mixed assignment. Transient micro-topics
        // drain into the dominant topic carrying the same words, which keeps
        // hard cluster assignments stable.
        for (int sweep = 0; sweep < 25; ++sweep) {
            bool moved = false;
            for (std::size_t j = 0; j < docs_.size(); ++j) {
                for (std::size_t i = 0; i < docs_[j].size(); ++i) {
                    const int before = z_[j][i];
                    remove(j, i);
                    const int pick = argmax_topic_for(j, i);
                    assign(j, i, pick);
                    // Index shifts from a dropped topic also count as moves.
                    if (pick != before) moved = true;
                }
            }
            for (std::size_t j = 0; j < docs_.size(); ++j)
                if (greedy_doc_move(j)) moved = true;
            if (!moved) break;
        }
    }

    int n_topics() const { return static_cast<int>(topic_total_.size()); }

    std::vector<std::vector<double>> topic_word_distributions() const {
        const double v = static_cast<double>(vocab_);
        std::vector<std::vector<double>> phi(topic_total_.size(),
                                             std::vector<double>(vocab_, 0.0));
        for (std::size_t k = 0; k < topic_total_.size(); ++k) {
            const double denom = topic_total_[k] + cfg_.eta * v;
            for (int w = 0; w < vocab_; ++w)
                phi[k][w] = (topic_word_[k][w] + cfg_.eta) / denom;
        }
        return phi;
    }

    std::vector<std::vector<double>> doc_topic_distributions() const {
        std::vector<std::vector<double>> theta(docs_.size());
        for (std::size_t j = 0; j < docs_.size(); ++j) {
            std::vector<double> row(topic_total_.size(), 0.0);
            double sum = 0.0;
            for (std::size_t k = 0; k < topic_total_.size(); ++k) {
                row[k] = doc_count(j, static_cast<int>(k)) + cfg_.alpha * beta_[k];
                sum += row[k];
            }
            for (double& x : row) x /= sum;
            theta[j] = std::move(row);
        }
        return theta;
    }

private:
    double doc_count(std::size_t j, int k) const {
        return k < static_cast<int>(doc_topic_[j].size()) ? doc_topic_[j][k] : 0.0;
    }

    int sample_topic(std::size_t j, std::size_t i) {
        const int w = docs_[j][i];
        const int K = n_topics();
        const double v = static_cast<double>(vocab_);
        scratch_.assign(K + 1, 0.0);
        double total = 0.0;
        for (int k = 0; k < K; ++k) {
            const double word_part = (topic_word_[k][w] + cfg_.eta) / (topic_total_[k] + cfg_.eta * v);
            total += (doc_count(j, k) + cfg_.alpha * beta_[k]) * word_part;
            scratch_[k] = total;
        }
        total += cfg_.alpha * beta_u_ / v;
        scratch_[K] = total;
        const double u = rng_.next_double() * total;
        int pick = K;
        for (int k = 0; k <= K; ++k) {
            if (u < scratch_[k]) {
                pick = k;
                break;
            }
        }
        if (pick == K) spawn_topic();
        return pick;
    }

    int argmax_topic_for(std::size_t j, std::size_t i) const {
        const int w = docs_[j][i];
        const double v = static_cast<double>(vocab_);
        int best = 0;
        double best_score = -1.0;
        for (int k = 0; k < n_topics(); ++k) {
            const double score = (doc_count(j, k) + cfg_.alpha * beta_[k]) *
                                 (topic_word_[k][w] + cfg_.eta) / (topic_total_[k] + cfg_.eta * v);
            if (score > best_score) {
                best_score = score;
                best = k;
            }
        }
        return best;
    }

    /// Joint conditional log-score of assigning document j as `assignment`,
    /// with the document's own tokens removed from the counts beforehand.
    double doc_assignment_logscore(std::size_t j, const std::vector<int>& assignment) const {
        const double v = static_cast<double>(vocab_);
        std::vector<int> local_doc(n_topics(), 0);
        std::map<std::pair<int, int>, int> local_word; // (topic, word) -> added
        std::vector<int> local_total(n_topics(), 0);
        double score = 0.0;
        for (std::size_t i = 0; i < docs_[j].size(); ++i) {
            const int k = assignment[i];
            const int w = docs_[j][i];
            const double doc_part = local_doc[k] + cfg_.alpha * beta_[k];
            const double word_part =
                (topic_word_[k][w] + local_word[{k, w}] + cfg_.eta) /
                (topic_total_[k] + local_total[k] + cfg_.eta * v);
            score += std::log(doc_part * word_part);
            ++local_doc[k];
            ++local_word[{k, w}];
            ++local_total[k];
        }
        return score;
    }

    /// Considers moving all of document j's tokens into one topic; keeps the
    /// current (possibly mixed) assignment when it scores at least as well.
    bool greedy_doc_move(std::size_t j) {
        if (docs_[j].empty() || n_topics() <= 1) return false;
        const std::vector<int> current = z_[j];
        // Take the document out without dropping emptied topics, so topic
        // ids stay stable while candidates are scored.
        for (std::size_t i = 0; i < docs_[j].size(); ++i) {
            const int k = current[i];
            --doc_topic_[j][k];
            --topic_word_[k][docs_[j][i]];
            --topic_total_[k];
        }
        double best_score = doc_assignment_logscore(j, current);
        std::vector<int> best = current;
        for (int k = 0; k < n_topics(); ++k) {
            const std::vector<int> candidate(docs_[j].size(), k);
            const double score = doc_assignment_logscore(j, candidate);
            if (score > best_score + 1e-12) {
                best_score = score;
                best = candidate;
            }
        }
        for (std::size_t i = 0; i < docs_[j].size(); ++i) {
            const int k = best[i];
            z_[j][i] = k;
            ++doc_topic_[j][k];
            ++topic_word_[k][docs_[j][i]];
            ++topic_total_[k];
        }
        const bool moved = best != current;
        for (int k = n_topics() - 1; k >= 0; --k)
            if (topic_total_[k] == 0) drop_topic(k);
        return moved;
    }

    void spawn_topic() {
        topic_word_.emplace_back(vocab_, 0);
        topic_total_.push_back(0);
        const double b = rng_.next_beta(1.0, cfg_.gamma);
        beta_.push_back(b * beta_u_);
        beta_u_ *= (1.0 - b);
    }

    void assign(std::size_t j, std::size_t i, int k) {
        z_[j][i] = k;
        if (static_cast<int>(doc_topic_[j].size()) <= k) doc_topic_[j].resize(k + 1, 0);
        ++doc_topic_[j][k];
        ++topic_word_[k][docs_[j][i]];
        ++topic_total_[k];
    }

    void remove(std::size_t j, std::size_t i) {
        const int k = z_[j][i];
        --doc_topic_[j][k];
        --topic_word_[k][docs_[j][i]];
        --topic_total_[k];
        z_[j][i] = -1;
        if (topic_total_[k] == 0) drop_topic(k);
    }

    void drop_topic(int k) {
        beta_u_ += beta_[k];
        beta_.erase(beta_.begin() + k);
        topic_word_.erase(topic_word_.begin() + k);
        topic_total_.erase(topic_total_.begin() + k);
        for (auto& row : doc_topic_)
            if (k < static_cast<int>(row.size())) row.erase(row.begin() + k);
        for (auto& doc_z : z_)
            for (int& zz : doc_z)
                if (zz > k) --zz;
    }

    void resample_tables_and_beta() {
        const int K = n_topics();
        if (K == 0) return;
        // Tables per (doc, topic) via the Chinese-restaurant simulation,
        // then beta | m ~ Dirichlet(m_1, ..., m_K, gamma).
        std::vector<double> table_counts(K, 0.0);
        for (std::size_t j = 0; j < docs_.size(); ++j) {
            for (int k = 0; k < K; ++k) {
                const int n = static_cast<int>(doc_count(j, k));
                if (n == 0) continue;
                const double concentration = cfg_.alpha * beta_[k];
                int tables = 1;
                for (int c = 1; c < n; ++c)
                    if (rng_.next_double() < concentration / (concentration + c)) ++tables;
                table_counts[k] += tables;
            }
        }
        std::vector<double> dir_alpha = table_counts;
        dir_alpha.push_back(cfg_.gamma);
        const std::vector<double> draw = rng_.next_dirichlet(dir_alpha);
        for (int k = 0; k < K; ++k) beta_[k] = draw[k];
        beta_u_ = draw[K];
    }

    const std::vector<std::vector<int>>& docs_;
    int vocab_;
    HdpConfig cfg_;
    Rng rng_;

    std::vector<std::vector<int>> z_;          // [doc][token] -> topic
    std::vector<std::vector<int>> doc_topic_;  // [doc][topic] counts
    std::vector<std::vector<int>> topic_word_; // [topic][word] counts
    std::vector<int> topic_total_;             // [topic]
    std::vector<double> beta_;                 // realized global weights
    double beta_u_ = 1.0;                      // unrepresented mass
    std::vector<double> scratch_;
};

} // namespace

TopicModel fit_hdp(const std::vector<std::vector<std::string>>& docs, const HdpConfig& config) {
    config.validate();
    if (docs.empty()) throw ValidationError("hdp: empty corpus");
    std::map<std::string, int> vocab_ids;
    for (const auto& doc : docs)
        for (const auto& tok : doc) vocab_ids.emplace(tok, 0);
    if (vocab_ids.empty()) throw ValidationError("hdp: all documents are empty");
    int next_id = 0;
    for (auto& [tok, id] : vocab_ids) id = next_id++;

    std::vector<std::vector<int>> encoded(docs.size());
    for (std::size_t j = 0; j < docs.size(); ++j) {
        encoded[j].reserve(docs[j].size());
        for (const auto& tok : docs[j]) encoded[j].push_back(vocab_ids.at(tok));
    }

    Sampler sampler(encoded, next_id, config);
    sampler.run();

    TopicModel model;
    model.n_topics = sampler.n_topics();
    model.vocabulary.resize(next_id);
    for (const auto& [tok, id] : vocab_ids) model.vocabulary[id] = tok;
    model.topic_word = sampler.topic_word_distributions();
    model.theta = sampler.doc_topic_distributions();
    return model;
}

std::vector<Cluster> cluster_element_reviews(
    const std::vector<Link>& links,
    const std::map<std::string, std::vector<std::string>>& review_tokens,
    const std::string& app_id, const HdpConfig& config, int min_group_size) {
    // Group member review ids per (element, window), in link order.
    std::map<std::pair<std::string, int>, std::vector<std::string>> groups;
    for (const auto& link : links) {
        auto it = review_tokens.find(link.review_id);
        if (it == review_tokens.end())
            throw ValidationError("cluster: link references unknown review '" + link.review_id +
                                  "'");
        groups[{link.element_key, link.release_ordinal}].push_back(link.review_id);
    }

    std::vector<Cluster> clusters;
    for (const auto& [group_key, member_ids] : groups) {
        const auto& [key, ordinal] = group_key;
        if (static_cast<int>(member_ids.size()) < min_group_size) {
            Cluster c;
            c.app_id = app_id;
            c.element_key = key;
            c.release_ordinal = ordinal;
            c.topic = 0;
            c.members = member_ids;
            // Top words by frequency, ties lexicographic.
            std::map<std::string, int> freq;
            for (const auto& id : member_ids)
                for (const auto& tok : review_tokens.at(id)) ++freq[tok];
            std::vector<std::pair<std::string, int>> by_freq(freq.begin(), freq.end());
            std::sort(by_freq.begin(), by_freq.end(), [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
            });
            for (std::size_t i = 0; i < by_freq.size() && i < 10; ++i)
                c.top_words.push_back(by_freq[i].first);
            c.mean_theta[0] = 1.0;
            clusters.push_back(std::move(c));
            continue;
        }

        std::vector<std::vector<std::string>> docs;
        docs.reserve(member_ids.size());
        for (const auto& id : member_ids) docs.push_back(review_tokens.at(id));

        HdpConfig group_config = config;
        group_config.seed =
            derive_seed(config.seed, key + "#" + std::to_string(ordinal));
        const TopicModel model = fit_hdp(docs, group_config);

        std::map<int, std::vector<std::size_t>> topic_members;
        for (std::size_t d = 0; d < docs.size(); ++d)
            topic_members[model.argmax_topic(d)].push_back(d);
        for (const auto& [topic, doc_ids] : topic_members) {
            Cluster c;
            c.app_id = app_id;
            c.element_key = key;
            c.release_ordinal = ordinal;
            c.topic = topic;
            for (std::size_t d : doc_ids) c.members.push_back(member_ids[d]);
            c.top_words = model.top_words(topic);
            for (int k = 0; k < model.n_topics; ++k) {
                double sum = 0.0;
                for (std::size_t d : doc_ids) sum += model.theta[d][k];
                c.mean_theta[k] = sum / static_cast<double>(doc_ids.size());
            }
            clusters.push_back(std::move(c));
        }
    }
    return clusters;
}

} // namespace radiation
