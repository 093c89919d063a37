#include "radiation/forest.hpp"

#include <algorithm>
#include <cmath>

#include "radiation/error.hpp"
#include "radiation/jsonl.hpp"
#include "radiation/rng.hpp"

namespace radiation {

const char* to_string(DeletionTruth label) {
    return label == DeletionTruth::deleted ? "deleted" : "not_deleted";
}

DeletionTruth deletion_truth_from_string(const std::string& s) {
    if (s == "deleted") return DeletionTruth::deleted;
    if (s == "not_deleted") return DeletionTruth::not_deleted;
    throw ValidationError("unknown deletion label '" + s + "'");
}

void RfConfig::validate() const {
    if (n_trees < 1) throw ValidationError("rf: n_trees must be >= 1");
    if (decision_threshold <= 0.0 || decision_threshold >= 1.0)
        throw ValidationError("rf: decision_threshold must be in (0,1)");
    if (min_samples_leaf < 1) throw ValidationError("rf: min_samples_leaf must be >= 1");
    if (features_per_split < 1) throw ValidationError("rf: features_per_split must be >= 1");
    if (max_depth < 0) throw ValidationError("rf: max_depth must be >= 0 (0 = unlimited)");
}

namespace {

struct TreeBuilder {
    const std::vector<TrainingRow>& rows;
    const RfConfig& config;
    int n_features;
    double weight_deleted;     // balanced class weights
    double weight_not_deleted;
    Rng rng;
    std::vector<Forest::Node> nodes;

    double row_weight(std::size_t i) const {
        return rows[i].label == DeletionTruth::deleted ? weight_deleted : weight_not_deleted;
    }

    double weighted_deleted(const std::vector<std::size_t>& ids) const {
        double w = 0.0;
        for (std::size_t i : ids)
            if (rows[i].label == DeletionTruth::deleted) w += weight_deleted;
        return w;
    }

    double total_weight(const std::vector<std::size_t>& ids) const {
        double w = 0.0;
        for (std::size_t i : ids) w += row_weight(i);
        return w;
    }

    static double gini(double w_pos, double w_total) {
        if (w_total <= 0.0) return 0.0;
        const double p = w_pos / w_total;
        return 1.0 - p * p - (1.0 - p) * (1.0 - p);
    }

    std::vector<int> candidate_features() {
        std::vector<int> all(n_features);
        for (int f = 0; f < n_features; ++f) all[f] = f;
        if (config.features_per_split >= n_features) return all;
        // Partial Fisher-Yates; the chosen subset is then scanned in
        // ascending index order so equal-gain ties stay index-ordered.
        for (int i = 0; i < config.features_per_split; ++i) {
            const auto j = i + static_cast<int>(rng.next_below(n_features - i));
            std::swap(all[i], all[j]);
        }
        all.resize(config.features_per_split);
        std::sort(all.begin(), all.end());
        return all;
    }

    struct Split {
        bool found = false;
        int feature = -1;
        double threshold = 0.0;
        double gain = 0.0;
    };

    Split best_split(const std::vector<std::size_t>& ids) {
        Split best;
        const double w_total = total_weight(ids);
        const double w_pos = weighted_deleted(ids);
        const double parent_gini = gini(w_pos, w_total);
        if (parent_gini <= 0.0) return best;

        for (int f : candidate_features()) {
            std::vector<std::size_t> order = ids;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return rows[a].features[f] < rows[b].features[f];
            });
            double left_w = 0.0, left_pos = 0.0;
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                left_w += row_weight(order[i]);
                if (rows[order[i]].label == DeletionTruth::deleted) left_pos += weight_deleted;
                const double v = rows[order[i]].features[f];
                const double next = rows[order[i + 1]].features[f];
                if (v == next) continue;
                if (static_cast<int>(i) + 1 < config.min_samples_leaf ||
                    static_cast<int>(order.size() - i) - 1 < config.min_samples_leaf)
                    continue;
                const double threshold = v + (next - v) / 2.0;
                if (!(v < threshold)) continue; // adjacent floats, midpoint collapsed
                const double right_w = w_total - left_w;
                const double right_pos = w_pos - left_pos;
                const double gain = parent_gini - (left_w / w_total) * gini(left_pos, left_w) -
                                    (right_w / w_total) * gini(right_pos, right_w);
                if (gain <= 0.0) continue;
                // The scan visits features ascending and thresholds ascending,
                // so strictly-greater wins implement the documented tie-break:
                // lowest feature index, then lowest threshold.
                if (!best.found || gain > best.gain) {
                    best.found = true;
                    best.feature = f;
                    best.threshold = threshold;
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    int build(const std::vector<std::size_t>& ids, int depth) {
        const int node_id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        const double w_total = total_weight(ids);
        const double w_pos = weighted_deleted(ids);

        const bool depth_reached = config.max_depth > 0 && depth >= config.max_depth;
        Split split;
        if (!depth_reached && static_cast<int>(ids.size()) >= 2 * config.min_samples_leaf)
            split = best_split(ids);

        if (split.found) {
            std::vector<std::size_t> left, right;
            for (std::size_t i : ids) {
                (rows[i].features[split.feature] < split.threshold ? left : right).push_back(i);
            }
            nodes[node_id].is_leaf = false;
            nodes[node_id].feature = split.feature;
            nodes[node_id].threshold = split.threshold;
            const int l = build(left, depth + 1);
            nodes[node_id].left = l;
            const int r = build(right, depth + 1);
            nodes[node_id].right = r;
            return node_id;
        }
        nodes[node_id].is_leaf = true;
        nodes[node_id].p_deleted = w_total > 0.0 ? w_pos / w_total : 0.0;
        return node_id;
    }
};

double tree_predict(const std::vector<Forest::Node>& tree, const std::vector<double>& x) {
    int node = 0;
    while (!tree[node].is_leaf)
        node = x[tree[node].feature] < tree[node].threshold ? tree[node].left : tree[node].right;
    return tree[node].p_deleted;
}

void check_finite(const std::vector<double>& features, const std::string& id) {
    for (double v : features)
        if (!std::isfinite(v))
            throw ValidationError("rf: non-finite feature value in row '" + id + "'");
}

} // namespace

Forest Forest::train(const std::vector<TrainingRow>& rows, const RfConfig& config) {
    config.validate();
    if (rows.size() < 2) throw ValidationError("rf: need at least 2 training rows");
    const std::size_t n_features = rows[0].features.size();
    std::size_t n_deleted = 0;
    for (const auto& row : rows) {
        if (row.features.size() != n_features)
            throw ValidationError("rf: inconsistent feature count in row '" + row.id + "'");
        check_finite(row.features, row.id);
        if (row.label == DeletionTruth::deleted) ++n_deleted;
    }
    if (n_deleted == 0 || n_deleted == rows.size())
        throw ValidationError("rf: training data must contain both labels");

    Forest forest;
    forest.config_ = config;
    forest.feature_names_ = ClusterFeatures::feature_names();
    if (forest.feature_names_.size() != n_features) {
        forest.feature_names_.clear();
        for (std::size_t f = 0; f < n_features; ++f)
            forest.feature_names_.push_back("f" + std::to_string(f));
    }

    // Balanced class weights: n / (2 * count_c).
    const double w_del = static_cast<double>(rows.size()) / (2.0 * n_deleted);
    const double w_not = static_cast<double>(rows.size()) / (2.0 * (rows.size() - n_deleted));

    for (int t = 0; t < config.n_trees; ++t) {
        const std::uint64_t tree_seed = derive_seed(config.seed, static_cast<std::uint64_t>(t));
        Rng boot_rng(tree_seed);
        std::vector<std::size_t> sample;
        sample.reserve(rows.size());
        if (config.bootstrap) {
            for (std::size_t i = 0; i < rows.size(); ++i)
                sample.push_back(static_cast<std::size_t>(boot_rng.next_below(rows.size())));
        } else {
            for (std::size_t i = 0; i < rows.size(); ++i) sample.push_back(i);
        }
        TreeBuilder builder{rows,
                            config,
                            static_cast<int>(n_features),
                            w_del,
                            w_not,
                            Rng(derive_seed(tree_seed, 0x5eedULL)),
                            {}};
        builder.build(sample, 0);
        forest.trees_.push_back(std::move(builder.nodes));
    }
    return forest;
}

double Forest::predict(const std::vector<double>& features) const {
    const std::vector<double> probs = tree_probabilities(features);
    double sum = 0.0;
    for (double p : probs) sum += p;
    return sum / static_cast<double>(probs.size());
}

std::vector<double> Forest::tree_probabilities(const std::vector<double>& features) const {
    check_finite(features, "<predict>");
    std::vector<double> probs;
    probs.reserve(trees_.size());
    for (const auto& tree : trees_) probs.push_back(tree_predict(tree, features));
    return probs;
}

namespace {

// Trees serialize as nested split/leaf objects:
//   {"leaf": {"p": 0.8}}
//   {"split": {"feature": "polarity", "threshold": -0.4, "lt": ..., "ge": ...}}
Json node_to_json(const std::vector<Forest::Node>& tree, int index,
                  const std::vector<std::string>& names) {
    const Forest::Node& n = tree[index];
    Json j;
    if (n.is_leaf) {
        j["leaf"] = {{"p", n.p_deleted}};
    } else {
        Json split;
        split["feature"] = names[n.feature];
        split["threshold"] = n.threshold;
        split["lt"] = node_to_json(tree, n.left, names);
        split["ge"] = node_to_json(tree, n.right, names);
        j["split"] = std::move(split);
    }
    return j;
}

int node_from_json(const Json& j, std::vector<Forest::Node>& tree,
                   const std::map<std::string, int>& name_index) {
    const int index = static_cast<int>(tree.size());
    tree.emplace_back();
    if (j.contains("leaf")) {
        tree[index].is_leaf = true;
        tree[index].p_deleted = j.at("leaf").at("p").get<double>();
        return index;
    }
    const Json& split = j.at("split");
    auto it = name_index.find(split.at("feature").get<std::string>());
    if (it == name_index.end())
        throw ValidationError("rf: model references unknown feature '" +
                              split.at("feature").get<std::string>() + "'");
    tree[index].is_leaf = false;
    tree[index].feature = it->second;
    tree[index].threshold = split.at("threshold").get<double>();
    const int left = node_from_json(split.at("lt"), tree, name_index);
    tree[index].left = left;
    const int right = node_from_json(split.at("ge"), tree, name_index);
    tree[index].right = right;
    return index;
}

} // namespace

std::string Forest::to_json_string() const {
    Json j;
    j["format"] = "radiation.rf/1";
    j["n_trees"] = config_.n_trees;
    j["max_depth"] = config_.max_depth;
    j["min_samples_leaf"] = config_.min_samples_leaf;
    j["features_per_split"] = config_.features_per_split;
    j["bootstrap"] = config_.bootstrap;
    j["decision_threshold"] = config_.decision_threshold;
    j["seed"] = config_.seed;
    j["feature_names"] = feature_names_;
    Json trees = Json::array();
    for (const auto& tree : trees_) trees.push_back(node_to_json(tree, 0, feature_names_));
    j["trees"] = std::move(trees);
    return j.dump(2);
}

Forest Forest::from_json_string(const std::string& text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded() || j.value("format", "") != "radiation.rf/1")
        throw ValidationError("rf: unrecognized model document");
    Forest forest;
    forest.config_.n_trees = j.at("n_trees").get<int>();
    forest.config_.max_depth = j.at("max_depth").get<int>();
    forest.config_.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    forest.config_.features_per_split = j.at("features_per_split").get<int>();
    forest.config_.bootstrap = j.at("bootstrap").get<bool>();
    forest.config_.decision_threshold = j.at("decision_threshold").get<double>();
    forest.config_.seed = j.at("seed").get<std::uint64_t>();
    forest.feature_names_ = j.at("feature_names").get<std::vector<std::string>>();
    std::map<std::string, int> name_index;
    for (std::size_t i = 0; i < forest.feature_names_.size(); ++i)
        name_index[forest.feature_names_[i]] = static_cast<int>(i);
    for (const auto& tree : j.at("trees")) {
        std::vector<Node> nodes;
        node_from_json(tree, nodes, name_index);
        forest.trees_.push_back(std::move(nodes));
    }
    if (forest.trees_.empty()) throw ValidationError("rf: model has no trees");
    return forest;
}

std::vector<Recommendation> recommend(const Forest& forest,
                                      const std::vector<ClusterFeatures>& rows,
                                      double decision_threshold) {
    std::vector<Recommendation> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        Recommendation rec;
        rec.app_id = row.app_id;
        rec.element_key = row.element_key;
        rec.release_ordinal = row.release_ordinal;
        rec.topic = row.topic;
        rec.probability = forest.predict(row.row());
        rec.delete_candidate = rec.probability >= decision_threshold;
        out.push_back(std::move(rec));
    }
    std::sort(out.begin(), out.end(), [](const Recommendation& a, const Recommendation& b) {
        if (a.probability != b.probability) return a.probability > b.probability;
        if (a.app_id != b.app_id) return a.app_id < b.app_id;
        if (a.element_key != b.element_key) return a.element_key < b.element_key;
        if (a.release_ordinal != b.release_ordinal) return a.release_ordinal < b.release_ordinal;
        return a.topic < b.topic;
    });
    return out;
}

} // namespace radiation
