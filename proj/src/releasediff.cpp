#include "radiation/releasediff.hpp"

#include <algorithm>

namespace radiation {

std::set<std::string> diff_releases(const std::set<std::string>& prev,
                                    const std::set<std::string>& next) {
    std::set<std::string> deleted;
    std::set_difference(prev.begin(), prev.end(), next.begin(), next.end(),
                        std::inserter(deleted, deleted.begin()));
    return deleted;
}

std::vector<DeletionRecord> find_deletions(
    const std::string& app_id, const std::vector<std::set<std::string>>& keys_by_ordinal) {
    std::vector<DeletionRecord> records;
    for (std::size_t i = 1; i < keys_by_ordinal.size(); ++i) {
        for (const auto& key : diff_releases(keys_by_ordinal[i - 1], keys_by_ordinal[i])) {
            DeletionRecord rec;
            rec.app_id = app_id;
            rec.element_key = key;
            rec.last_present_ordinal = static_cast<int>(i) - 1;
            rec.deleted_in_ordinal = static_cast<int>(i);
            records.push_back(std::move(rec));
        }
    }
    return records;
}

ClusterTruth label_cluster(const std::vector<DeletionRecord>& deletions,
                           const std::string& app_id, const std::string& element_key,
                           int release_ordinal) {
    for (const auto& rec : deletions) {
        if (rec.app_id == app_id && rec.element_key == element_key &&
            rec.deleted_in_ordinal == release_ordinal + 1)
            return ClusterTruth::deleted;
    }
    return ClusterTruth::not_deleted;
}

} // namespace radiation
