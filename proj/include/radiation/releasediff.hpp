#pragma once

#include <set>
#include <string>
#include <vector>

namespace radiation {

/// An element key present in release i-1 and absent in release i.
struct DeletionRecord {
    std::string app_id;
    std::string element_key;
    int last_present_ordinal = 0;
    int deleted_in_ordinal = 0;
};

/// Keys present in `prev` but not in `next`.
std::set<std::string> diff_releases(const std::set<std::string>& prev,
                                    const std::set<std::string>& next);

/// DeletionRecords for every consecutive release pair. `keys_by_ordinal[i]`
/// is release i's element key set. An element that disappears, reappears and
/// disappears again counts once per disappearance.
std::vector<DeletionRecord> find_deletions(const std::string& app_id,
                                           const std::vector<std::set<std::string>>& keys_by_ordinal);

enum class ClusterTruth { deleted, not_deleted };

/// Labels a cluster at (element, ordinal o) `deleted` iff a DeletionRecord
/// with deleted_in == o + 1 exists for that element. Unknown element keys
/// label not_deleted with a warning.
ClusterTruth label_cluster(const std::vector<DeletionRecord>& deletions,
                           const std::string& app_id, const std::string& element_key,
                           int release_ordinal);

} // namespace radiation
