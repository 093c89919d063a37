#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace radiation {

/// Seconds since the Unix epoch, UTC.
using Instant = std::int64_t;

/// Parses "YYYY-MM-DDTHH:MM:SSZ" (optional fractional seconds, truncated).
/// Returns nullopt on malformed input.
std::optional<Instant> parse_instant(const std::string& iso8601);
std::string format_instant(Instant t);

struct Review {
    std::string id;
    std::string app_id;
    Instant timestamp = 0;
    int rating = 0; // 1..5
    std::string text;
};

struct Release {
    std::string app_id;
    std::string version;
    Instant date = 0;
    int ordinal = 0; // consecutive from 0, ordered by date
    std::filesystem::path resource_root;
};

/// One app's reviews, releases and the review -> release-window map.
struct AppDataset {
    std::string app_id;
    std::vector<Release> releases; // ordered by ordinal
    std::vector<Review> reviews;
    std::map<std::string, int> window_of; // review id -> release ordinal
};

struct LoadStats {
    std::size_t loaded = 0;
    std::size_t skipped = 0;
};

/// Reads reviews.jsonl: {"id","app","ts","rating","text"}. Malformed lines
/// and out-of-range ratings are skipped with a warning; an unreadable file
/// is fatal. Extra fields (locale, title) are ignored.
std::vector<Review> load_reviews(const std::filesystem::path& path, LoadStats* stats = nullptr,
                                 std::vector<std::string>* warnings = nullptr);

/// Reads releases.jsonl: {"app","version","date","resources"}. Ordinals are
/// assigned per app by ascending date.
std::vector<Release> load_releases(const std::filesystem::path& path,
                                   std::vector<std::string>* warnings = nullptr);

/// Groups reviews and releases per app. Apps present only in one of the two
/// inputs are kept (with empty counterpart).
std::vector<AppDataset> group_by_app(std::vector<Review> reviews, std::vector<Release> releases);

/// Assigns each review to its release window: timestamp t maps to release i
/// iff date(V_i) <= t < date(V_{i+1}); t before the first release stays
/// unassigned; t at or past the last release date maps to the last release.
/// Two releases sharing a date make the ordering undefined and are fatal.
void assign_windows(AppDataset& dataset);

/// Downsamples the majority label to the minority size; used to balance a
/// labeled set before classifier training. `labels` maps id -> label.
std::vector<std::string> downsample_balanced(const std::map<std::string, std::string>& labels,
                                             std::uint64_t seed);

} // namespace radiation
