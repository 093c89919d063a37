#include "radiation/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <unordered_set>

#include "radiation/error.hpp"
#include "radiation/jsonl.hpp"
#include "radiation/rng.hpp"

namespace radiation {

namespace {

// Days since epoch for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

bool parse_int(const std::string& s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < len; ++i) {
        const char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

void warn(std::vector<std::string>* warnings, const std::string& msg) {
    if (warnings) warnings->push_back(msg);
}

} // namespace

std::optional<Instant> parse_instant(const std::string& s) {
    // YYYY-MM-DDTHH:MM:SS[.fff]Z
    int y, mo, d, h, mi, se;
    if (!parse_int(s, 0, 4, y) || !parse_int(s, 5, 2, mo) || !parse_int(s, 8, 2, d) ||
        !parse_int(s, 11, 2, h) || !parse_int(s, 14, 2, mi) || !parse_int(s, 17, 2, se))
        return std::nullopt;
    if (s.size() < 20 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
        s[13] != ':' || s[16] != ':')
        return std::nullopt;
    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    }
    if (pos >= s.size() || s[pos] != 'Z' || pos + 1 != s.size()) return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60) return std::nullopt;
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + se;
}

std::string format_instant(Instant t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                  static_cast<int>(rem / 3600), static_cast<int>((rem / 60) % 60),
                  static_cast<int>(rem % 60));
    return buf;
}

std::vector<Review> load_reviews(const std::filesystem::path& path, LoadStats* stats,
                                 std::vector<std::string>* warnings) {
    std::vector<Review> reviews;
    std::unordered_set<std::string> seen_ids;
    std::size_t line_no = 0;
    std::size_t skipped = 0;
    auto skip = [&](const std::string& why) {
        ++skipped;
        warn(warnings, path.string() + ":" + std::to_string(line_no) + ": skipped review: " + why);
    };
    const std::size_t malformed = read_jsonl(
        path,
        [&](const Json& j) {
            ++line_no;
            if (!j.contains("id") || !j.contains("app") || !j.contains("ts") ||
                !j.contains("rating") || !j.contains("text") || !j["id"].is_string() ||
                !j["app"].is_string() || !j["ts"].is_string() ||
                !j["rating"].is_number_integer() || !j["text"].is_string()) {
                skip("missing or mistyped field");
                return;
            }
            Review r;
            r.id = j["id"].get<std::string>();
            r.app_id = j["app"].get<std::string>();
            r.rating = j["rating"].get<int>();
            r.text = j["text"].get<std::string>();
            auto ts = parse_instant(j["ts"].get<std::string>());
            if (!ts) {
                skip("bad timestamp '" + j["ts"].get<std::string>() + "'");
                return;
            }
            r.timestamp = *ts;
            if (r.rating < 1 || r.rating > 5) {
                skip("rating " + std::to_string(r.rating) + " out of 1..5");
                return;
            }
            std::string trimmed = r.text;
            trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
            if (trimmed.empty()) {
                skip("empty text");
                return;
            }
            if (!seen_ids.insert(r.app_id + "\x1f" + r.id).second) {
                skip("duplicate id '" + r.id + "'");
                return;
            }
            reviews.push_back(std::move(r));
        },
        /*lenient=*/true);
    if (malformed > 0)
        warn(warnings, path.string() + ": skipped " + std::to_string(malformed) +
                           " unparseable line(s)");
    if (stats) {
        stats->loaded = reviews.size();
        stats->skipped = skipped + malformed;
    }
    return reviews;
}

std::vector<Release> load_releases(const std::filesystem::path& path,
                                   std::vector<std::string>* warnings) {
    std::vector<Release> releases;
    read_jsonl(path, [&](const Json& j) {
        if (!j.contains("app") || !j.contains("version") || !j.contains("date")) {
            warn(warnings, path.string() + ": skipped release record with missing fields");
            return;
        }
        Release r;
        r.app_id = j["app"].get<std::string>();
        r.version = j["version"].get<std::string>();
        auto date = parse_instant(j["date"].get<std::string>());
        if (!date) {
            warn(warnings, path.string() + ": skipped release with bad date");
            return;
        }
        r.date = *date;
        if (j.contains("resources")) {
            std::filesystem::path resources = j["resources"].get<std::string>();
            // Relative resource roots are resolved against the releases file.
            if (resources.is_relative()) resources = path.parent_path() / resources;
            r.resource_root = std::move(resources);
        }
        releases.push_back(std::move(r));
    });
    // Ordinals per app by ascending date.
    std::stable_sort(releases.begin(), releases.end(), [](const Release& a, const Release& b) {
        if (a.app_id != b.app_id) return a.app_id < b.app_id;
        return a.date < b.date;
    });
    std::string cur_app;
    int ordinal = 0;
    for (auto& r : releases) {
        if (r.app_id != cur_app) {
            cur_app = r.app_id;
            ordinal = 0;
        }
        r.ordinal = ordinal++;
    }
    return releases;
}

std::vector<AppDataset> group_by_app(std::vector<Review> reviews, std::vector<Release> releases) {
    std::map<std::string, AppDataset> by_app;
    for (auto& rel : releases) by_app[rel.app_id].releases.push_back(std::move(rel));
    for (auto& rev : reviews) by_app[rev.app_id].reviews.push_back(std::move(rev));
    std::vector<AppDataset> out;
    out.reserve(by_app.size());
    for (auto& [app, ds] : by_app) {
        ds.app_id = app;
        std::sort(ds.releases.begin(), ds.releases.end(),
                  [](const Release& a, const Release& b) { return a.ordinal < b.ordinal; });
        out.push_back(std::move(ds));
    }
    return out;
}

void assign_windows(AppDataset& dataset) {
    dataset.window_of.clear();
    if (dataset.releases.empty()) return;
    for (std::size_t i = 1; i < dataset.releases.size(); ++i) {
        if (dataset.releases[i].date == dataset.releases[i - 1].date) {
            throw ValidationError("app '" + dataset.app_id + "': releases '" +
                                  dataset.releases[i - 1].version + "' and '" +
                                  dataset.releases[i].version +
                                  "' share a date; window order undefined");
        }
    }
    for (const auto& rev : dataset.reviews) {
        const Instant t = rev.timestamp;
        if (t < dataset.releases.front().date) continue; // before V0: unassigned
        int win = static_cast<int>(dataset.releases.size()) - 1;
        for (std::size_t i = 1; i < dataset.releases.size(); ++i) {
            if (t < dataset.releases[i].date) {
                win = static_cast<int>(i) - 1;
                break;
            }
        }
        dataset.window_of[rev.id] = win;
    }
}

std::vector<std::string> downsample_balanced(const std::map<std::string, std::string>& labels,
                                             std::uint64_t seed) {
    std::map<std::string, std::vector<std::string>> by_label;
    for (const auto& [id, label] : labels) by_label[label].push_back(id);
    if (by_label.empty()) return {};
    std::size_t min_size = SIZE_MAX;
    for (const auto& [label, ids] : by_label) min_size = std::min(min_size, ids.size());
    Rng rng(seed);
    std::vector<std::string> kept;
    for (auto& [label, ids] : by_label) {
        rng.shuffle(ids);
        ids.resize(min_size);
        std::sort(ids.begin(), ids.end());
        kept.insert(kept.end(), ids.begin(), ids.end());
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

} // namespace radiation
