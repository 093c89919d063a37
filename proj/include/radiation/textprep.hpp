#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace radiation {

/// Ordered lemma tokens of one review, lowercase ASCII letters/digits only.
struct TokenList {
    std::string review_id;
    std::vector<std::string> tokens;
};

/// Surface-form -> lemma dictionary with suffix-rule fallback. Lookup is
/// total: unknown words fall through the rules and, failing those, map to
/// themselves. Every dictionary value maps to itself, so lemmatization is
/// idempotent.
class LemmaTable {
public:
    static LemmaTable load(const std::filesystem::path& tsv_path);
    static LemmaTable from_entries(const std::vector<std::pair<std::string, std::string>>& entries);

    std::string lemma(const std::string& word) const;
    std::size_t size() const { return map_.size(); }

private:
    bool is_known_lemma(const std::string& w) const;
    std::string apply_rules(const std::string& w) const;

    std::unordered_map<std::string, std::string> map_;
};

/// Stop list with keep-overrides. File format: one word per line; lines
/// starting with '+' name words that must never be treated as stop words
/// (negations and modals).
class StopList {
public:
    static StopList load(const std::filesystem::path& path);
    static StopList from_words(const std::vector<std::string>& stop,
                               const std::vector<std::string>& keep);

    bool is_stop(const std::string& word) const {
        return stop_.count(word) != 0 && keep_.count(word) == 0;
    }

private:
    std::unordered_set<std::string> stop_;
    std::unordered_set<std::string> keep_;
};

/// Fixed normalization pipeline: lowercase, expand contractions, strip
/// everything but ASCII letters/digits, tokenize on whitespace, drop stop
/// words, lemmatize. Lemmas that land back on a stop word are dropped too,
/// so no output token is ever in the effective stop list.
std::vector<std::string> preprocess(const std::string& text, const LemmaTable& lemmas,
                                    const StopList& stops);

/// Splits identifier-style names (camelCase, under_scores, digit runs) into
/// lowercase parts, e.g. "closeAllTabs2" -> ["close","all","tabs","2"].
std::vector<std::string> split_identifier(const std::string& name);

} // namespace radiation
