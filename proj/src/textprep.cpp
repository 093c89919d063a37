#include "radiation/textprep.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <fstream>

#include "radiation/error.hpp"

namespace radiation {

namespace {

// Word-level contraction map, applied before the generic suffix forms.
const std::unordered_map<std::string, std::string>& contraction_words() {
    static const std::unordered_map<std::string, std::string> m = {
        {"can't", "can not"},   {"cannot", "can not"}, {"won't", "will not"},
        {"shan't", "shall not"}, {"ain't", "is not"},  {"let's", "let us"},
    };
    return m;
}

struct SuffixExpansion {
    const char* suffix;
    const char* replacement;
};

// Applied to words that still end with an apostrophe form: n't -> " not",
// 're -> " are", 've -> " have", 'll -> " will", 'm -> " am", 's dropped,
// trailing ' dropped (plural possessive).
constexpr std::array<SuffixExpansion, 7> kSuffixExpansions = {{
    {"n't", " not"},
    {"'re", " are"},
    {"'ve", " have"},
    {"'ll", " will"},
    {"'m", " am"},
    {"'s", ""},
    {"'", ""},
}};

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string expand_contractions(const std::string& text) {
    std::string out;
    out.reserve(text.size() + 16);
    std::string word;
    auto flush = [&]() {
        if (word.empty()) return;
        auto it = contraction_words().find(word);
        if (it != contraction_words().end()) {
            out += it->second;
        } else {
            std::string expanded = word;
            for (const auto& rule : kSuffixExpansions) {
                if (ends_with(expanded, rule.suffix)) {
                    expanded = expanded.substr(0, expanded.size() - std::strlen(rule.suffix));
                    expanded += rule.replacement;
                    break;
                }
            }
            out += expanded;
        }
        word.clear();
    };
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            flush();
            out += ' ';
        } else {
            word += c;
        }
    }
    flush();
    return out;
}

// UTF-8 right single quotation mark, the apostrophe app stores emit.
void normalize_apostrophes(std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
            static_cast<unsigned char>(s[i + 1]) == 0x80 &&
            static_cast<unsigned char>(s[i + 2]) == 0x99) {
            out += '\'';
            i += 3;
        } else {
            out += s[i];
            ++i;
        }
    }
    s = std::move(out);
}

std::string ascii_lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_alnum_ascii(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

std::vector<std::string> tokenize_clean(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
        if (is_alnum_ascii(c)) {
            cur += c;
        } else if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

struct LemmaRule {
    const char* suffix;
    // Candidate replacements in preference order; a candidate present in the
    // dictionary wins, otherwise the first one applies.
    std::array<const char*, 2> replacements;
    std::size_t n_replacements;
};

constexpr std::array<LemmaRule, 5> kLemmaRules = {{
    {"ies", {"y", nullptr}, 1},
    {"es", {"e", ""}, 2},
    {"s", {"", nullptr}, 1},
    {"ing", {"", "e"}, 2},
    {"ed", {"", "e"}, 2},
}};

} // namespace

LemmaTable LemmaTable::load(const std::filesystem::path& tsv_path) {
    std::ifstream in(tsv_path, std::ios::binary);
    if (!in) throw IoError("cannot open lemma table '" + tsv_path.string() + "'");
    LemmaTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        std::string surface = line.substr(0, tab);
        std::string lemma = line.substr(tab + 1);
        if (!lemma.empty() && lemma.back() == '\r') lemma.pop_back();
        if (surface.empty() || lemma.empty()) continue;
        table.map_[surface] = lemma;
    }
    // Close the table over its own values so lemma(lemma(w)) == lemma(w).
    std::vector<std::string> values;
    values.reserve(table.map_.size());
    for (const auto& [k, v] : table.map_) values.push_back(v);
    for (const auto& v : values) table.map_.emplace(v, v);
    return table;
}

LemmaTable LemmaTable::from_entries(
    const std::vector<std::pair<std::string, std::string>>& entries) {
    LemmaTable table;
    for (const auto& [surface, lemma] : entries) table.map_[surface] = lemma;
    for (const auto& [surface, lemma] : entries) table.map_.emplace(lemma, lemma);
    return table;
}

bool LemmaTable::is_known_lemma(const std::string& w) const {
    auto it = map_.find(w);
    return it != map_.end() && it->second == w;
}

std::string LemmaTable::apply_rules(const std::string& w) const {
    for (const auto& rule : kLemmaRules) {
        const std::string suffix = rule.suffix;
        if (w.size() <= suffix.size() + 1) continue; // keep at least 2 stem chars
        if (!ends_with(w, suffix)) continue;
        if (suffix == "s" && ends_with(w, "ss")) continue;
        const std::string stem = w.substr(0, w.size() - suffix.size());
        std::string fallback;
        for (std::size_t i = 0; i < rule.n_replacements; ++i) {
            std::string candidate = stem + rule.replacements[i];
            if (candidate.size() < 2 || candidate == w) continue;
            if (is_known_lemma(candidate)) return candidate;
            if (fallback.empty()) fallback = candidate;
        }
        if (!fallback.empty()) return fallback;
    }
    return w;
}

std::string LemmaTable::lemma(const std::string& word) const {
    std::string cur = word;
    // Each rule strictly shortens the word, so this terminates quickly;
    // the bound is a safety net.
    for (int step = 0; step < 8; ++step) {
        auto it = map_.find(cur);
        if (it != map_.end()) return it->second;
        std::string next = apply_rules(cur);
        if (next == cur) return cur;
        cur = std::move(next);
    }
    return cur;
}

StopList StopList::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open stop list '" + path.string() + "'");
    StopList list;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (line[0] == '+') {
            list.keep_.insert(line.substr(1));
        } else {
            list.stop_.insert(line);
        }
    }
    return list;
}

StopList StopList::from_words(const std::vector<std::string>& stop,
                              const std::vector<std::string>& keep) {
    StopList list;
    list.stop_.insert(stop.begin(), stop.end());
    list.keep_.insert(keep.begin(), keep.end());
    return list;
}

std::vector<std::string> preprocess(const std::string& text, const LemmaTable& lemmas,
                                    const StopList& stops) {
    std::string s = ascii_lower(text);
    normalize_apostrophes(s);
    s = expand_contractions(s);
    std::vector<std::string> raw = tokenize_clean(s);
    std::vector<std::string> out;
    out.reserve(raw.size());
    for (const auto& tok : raw) {
        if (stops.is_stop(tok)) continue;
        std::string lemma = lemmas.lemma(tok);
        if (lemma.empty() || stops.is_stop(lemma)) continue;
        out.push_back(std::move(lemma));
    }
    return out;
}

std::vector<std::string> split_identifier(const std::string& name) {
    std::vector<std::string> parts;
    std::string cur;
    auto flush = [&]() {
        if (!cur.empty()) {
            parts.push_back(ascii_lower(cur));
            cur.clear();
        }
    };
    for (std::size_t i = 0; i < name.size(); ++i) {
        const char c = name[i];
        const bool upper = c >= 'A' && c <= 'Z';
        const bool lower = c >= 'a' && c <= 'z';
        const bool digit = c >= '0' && c <= '9';
        if (!upper && !lower && !digit) {
            flush();
            continue;
        }
        if (!cur.empty()) {
            const char prev = cur.back();
            const bool prev_digit = prev >= '0' && prev <= '9';
            const bool prev_lower = prev >= 'a' && prev <= 'z';
            const bool prev_upper = prev >= 'A' && prev <= 'Z';
            const bool next_lower =
                i + 1 < name.size() && name[i + 1] >= 'a' && name[i + 1] <= 'z';
            // Boundaries: aB, 2B, a2, 2a, and the end of an acronym run (ABc).
            if ((upper && (prev_lower || prev_digit)) || (digit && !prev_digit) ||
                (!digit && !upper && prev_digit) || (upper && prev_upper && next_lower)) {
                flush();
            }
        }
        cur += c;
    }
    flush();
    return parts;
}

} // namespace radiation
