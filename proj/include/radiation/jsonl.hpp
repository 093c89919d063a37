#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "radiation/error.hpp"

namespace radiation {

using Json = nlohmann::ordered_json;

/// Rounds to `digits` decimal places so serialized artifacts are stable
/// across runs and re-serialization round-trips byte-identically.
inline double round_digits(double x, int digits) {
    double scale = 1.0;
    for (int i = 0; i < digits; ++i) scale *= 10.0;
    return std::round(x * scale) / scale;
}

/// Header record written as the first line of every artifact. `timestamp`
/// is empty when suppressed (--no-header-timestamp).
struct ArtifactHeader {
    std::string tool_version;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string timestamp;

    Json to_json() const {
        Json j;
        j["tool_version"] = tool_version;
        j["seed"] = seed;
        j["config_hash"] = config_hash;
        if (!timestamp.empty()) j["generated_at"] = timestamp;
        return j;
    }

    static bool is_header(const Json& j) {
        return j.is_object() && j.contains("tool_version") && j.contains("config_hash");
    }
};

/// Line-delimited JSON writer. One record per line, header first.
class JsonlWriter {
public:
    JsonlWriter(const std::filesystem::path& path, const ArtifactHeader& header)
        : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
        write(header.to_json());
    }

    void write(const Json& record) {
        out_ << record.dump() << '\n';
        if (!out_) throw IoError("write failed");
    }

private:
    std::ofstream out_;
};

/// Reads a JSONL artifact, skipping the header line. `on_record` receives
/// each parsed object; malformed lines raise unless `lenient` is set, in
/// which case they are counted and skipped.
inline std::size_t read_jsonl(const std::filesystem::path& path,
                              const std::function<void(const Json&)>& on_record,
                              bool lenient = false) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::string line;
    std::size_t skipped = 0;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            if (lenient) {
                ++skipped;
                first = false;
                continue;
            }
            throw ValidationError("malformed JSON line in '" + path.string() + "'");
        }
        if (first && ArtifactHeader::is_header(j)) {
            first = false;
            continue;
        }
        first = false;
        on_record(j);
    }
    return skipped;
}

/// Writes a single JSON document with the artifact header under "meta".
inline void write_json_doc(const std::filesystem::path& path, const ArtifactHeader& header,
                           Json body) {
    Json doc;
    doc["meta"] = header.to_json();
    for (auto& [k, v] : body.items()) doc[k] = v;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failed");
}

inline Json read_json_doc(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ValidationError("malformed JSON document '" + path.string() + "'");
    return j;
}

} // namespace radiation
