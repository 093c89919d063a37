#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace radiation {

/// Flat key=value run configuration. Every key can come from the config
/// file or from a same-named CLI flag; flags win. Unknown keys are
/// rejected so typos surface immediately.
class PipelineConfig {
public:
    PipelineConfig(); // defaults

    static PipelineConfig load_file(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value);
    const std::string& get(const std::string& key) const;
    bool has(const std::string& key) const; // non-empty value

    std::string get_string(const std::string& key) const { return get(key); }
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;

    /// FNV-1a over the sorted key=value listing, 16 hex digits.
    std::string config_hash() const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// Names accepted by run_subcommand, in pipeline order.
const std::vector<std::string>& subcommand_names();

/// Runs one pipeline step (or `all`). Warnings are appended to `warnings`
/// when given. Contract violations throw ValidationError (exit 1), broken
/// I/O throws IoError (exit 2).
void run_subcommand(const std::string& name, const PipelineConfig& config,
                    std::vector<std::string>* warnings = nullptr);

} // namespace radiation
