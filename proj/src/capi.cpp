#include "radiation.h"

#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "radiation/error.hpp"
#include "radiation/pipeline.hpp"

struct rad_pipeline {
    radiation::PipelineConfig config;
    std::string last_error;
    std::vector<std::string> warnings;
};

namespace {

rad_status guarded(rad_pipeline* pipeline, const char* context,
                   const std::function<void()>& body) {
    pipeline->last_error.clear();
    try {
        body();
        return RAD_OK;
    } catch (const radiation::IoError& e) {
        pipeline->last_error = std::string(context) + ": " + e.what();
        return RAD_IO_ERROR;
    } catch (const radiation::ValidationError& e) {
        pipeline->last_error = std::string(context) + ": " + e.what();
        return RAD_VALIDATION_ERROR;
    } catch (const std::exception& e) {
        pipeline->last_error = std::string(context) + ": " + e.what();
        return RAD_VALIDATION_ERROR;
    }
}

} // namespace

extern "C" {

const char* rad_version(void) { return "0.1.0"; }

const char* rad_subcommand_list(void) {
    static const std::string joined = [] {
        std::string s;
        for (const auto& name : radiation::subcommand_names()) {
            if (!s.empty()) s += ' ';
            s += name;
        }
        return s;
    }();
    return joined.c_str();
}

rad_pipeline* rad_pipeline_new(void) {
    try {
        return new rad_pipeline();
    } catch (...) {
        return nullptr;
    }
}

void rad_pipeline_free(rad_pipeline* pipeline) { delete pipeline; }

rad_status rad_pipeline_load_config(rad_pipeline* pipeline, const char* path) {
    if (!pipeline || !path) return RAD_INVALID_ARGUMENT;
    return guarded(pipeline, "load_config", [&] {
        pipeline->config = radiation::PipelineConfig::load_file(path);
    });
}

rad_status rad_pipeline_set(rad_pipeline* pipeline, const char* key, const char* value) {
    if (!pipeline || !key || !value) return RAD_INVALID_ARGUMENT;
    return guarded(pipeline, "set", [&] { pipeline->config.set(key, value); });
}

rad_status rad_pipeline_get(const rad_pipeline* pipeline, const char* key, char* buf,
                            size_t buflen) {
    if (!pipeline || !key || !buf || buflen == 0) return RAD_INVALID_ARGUMENT;
    auto* mutable_pipeline = const_cast<rad_pipeline*>(pipeline);
    return guarded(mutable_pipeline, "get", [&] {
        const std::string& value = pipeline->config.get(key);
        const size_t n = value.size() < buflen - 1 ? value.size() : buflen - 1;
        std::memcpy(buf, value.data(), n);
        buf[n] = '\0';
    });
}

rad_status rad_pipeline_run(rad_pipeline* pipeline, const char* subcommand) {
    if (!pipeline || !subcommand) return RAD_INVALID_ARGUMENT;
    pipeline->warnings.clear();
    return guarded(pipeline, subcommand, [&] {
        radiation::run_subcommand(subcommand, pipeline->config, &pipeline->warnings);
    });
}

const char* rad_pipeline_last_error(const rad_pipeline* pipeline) {
    return pipeline ? pipeline->last_error.c_str() : "null pipeline handle";
}

size_t rad_pipeline_warning_count(const rad_pipeline* pipeline) {
    return pipeline ? pipeline->warnings.size() : 0;
}

const char* rad_pipeline_warning(const rad_pipeline* pipeline, size_t index) {
    if (!pipeline || index >= pipeline->warnings.size()) return nullptr;
    return pipeline->warnings[index].c_str();
}

} // extern "C"
