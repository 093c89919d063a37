// Exercises the shared-library surface the CLI builds on.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "radiation.h"

#ifndef RADIATION_TEST_DATA_DIR
#define RADIATION_TEST_DATA_DIR "data"
#endif

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
    static std::mt19937_64 rng{std::random_device{}()};
    auto dir = std::filesystem::temp_directory_path() /
               ("radiation_capi_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(dir);
    return dir;
}

struct Handle {
    rad_pipeline* p;
    Handle() : p(rad_pipeline_new()) {}
    ~Handle() { rad_pipeline_free(p); }
};

} // namespace

TEST_CASE("version and subcommand listing") {
    CHECK(std::string(rad_version()) == "0.1.0");
    const std::string subs = rad_subcommand_list();
    for (const char* name : {"prep", "filter", "mine-ui", "link", "cluster", "features",
                             "diff", "recommend", "evaluate", "tlo", "report", "all"})
        CHECK(subs.find(name) != std::string::npos);
}

TEST_CASE("null-argument handling") {
    CHECK(rad_pipeline_set(nullptr, "seed", "1") == RAD_INVALID_ARGUMENT);
    Handle h;
    REQUIRE(h.p != nullptr);
    CHECK(rad_pipeline_set(h.p, nullptr, "1") == RAD_INVALID_ARGUMENT);
    CHECK(rad_pipeline_run(h.p, nullptr) == RAD_INVALID_ARGUMENT);
    CHECK(rad_pipeline_get(h.p, "seed", nullptr, 16) == RAD_INVALID_ARGUMENT);
    CHECK(std::string(rad_pipeline_last_error(nullptr)) == "null pipeline handle");
}

TEST_CASE("set, get and validation errors") {
    Handle h;
    CHECK(rad_pipeline_set(h.p, "seed", "1234") == RAD_OK);
    char buf[32];
    CHECK(rad_pipeline_get(h.p, "seed", buf, sizeof(buf)) == RAD_OK);
    CHECK(std::string(buf) == "1234");

    CHECK(rad_pipeline_set(h.p, "no_such_key", "x") == RAD_VALIDATION_ERROR);
    CHECK(std::string(rad_pipeline_last_error(h.p)).find("no_such_key") != std::string::npos);

    // Truncation keeps the NUL terminator.
    CHECK(rad_pipeline_set(h.p, "out", "abcdefgh") == RAD_OK);
    char tiny[4];
    CHECK(rad_pipeline_get(h.p, "out", tiny, sizeof(tiny)) == RAD_OK);
    CHECK(std::string(tiny) == "abc");
}

TEST_CASE("status codes distinguish io and validation failures") {
    Handle h;
    CHECK(rad_pipeline_load_config(h.p, "/nonexistent/run.conf") == RAD_IO_ERROR);
    CHECK(rad_pipeline_run(h.p, "frobnicate") == RAD_VALIDATION_ERROR);
    // Success clears the recorded error.
    CHECK(rad_pipeline_set(h.p, "seed", "1") == RAD_OK);
    CHECK(std::string(rad_pipeline_last_error(h.p)).empty());
}

TEST_CASE("a pipeline step runs end to end through the C surface") {
    Handle h;
    const auto dir = temp_dir("prep");
    {
        std::ofstream reviews(dir / "reviews.jsonl");
        reviews << "{\"id\":\"r1\",\"app\":\"x\",\"ts\":\"2016-01-01T00:00:00Z\","
                   "\"rating\":2,\"text\":\"Saved pages crash\"}\n";
        reviews << "not json\n";
    }
    const std::string data_dir = RADIATION_TEST_DATA_DIR;
    CHECK(rad_pipeline_set(h.p, "reviews", (dir / "reviews.jsonl").c_str()) == RAD_OK);
    CHECK(rad_pipeline_set(h.p, "data_dir", data_dir.c_str()) == RAD_OK);
    CHECK(rad_pipeline_set(h.p, "out", (dir / "out").c_str()) == RAD_OK);
    CHECK(rad_pipeline_run(h.p, "prep") == RAD_OK);
    CHECK(std::filesystem::exists(dir / "out" / "tokens.jsonl"));

    // The malformed line surfaced as a warning.
    CHECK(rad_pipeline_warning_count(h.p) >= 1);
    CHECK(rad_pipeline_warning(h.p, 0) != nullptr);
    CHECK(rad_pipeline_warning(h.p, 999) == nullptr);

    // Missing upstream artifact maps to a validation error.
    CHECK(rad_pipeline_set(h.p, "out", (dir / "out2").c_str()) == RAD_OK);
    CHECK(rad_pipeline_run(h.p, "link") == RAD_VALIDATION_ERROR);
    CHECK(std::string(rad_pipeline_last_error(h.p)).find("filter") != std::string::npos);

    // Unreadable input maps to an io error.
    CHECK(rad_pipeline_set(h.p, "reviews", "/nonexistent/reviews.jsonl") == RAD_OK);
    CHECK(rad_pipeline_run(h.p, "prep") == RAD_IO_ERROR);
}
