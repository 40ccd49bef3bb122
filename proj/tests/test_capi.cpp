#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>
#include <unistd.h>

#include <json.hpp>

#include "attrikit/c_api.h"

namespace {

struct Scratch {
    std::filesystem::path path;
    explicit Scratch(const char* tag) {
        path = std::filesystem::temp_directory_path() /
               (std::string(tag) + "-" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~Scratch() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string str() const { return path.string(); }
};

std::string take(char* s) {
    std::string out = s ? s : "";
    ak_string_free(s);
    return out;
}

} // namespace

TEST_SUITE("capi") {

TEST_CASE("version and status names are exposed") {
    CHECK(std::string(ak_version()) == "0.1.0");
    CHECK(std::string(ak_status_name(AK_OK)) == "ok");
    CHECK(std::string(ak_status_name(AK_ERR_UNKNOWN_COLUMN)) == "unknown column");
}

TEST_CASE("table loading, shape and summaries") {
    ak_table_t* table = nullptr;
    REQUIRE(ak_table_load_csv("data/ibm_hr_attrition.csv", &table) == AK_OK);
    size_t rows = 0, cols = 0;
    CHECK(ak_table_shape(table, &rows, &cols) == AK_OK);
    CHECK(rows == 1470);
    CHECK(cols == 35);

    char* name = nullptr;
    CHECK(ak_table_column_name(table, 0, &name) == AK_OK);
    CHECK(take(name) == "Age");

    int numeric = -1;
    CHECK(ak_table_column_is_numeric(table, "Age", &numeric) == AK_OK);
    CHECK(numeric == 1);
    CHECK(ak_table_column_is_numeric(table, "Attrition", &numeric) == AK_OK);
    CHECK(numeric == 0);

    double stats[8];
    CHECK(ak_table_summary(table, "Age", stats) == AK_OK);
    CHECK(stats[0] == 1470.0);
    CHECK(stats[1] == doctest::Approx(36.92).epsilon(0.001));
    CHECK(stats[3] == 18.0);
    CHECK(stats[7] == 60.0);

    char* dist_json = nullptr;
    CHECK(ak_table_class_distribution(table, "Attrition", &dist_json) == AK_OK);
    auto dist = nlohmann::json::parse(take(dist_json));
    REQUIRE(dist.size() == 2);
    CHECK(dist[0].at("label") == "No");
    CHECK(dist[0].at("count") == 1233);
    CHECK(dist[1].at("count") == 237);

    double lo[6], hi[6];
    size_t count[6];
    CHECK(ak_table_histogram(table, "Age", 6, lo, hi, count) == AK_OK);
    size_t total = 0;
    for (size_t c : count) total += c;
    CHECK(total == 1470);

    ak_table_free(table);
}

TEST_CASE("errors set a status and a readable message") {
    ak_table_t* table = nullptr;
    int rc = ak_table_load_csv("no/such/file.csv", &table);
    CHECK(rc == AK_ERR_IO);
    CHECK(std::string(ak_last_error()).find("no/such/file.csv") != std::string::npos);
    CHECK(table == nullptr);

    CHECK(ak_table_load_csv(nullptr, &table) == AK_ERR_INTERNAL);
    CHECK(ak_table_shape(nullptr, nullptr, nullptr) == AK_ERR_INTERNAL);
}

TEST_CASE("config construction, overrides and json view") {
    ak_config_t* config = nullptr;
    REQUIRE(ak_config_default(&config) == AK_OK);
    CHECK(ak_config_set_seed(config, 7) == AK_OK);
    CHECK(ak_config_set_output_dir(config, "/tmp/somewhere") == AK_OK);
    CHECK(ak_config_set_smote_k(config, 3) == AK_OK);
    CHECK(ak_config_set_llm_enabled(config, 1) == AK_OK);
    CHECK(ak_config_set_llm_url(config, "http://10.0.0.1:99") == AK_OK);
    CHECK(ak_config_set_llm_fast_poll(config, 1) == AK_OK);

    char* json_text = nullptr;
    REQUIRE(ak_config_to_json(config, &json_text) == AK_OK);
    auto j = nlohmann::json::parse(take(json_text));
    CHECK(j.at("seed") == 7);
    CHECK(j.at("output_dir") == "/tmp/somewhere");
    CHECK(j.at("smote").at("k_neighbors") == 3);
    CHECK(j.at("llm").at("enabled") == true);
    CHECK(j.at("llm").at("base_url") == "http://10.0.0.1:99");
    CHECK(j.at("llm").at("fast_poll") == true);
    ak_config_free(config);
}

TEST_CASE("config files load through the same parser") {
    Scratch dir("capi-config");
    std::string path = dir.str() + "/config.json";
    {
        FILE* f = fopen(path.c_str(), "w");
        REQUIRE(f != nullptr);
        fputs("{\"seed\": 9, \"learners\": [{\"name\": \"decision_tree\"}]}", f);
        fclose(f);
    }
    ak_config_t* config = nullptr;
    REQUIRE(ak_config_load(path.c_str(), &config) == AK_OK);
    char* json_text = nullptr;
    REQUIRE(ak_config_to_json(config, &json_text) == AK_OK);
    auto j = nlohmann::json::parse(take(json_text));
    CHECK(j.at("seed") == 9);
    CHECK(j.at("learners").size() == 1);
    ak_config_free(config);

    ak_config_t* bad = nullptr;
    CHECK(ak_config_load("missing.json", &bad) == AK_ERR_IO);
    std::string bad_path = dir.str() + "/bad.json";
    {
        FILE* f = fopen(bad_path.c_str(), "w");
        fputs("{\"seeed\": 1}", f);
        fclose(f);
    }
    CHECK(ak_config_load(bad_path.c_str(), &bad) == AK_ERR_CONFIG_UNKNOWN_KEY);
    CHECK(std::string(ak_last_error()).find("seed") != std::string::npos);
}

TEST_CASE("prepare runs through the c surface") {
    Scratch dir("capi-prep");
    ak_config_t* config = nullptr;
    REQUIRE(ak_config_default(&config) == AK_OK);
    REQUIRE(ak_config_set_output_dir(config, dir.str().c_str()) == AK_OK);
    CHECK(ak_run_prepare(config) == AK_OK);
    CHECK(std::filesystem::exists(dir.path / "prepared" / "counts.json"));
    CHECK(std::filesystem::exists(dir.path / "prepared" / "X_train_balanced.csv"));
    ak_config_free(config);
}

TEST_CASE("mock service lifecycle") {
    ak_mock_t* mock = nullptr;
    REQUIRE(ak_mock_start(0, 2, 0, nullptr, &mock) == AK_OK);
    char* url = nullptr;
    REQUIRE(ak_mock_url(mock, &url) == AK_OK);
    std::string u = take(url);
    CHECK(u.rfind("http://127.0.0.1:", 0) == 0);
    ak_mock_free(mock);
    ak_mock_free(nullptr); // tolerated, like free()
}

} // TEST_SUITE
