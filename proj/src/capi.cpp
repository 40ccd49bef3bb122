#include "attrikit/c_api.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "experiment.hpp"
#include "llm/mock_service.hpp"
#include "table.hpp"
#include "util.hpp"

using namespace attrikit;

struct ak_table {
    Table table;
};
struct ak_config {
    ExperimentConfig config;
};
struct ak_mock {
    MockService service;
};

namespace {

thread_local std::string g_last_error;

int set_error(Errc code, const std::string& message) {
    g_last_error = message;
    return static_cast<int>(code);
}

// Runs the body, translating exceptions into status codes.
template <typename F>
int guarded(F&& f) {
    try {
        f();
        return AK_OK;
    } catch (const Error& e) {
        return set_error(e.code(), e.what());
    } catch (const std::exception& e) {
        return set_error(Errc::Internal, e.what());
    } catch (...) {
        return set_error(Errc::Internal, "unknown failure");
    }
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

int require(bool ok, const char* what) {
    if (ok) return AK_OK;
    return set_error(Errc::Internal, std::string("null argument: ") + what);
}

} // namespace

extern "C" {

const char* ak_version(void) { return kToolkitVersion; }

const char* ak_status_name(int status) {
    return errc_name(static_cast<Errc>(status));
}

const char* ak_last_error(void) { return g_last_error.c_str(); }

void ak_string_free(char* s) { delete[] s; }

/* ---- tables ---- */

int ak_table_load_csv(const char* path, ak_table_t** out) {
    if (int rc = require(path && out, "ak_table_load_csv")) return rc;
    return guarded([&] {
        auto handle = std::make_unique<ak_table>();
        handle->table = Table::load_csv(path);
        *out = handle.release();
    });
}

void ak_table_free(ak_table_t* table) { delete table; }

int ak_table_shape(const ak_table_t* table, size_t* rows, size_t* cols) {
    if (int rc = require(table && rows && cols, "ak_table_shape")) return rc;
    *rows = table->table.n_rows();
    *cols = table->table.n_cols();
    return AK_OK;
}

int ak_table_column_name(const ak_table_t* table, size_t index, char** out) {
    if (int rc = require(table && out, "ak_table_column_name")) return rc;
    return guarded([&] {
        if (index >= table->table.n_cols())
            raise(Errc::UnknownColumn, "column index " + std::to_string(index) + " out of range");
        *out = copy_string(table->table.column(index).schema.name);
    });
}

int ak_table_column_is_numeric(const ak_table_t* table, const char* column, int* out) {
    if (int rc = require(table && column && out, "ak_table_column_is_numeric")) return rc;
    return guarded([&] { *out = table->table.is_numeric(column) ? 1 : 0; });
}

int ak_table_summary(const ak_table_t* table, const char* column, double stats[8]) {
    if (int rc = require(table && column && stats, "ak_table_summary")) return rc;
    return guarded([&] {
        SummaryStats s = table->table.summarize(column);
        stats[0] = static_cast<double>(s.count);
        stats[1] = s.mean;
        stats[2] = s.std_dev;
        stats[3] = s.min;
        stats[4] = s.q25;
        stats[5] = s.q50;
        stats[6] = s.q75;
        stats[7] = s.max;
    });
}

int ak_table_class_distribution(const ak_table_t* table, const char* column, char** out_json) {
    if (int rc = require(table && column && out_json, "ak_table_class_distribution")) return rc;
    return guarded([&] {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : table->table.class_distribution(column))
            arr.push_back({{"label", c.label}, {"count", c.count}, {"fraction", c.fraction}});
        *out_json = copy_string(arr.dump(2));
    });
}

int ak_table_histogram(const ak_table_t* table, const char* column, size_t bins, double* lo,
                       double* hi, size_t* count) {
    if (int rc = require(table && column && lo && hi && count, "ak_table_histogram")) return rc;
    return guarded([&] {
        auto histogram = table->table.histogram(column, bins);
        if (histogram.size() > bins) raise(Errc::Internal, "histogram bin overflow");
        for (size_t i = 0; i < histogram.size(); ++i) {
            lo[i] = histogram[i].lo;
            hi[i] = histogram[i].hi;
            count[i] = histogram[i].count;
        }
        for (size_t i = histogram.size(); i < bins; ++i) {
            lo[i] = 0;
            hi[i] = 0;
            count[i] = 0;
        }
    });
}

/* ---- config ---- */

int ak_config_default(ak_config_t** out) {
    if (int rc = require(out != nullptr, "ak_config_default")) return rc;
    return guarded([&] {
        auto handle = std::make_unique<ak_config>();
        handle->config = ExperimentConfig::defaults();
        *out = handle.release();
    });
}

int ak_config_load(const char* path, ak_config_t** out) {
    if (int rc = require(path && out, "ak_config_load")) return rc;
    return guarded([&] {
        auto handle = std::make_unique<ak_config>();
        handle->config = ExperimentConfig::load(path);
        *out = handle.release();
    });
}

void ak_config_free(ak_config_t* config) { delete config; }

int ak_config_set_seed(ak_config_t* config, uint64_t seed) {
    if (int rc = require(config != nullptr, "ak_config_set_seed")) return rc;
    config->config.seed = seed;
    return AK_OK;
}

int ak_config_set_dataset(ak_config_t* config, const char* path) {
    if (int rc = require(config && path, "ak_config_set_dataset")) return rc;
    config->config.dataset = path;
    return AK_OK;
}

int ak_config_set_output_dir(ak_config_t* config, const char* dir) {
    if (int rc = require(config && dir, "ak_config_set_output_dir")) return rc;
    config->config.output_dir = dir;
    return AK_OK;
}

int ak_config_set_smote_k(ak_config_t* config, size_t k_neighbors) {
    if (int rc = require(config != nullptr, "ak_config_set_smote_k")) return rc;
    return guarded([&] {
        if (k_neighbors < 1) raise(Errc::ConfigMissingRequired, "k_neighbors must be >= 1");
        config->config.smote.k_neighbors = k_neighbors;
    });
}

int ak_config_set_llm_enabled(ak_config_t* config, int enabled) {
    if (int rc = require(config != nullptr, "ak_config_set_llm_enabled")) return rc;
    config->config.llm.enabled = enabled != 0;
    return AK_OK;
}

int ak_config_set_llm_url(ak_config_t* config, const char* base_url) {
    if (int rc = require(config && base_url, "ak_config_set_llm_url")) return rc;
    config->config.llm.base_url = base_url;
    return AK_OK;
}

int ak_config_set_llm_fast_poll(ak_config_t* config, int fast) {
    if (int rc = require(config != nullptr, "ak_config_set_llm_fast_poll")) return rc;
    config->config.llm.fast_poll = fast != 0;
    return AK_OK;
}

int ak_config_to_json(const ak_config_t* config, char** out_json) {
    if (int rc = require(config && out_json, "ak_config_to_json")) return rc;
    return guarded([&] { *out_json = copy_string(config->config.to_json()); });
}

/* ---- stages ---- */

int ak_run_prepare(const ak_config_t* config) {
    if (int rc = require(config != nullptr, "ak_run_prepare")) return rc;
    return guarded([&] { run_prepare(config->config); });
}

int ak_run_train(const ak_config_t* config) {
    if (int rc = require(config != nullptr, "ak_run_train")) return rc;
    return guarded([&] { run_train(config->config); });
}

int ak_run_evaluate(const ak_config_t* config) {
    if (int rc = require(config != nullptr, "ak_run_evaluate")) return rc;
    return guarded([&] { run_evaluate(config->config); });
}

int ak_run_report(const ak_config_t* config) {
    if (int rc = require(config != nullptr, "ak_run_report")) return rc;
    return guarded([&] { run_report(config->config); });
}

int ak_run_experiment(const ak_config_t* config, char** out_manifest_json) {
    if (int rc = require(config != nullptr, "ak_run_experiment")) return rc;
    return guarded([&] {
        RunSummary summary = run_experiment(config->config);
        if (out_manifest_json) *out_manifest_json = copy_string(summary.manifest_json);
    });
}

int ak_run_llm_prepare(const ak_config_t* config) {
    if (int rc = require(config != nullptr, "ak_run_llm_prepare")) return rc;
    return guarded([&] { run_llm_prepare(config->config); });
}

int ak_run_llm_finetune(const ak_config_t* config, char** out_job_json) {
    if (int rc = require(config != nullptr, "ak_run_llm_finetune")) return rc;
    return guarded([&] {
        FineTuneJob job = run_llm_finetune(config->config);
        if (out_job_json) {
            nlohmann::json j{{"job_id", job.job_id},
                             {"status", job_status_name(job.status)},
                             {"fine_tuned_model", job.fine_tuned_model}};
            *out_job_json = copy_string(j.dump(2));
        }
    });
}

int ak_run_llm_predict(const ak_config_t* config, const char* model) {
    if (int rc = require(config != nullptr, "ak_run_llm_predict")) return rc;
    return guarded([&] { run_llm_predict(config->config, model ? model : ""); });
}

/* ---- mock service ---- */

int ak_mock_start(int port, int polls_until_success, int fail_jobs, const char* expected_key,
                  ak_mock_t** out) {
    if (int rc = require(out != nullptr, "ak_mock_start")) return rc;
    return guarded([&] {
        auto handle = std::make_unique<ak_mock>();
        MockServiceOptions options;
        options.polls_until_success = polls_until_success;
        options.fail_jobs = fail_jobs != 0;
        if (expected_key) options.expected_key = expected_key;
        handle->service.start(port, options);
        *out = handle.release();
    });
}

int ak_mock_url(const ak_mock_t* mock, char** out) {
    if (int rc = require(mock && out, "ak_mock_url")) return rc;
    return guarded([&] { *out = copy_string(mock->service.url()); });
}

void ak_mock_free(ak_mock_t* mock) { delete mock; }

} // extern "C"
