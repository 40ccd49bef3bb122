#ifndef ATTRIKIT_C_API_H
#define ATTRIKIT_C_API_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible call. 0 is success; anything else
 * maps to one error condition, and ak_last_error() carries the detail for
 * the calling thread. */
enum ak_status {
    AK_OK = 0,
    AK_ERR_IO,
    AK_ERR_EMPTY_FILE,
    AK_ERR_DUPLICATE_COLUMN,
    AK_ERR_MISSING_VALUE,
    AK_ERR_UNKNOWN_COLUMN,
    AK_ERR_NON_NUMERIC_COLUMN,
    AK_ERR_DEGENERATE_COLUMN,
    AK_ERR_NEGATIVE_VALUE,
    AK_ERR_UNSEEN_CATEGORY,
    AK_ERR_CLASS_TOO_SMALL,
    AK_ERR_ZERO_VARIANCE,
    AK_ERR_SINGLE_CLASS,
    AK_ERR_TOO_FEW_MINORITY,
    AK_ERR_DIMENSION_MISMATCH,
    AK_ERR_K_TOO_LARGE,
    AK_ERR_LENGTH_MISMATCH,
    AK_ERR_NON_BINARY_LABEL,
    AK_ERR_EMPTY_REPORT,
    AK_ERR_VERSION_MISMATCH,
    AK_ERR_CORRUPT_PAYLOAD,
    AK_ERR_AUTH,
    AK_ERR_SERVICE,
    AK_ERR_RATE_LIMITED,
    AK_ERR_TIMEOUT,
    AK_ERR_PORT_IN_USE,
    AK_ERR_CONFIG_PARSE,
    AK_ERR_CONFIG_UNKNOWN_KEY,
    AK_ERR_CONFIG_MISSING_REQUIRED,
    AK_ERR_INTERNAL
};

typedef struct ak_table ak_table_t;
typedef struct ak_config ak_config_t;
typedef struct ak_mock ak_mock_t;

const char* ak_version(void);
const char* ak_status_name(int status);

/* Message describing the most recent failure on this thread. */
const char* ak_last_error(void);

/* Frees any string the library returned through a char** out-parameter. */
void ak_string_free(char* s);

/* ---- tables and statistics ---- */

int ak_table_load_csv(const char* path, ak_table_t** out);
void ak_table_free(ak_table_t* table);

int ak_table_shape(const ak_table_t* table, size_t* rows, size_t* cols);
int ak_table_column_name(const ak_table_t* table, size_t index, char** out);
int ak_table_column_is_numeric(const ak_table_t* table, const char* column, int* out);

/* stats[8] = count, mean, std (sample), min, q25, median, q75, max. */
int ak_table_summary(const ak_table_t* table, const char* column, double stats[8]);

/* JSON array of {label, count, fraction}, ordered by count descending. */
int ak_table_class_distribution(const ak_table_t* table, const char* column, char** out_json);

/* Equal-width histogram; each array must hold `bins` entries. */
int ak_table_histogram(const ak_table_t* table, const char* column, size_t bins, double* lo,
                       double* hi, size_t* count);

/* ---- experiment configuration ---- */

int ak_config_default(ak_config_t** out);
int ak_config_load(const char* path, ak_config_t** out);
void ak_config_free(ak_config_t* config);

int ak_config_set_seed(ak_config_t* config, uint64_t seed);
int ak_config_set_dataset(ak_config_t* config, const char* path);
int ak_config_set_output_dir(ak_config_t* config, const char* dir);
int ak_config_set_smote_k(ak_config_t* config, size_t k_neighbors);
int ak_config_set_llm_enabled(ak_config_t* config, int enabled);
int ak_config_set_llm_url(ak_config_t* config, const char* base_url);
int ak_config_set_llm_fast_poll(ak_config_t* config, int fast);
int ak_config_to_json(const ak_config_t* config, char** out_json);

/* ---- experiment stages ---- */

int ak_run_prepare(const ak_config_t* config);
int ak_run_train(const ak_config_t* config);
int ak_run_evaluate(const ak_config_t* config);
int ak_run_report(const ak_config_t* config);
/* Full pipeline; optionally returns the manifest JSON. */
int ak_run_experiment(const ak_config_t* config, char** out_manifest_json);

int ak_run_llm_prepare(const ak_config_t* config);
/* Returns the terminal job as JSON {job_id, status, fine_tuned_model}. */
int ak_run_llm_finetune(const ak_config_t* config, char** out_job_json);
/* model may be NULL: the model id recorded by ak_run_llm_finetune is used. */
int ak_run_llm_predict(const ak_config_t* config, const char* model);

/* ---- offline mock fine-tuning service ---- */

/* port 0 picks a free port. expected_key NULL disables auth checking;
 * otherwise requests must carry Authorization: Bearer <expected_key>. */
int ak_mock_start(int port, int polls_until_success, int fail_jobs, const char* expected_key,
                  ak_mock_t** out);
int ak_mock_url(const ak_mock_t* mock, char** out);
void ak_mock_free(ak_mock_t* mock);

#ifdef __cplusplus
}
#endif

#endif /* ATTRIKIT_C_API_H */
