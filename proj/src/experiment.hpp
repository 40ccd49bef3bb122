#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "llm/client.hpp"
#include "learners/learner.hpp"
#include "metrics.hpp"
#include "pipeline.hpp"
#include "smote.hpp"

namespace attrikit {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct LearnerEntry {
    std::string name; // config key, e.g. "random_forest"
    LearnerSpec spec;
};

struct LlmSettings {
    bool enabled = false;
    std::string base_url = "http://127.0.0.1:8089";
    std::string corpus_path = "llm/corpus.jsonl"; // relative to the output dir
    bool include_synthetic = false;               // SMOTE rows never enter the corpus by default
    int max_parallel = 4;
    bool fast_poll = false; // shrink the poll schedule (mock service in tests)
};

struct ExperimentConfig {
    std::string dataset = "data/ibm_hr_attrition.csv";
    std::string output_dir = "out";
    uint64_t seed = 42;
    PipelineSpec pipeline;
    SmoteConfig smote;
    std::vector<LearnerEntry> learners;
    LlmSettings llm;

    static ExperimentConfig defaults();
    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json() const; // canonical form, also the config-hash input
    void validate() const;

    LlmClientConfig client_config() const;
};

const std::vector<std::string>& learner_names();
std::string display_name(const std::string& learner_name);

struct RunSummary {
    std::map<std::string, WeightedReport> model_reports;
    std::map<std::string, double> stage_seconds;
    std::string manifest_json;
};

// Stage runners; each reads its inputs from and writes its artifacts under
// config.output_dir so the stages compose the same way the single run does.
void run_prepare(const ExperimentConfig& config);
void run_train(const ExperimentConfig& config);
void run_evaluate(const ExperimentConfig& config);
void run_report(const ExperimentConfig& config);
RunSummary run_experiment(const ExperimentConfig& config);

void run_llm_prepare(const ExperimentConfig& config);
FineTuneJob run_llm_finetune(const ExperimentConfig& config);
// model_id empty: fine-tune first (mock flow), then predict the test rows.
void run_llm_predict(const ExperimentConfig& config, const std::string& model_id);

// Shared artifact helpers (also used by the CLI and tests).
std::string artifact_path(const ExperimentConfig& config, const std::string& relative);
Matrix read_matrix_csv(const std::string& path, std::vector<std::string>* names = nullptr);
void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& names);
std::vector<int> read_label_csv(const std::string& path);
void write_label_csv(const std::string& path, const std::vector<int>& labels);

} // namespace attrikit
