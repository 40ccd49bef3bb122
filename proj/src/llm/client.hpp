#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corpus.hpp"

namespace attrikit {

inline constexpr const char* kApiKeyEnvVar = "ATTRIKIT_API_KEY";

struct LlmClientConfig {
    std::string base_url = "http://127.0.0.1:8089";
    // Poll/backoff schedule; the mock profile shrinks it to keep tests fast.
    double initial_backoff_ms = 2000;
    double max_backoff_ms = 60000;
    double budget_ms = 30.0 * 60.0 * 1000.0;
    int max_parallel = 4;

    static LlmClientConfig mock_profile(const std::string& url) {
        LlmClientConfig c;
        c.base_url = url;
        c.initial_backoff_ms = 10;
        c.max_backoff_ms = 100;
        c.budget_ms = 10000;
        return c;
    }
};

enum class JobStatus { Queued, Running, Succeeded, Failed };

struct FineTuneJob {
    std::string job_id;
    JobStatus status = JobStatus::Queued;
    std::string fine_tuned_model; // non-empty iff status == Succeeded
};

struct LlmPrediction {
    std::string raw_completion;
    ParsedLabel parsed = ParsedLabel::Unparseable;
};

const char* job_status_name(JobStatus status);

// Uploads the corpus, creates a fine-tune job and polls it to a terminal
// status with exponential backoff. The credential is read from
// ATTRIKIT_API_KEY before any request is issued.
FineTuneJob run_finetune(const LlmClientConfig& config, const std::string& jsonl);

LlmPrediction llm_predict(const LlmClientConfig& config, const std::string& model_id,
                          const std::string& prompt);

// Bounded-parallelism batch predict (config.max_parallel in flight); the
// result order matches the prompt order.
std::vector<LlmPrediction> llm_predict_batch(const LlmClientConfig& config,
                                             const std::string& model_id,
                                             const std::vector<std::string>& prompts);

} // namespace attrikit
