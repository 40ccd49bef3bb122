#include "client.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "../errors.hpp"

namespace attrikit {

using nlohmann::json;

const char* job_status_name(JobStatus status) {
    switch (status) {
    case JobStatus::Queued: return "queued";
    case JobStatus::Running: return "running";
    case JobStatus::Succeeded: return "succeeded";
    case JobStatus::Failed: return "failed";
    }
    return "failed";
}

namespace {

std::string require_api_key() {
    const char* key = std::getenv(kApiKeyEnvVar);
    if (key == nullptr || *key == '\0')
        raise(Errc::Auth, std::string("credential missing: set ") + kApiKeyEnvVar);
    return key;
}

JobStatus parse_status(const std::string& s) {
    if (s == "queued") return JobStatus::Queued;
    if (s == "running") return JobStatus::Running;
    if (s == "succeeded") return JobStatus::Succeeded;
    if (s == "failed") return JobStatus::Failed;
    raise(Errc::Service, "unknown job status '" + s + "'");
}

struct Backoff {
    double delay_ms;
    double cap_ms;
    double budget_ms;
    double spent_ms = 0;

    // Sleeps one step; false when the budget is exhausted.
    bool wait() {
        if (spent_ms + delay_ms > budget_ms) return false;
        std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay_ms));
        spent_ms += delay_ms;
        delay_ms = std::min(delay_ms * 2.0, cap_ms);
        return true;
    }
};

Backoff make_backoff(const LlmClientConfig& c) {
    return {c.initial_backoff_ms, c.max_backoff_ms, c.budget_ms};
}

json parse_body(const httplib::Result& res) {
    try {
        return json::parse(res->body);
    } catch (const json::exception& e) {
        raise(Errc::Service, std::string("malformed service response: ") + e.what());
    }
}

// POST with 429-retry. Other failures surface immediately.
json post_json(httplib::Client& http, const LlmClientConfig& config, const std::string& path,
               const json& body) {
    Backoff backoff = make_backoff(config);
    for (;;) {
        auto res = http.Post(path, body.dump(), "application/json");
        if (!res)
            raise(Errc::Service, "cannot reach service at " + config.base_url + path + ": " +
                                     httplib::to_string(res.error()));
        if (res->status == 401) raise(Errc::Auth, "service rejected the credential (401)");
        if (res->status == 429) {
            if (backoff.wait()) continue;
            raise(Errc::RateLimited, "service kept returning 429 past the retry budget");
        }
        if (res->status < 200 || res->status >= 300)
            raise(Errc::Service,
                  "HTTP " + std::to_string(res->status) + " from " + path + ": " + res->body);
        return parse_body(res);
    }
}

json get_json(httplib::Client& http, const LlmClientConfig& config, const std::string& path) {
    auto res = http.Get(path);
    if (!res)
        raise(Errc::Service, "cannot reach service at " + config.base_url + path + ": " +
                                 httplib::to_string(res.error()));
    if (res->status == 401) raise(Errc::Auth, "service rejected the credential (401)");
    if (res->status < 200 || res->status >= 300)
        raise(Errc::Service,
              "HTTP " + std::to_string(res->status) + " from " + path + ": " + res->body);
    return parse_body(res);
}

httplib::Client make_client(const LlmClientConfig& config, const std::string& key) {
    httplib::Client http(config.base_url);
    http.set_default_headers({{"Authorization", "Bearer " + key}});
    http.set_connection_timeout(10);
    http.set_read_timeout(120);
    return http;
}

} // namespace

FineTuneJob run_finetune(const LlmClientConfig& config, const std::string& jsonl) {
    std::string key = require_api_key();
    httplib::Client http = make_client(config, key);

    json file = post_json(http, config, "/v1/files",
                          json{{"purpose", "fine-tune"}, {"content", jsonl}});
    std::string file_id = file.at("id").get<std::string>();

    json created =
        post_json(http, config, "/v1/fine_tuning/jobs", json{{"training_file", file_id}});
    FineTuneJob job;
    job.job_id = created.at("id").get<std::string>();
    job.status = parse_status(created.at("status").get<std::string>());

    Backoff backoff = make_backoff(config);
    while (job.status == JobStatus::Queued || job.status == JobStatus::Running) {
        if (!backoff.wait())
            raise(Errc::Timeout, "fine-tune job " + job.job_id + " did not finish in budget");
        json polled = get_json(http, config, "/v1/fine_tuning/jobs/" + job.job_id);
        job.status = parse_status(polled.at("status").get<std::string>());
        if (polled.contains("fine_tuned_model") && polled["fine_tuned_model"].is_string())
            job.fine_tuned_model = polled["fine_tuned_model"].get<std::string>();
    }
    return job;
}

LlmPrediction llm_predict(const LlmClientConfig& config, const std::string& model_id,
                          const std::string& prompt) {
    std::string key = require_api_key();
    httplib::Client http = make_client(config, key);
    json res = post_json(http, config, "/v1/completions",
                         json{{"model", model_id},
                              {"prompt", prompt},
                              {"max_tokens", 50},
                              {"temperature", 0}});
    LlmPrediction out;
    out.raw_completion = res.at("choices").at(0).at("text").get<std::string>();
    out.parsed = parse_completion(out.raw_completion);
    return out;
}

std::vector<LlmPrediction> llm_predict_batch(const LlmClientConfig& config,
                                             const std::string& model_id,
                                             const std::vector<std::string>& prompts) {
    require_api_key();
    std::vector<LlmPrediction> out(prompts.size());
    size_t workers = static_cast<size_t>(std::max(config.max_parallel, 1));
    workers = std::min(workers, prompts.size());
    if (workers == 0) return out;

    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto work = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= prompts.size() || failed.load()) return;
            try {
                out[i] = llm_predict(config, model_id, prompts[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) first_error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(first_error);
    return out;
}

} // namespace attrikit
